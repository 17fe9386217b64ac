//! Subcommand implementations: points fan out over a worker pool, rows go
//! through the resumable sink, and every run leaves a JSON sidecar with the
//! configuration, wall time, per-point diagnostics and fits.

use std::path::PathBuf;
use std::time::Instant;

use bosegas::nls::{nls_evolve, NlsConfig};
use bosegas::par;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::output::{provenance_lines, write_json, PointKey, PointRow, ResultSink, VERSION};
use crate::pipeline::{fit_in_eps, fit_in_n, row_at, run_pair, successive_differences, PointDiagnostics, ResultRow, Setup};
use crate::suites::{run_all, SuiteReport, SuiteTolerances};
use crate::theorem_l::{theorem_l_point, TheoremLRow};

/// Norm, energy-per-particle and NLS mass drift tolerance.
pub const DRIFT_TOLERANCE: f64 = 1e-8;
/// NLS energy drift tolerance (split-step energy is only conserved to the
/// splitting error).
pub const NLS_ENERGY_DRIFT_TOLERANCE: f64 = 1e-6;

/// Files written by one command.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
}

/// Rows of every point, in canonical order.
#[derive(Clone, Debug)]
pub struct PointTable<R> {
    pub points: Vec<(PointKey, Vec<R>)>,
    pub diagnostics: Vec<PointDiagnostics>,
    pub artifacts: RunArtifacts,
}

impl<R> PointTable<R> {
    pub fn rows(&self, key: PointKey) -> Option<&[R]> {
        self.points.iter().find(|(k, _)| *k == key).map(|(_, r)| r.as_slice())
    }
}

/// Runs `f` on each point through a pool of `workers` threads (sequential
/// when the `parallel` feature is off or `workers == 1`), results in input
/// order.
fn run_on_workers<T: Send>(
    workers: usize,
    keys: &[PointKey],
    f: impl Fn(PointKey) -> LabResult<T> + Sync + Send,
) -> LabResult<Vec<T>> {
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| LabError::Config(format!("cannot start worker pool: {e}")))?;
        return pool.install(|| keys.par_iter().map(|k| f(*k)).collect());
    }
    let _ = workers;
    keys.iter().map(|k| f(*k)).collect()
}

fn check_drift(d: &PointDiagnostics) {
    for (what, v, tol) in [
        ("many-body norm", d.norm_drift, DRIFT_TOLERANCE),
        ("many-body energy", d.energy_drift, DRIFT_TOLERANCE),
        ("NLS mass", d.nls_mass_drift, DRIFT_TOLERANCE),
        ("NLS energy", d.nls_energy_drift, NLS_ENERGY_DRIFT_TOLERANCE),
    ] {
        if v > tol {
            log::warn!("N = {}, eps = {}: {what} drift {v:e} exceeds {tol:e}", d.particles, d.eps);
        }
    }
}

/// Rows per point, diagnostics of freshly computed points, CSV path.
type PointResults<R> = (Vec<(PointKey, Vec<R>)>, Vec<PointDiagnostics>, PathBuf);

/// Shared driver: resumes finished points, computes the rest, rewrites
/// the table canonically.
fn run_points<R: PointRow + Sync>(
    cfg: &ExperimentConfig,
    command: &str,
    keys: &[PointKey],
    compute: impl Fn(PointKey) -> LabResult<(Vec<R>, Option<PointDiagnostics>)> + Sync + Send,
) -> LabResult<PointResults<R>> {
    let csv = cfg.output.join(format!("{command}.csv"));
    let sink: ResultSink<R> = ResultSink::open(&csv, provenance_lines(cfg, command))?;
    let results = run_on_workers(cfg.workers, keys, |key| {
        if let Some(rows) = sink.resumed_rows(key) {
            log::info!("N = {}, eps = {}: resumed", key.particles, key.eps());
            return Ok((rows.to_vec(), None));
        }
        let started = Instant::now();
        let (rows, diag) = compute(key)?;
        sink.append(key, &rows)?;
        log::info!("N = {}, eps = {}: done in {:.2}s", key.particles, key.eps(), started.elapsed().as_secs_f64());
        Ok((rows, diag))
    })?;
    let path = sink.finish(keys)?;
    let mut points = Vec::with_capacity(keys.len());
    let mut diagnostics = Vec::new();
    for (key, (rows, diag)) in keys.iter().zip(results) {
        if let Some(d) = diag {
            check_drift(&d);
            diagnostics.push(d);
        }
        points.push((*key, rows));
    }
    Ok((points, diagnostics, path))
}

fn sidecar(
    cfg: &ExperimentConfig,
    command: &str,
    started: Instant,
    extra: serde_json::Value,
) -> LabResult<PathBuf> {
    let path = cfg.output.join(format!("{command}.json"));
    let mut value = json!({
        "command": command,
        "version": VERSION,
        "parallel": par::is_parallel(),
        "workers": cfg.workers,
        "wall_seconds": started.elapsed().as_secs_f64(),
        "config": cfg,
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (value.as_object_mut(), extra) {
        obj.extend(more);
    }
    write_json(&path, &value)?;
    Ok(path)
}

fn pair_keys(cfg: &ExperimentConfig) -> Vec<PointKey> {
    cfg.particles.iter().map(|&n| PointKey::new(n, cfg.epsilon.eps_for(n))).collect()
}

fn run_pairs(cfg: &ExperimentConfig, command: &str, keys: &[PointKey]) -> LabResult<(PointTable<ResultRow>, Instant)> {
    let started = Instant::now();
    let setup = Setup::new(cfg)?;
    let (points, diagnostics, csv) = run_points(cfg, command, keys, |key| {
        let out = run_pair(cfg, &setup, key.particles, key.eps())?;
        Ok((out.rows, Some(out.diagnostics)))
    })?;
    let artifacts = RunArtifacts { csv, sidecar: PathBuf::new() };
    Ok((PointTable { points, diagnostics, artifacts }, started))
}

/// `nls-run`: the NLS trajectory of the full-grid datum.
pub fn nls_run(cfg: &ExperimentConfig) -> LabResult<RunArtifacts> {
    let started = Instant::now();
    let setup = Setup::new(cfg)?;
    let steps = (cfg.dt / cfg.nls_dt - 1e-9).ceil().max(1.0) as usize;
    let nls_cfg = NlsConfig::new(cfg.dt / steps as f64, steps * cfg.sample_every);
    let traj = nls_evolve(&setup.datum, setup.coupling, cfg.t_final, &nls_cfg)?;
    let csv = cfg.output.join("nls-run.csv");
    std::fs::create_dir_all(&cfg.output)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(&csv)?);
    for line in provenance_lines(cfg, "nls-run") {
        std::io::Write::write_all(&mut file, format!("{line}\n").as_bytes())?;
    }
    traj.write_csv(&mut file)?;
    let diag = json!({ "mass_drift": traj.mass_drift(), "energy_drift": traj.energy_drift(), "samples": traj.len() });
    if traj.mass_drift() > DRIFT_TOLERANCE || traj.energy_drift() > NLS_ENERGY_DRIFT_TOLERANCE {
        log::warn!("NLS conservation drift out of tolerance: {diag}");
    }
    let sidecar = sidecar(cfg, "nls-run", started, json!({ "diagnostics": diag }))?;
    Ok(RunArtifacts { csv, sidecar })
}

/// `manybody-run`: paired many-body/NLS comparison at each configured `N`.
pub fn manybody_run(cfg: &ExperimentConfig) -> LabResult<PointTable<ResultRow>> {
    let (mut table, started) = run_pairs(cfg, "manybody-run", &pair_keys(cfg))?;
    table.artifacts.sidecar =
        sidecar(cfg, "manybody-run", started, json!({ "diagnostics": table.diagnostics }))?;
    Ok(table)
}

/// `sweep-n`: as `manybody-run` plus order fits in `N` at the probe time.
pub fn sweep_n(cfg: &ExperimentConfig) -> LabResult<PointTable<ResultRow>> {
    let mut distinct = cfg.particles.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(LabError::Config("sweep-n needs at least three distinct particle numbers".into()));
    }
    let keys: Vec<PointKey> = distinct.iter().map(|&n| PointKey::new(n, cfg.epsilon.eps_for(n))).collect();
    let (mut table, started) = run_pairs(cfg, "sweep-n", &keys)?;
    let probe = cfg.probe();
    let series: Vec<(usize, &[ResultRow])> = table.points.iter().map(|(k, r)| (k.particles, r.as_slice())).collect();
    let fits = fit_in_n(&series, probe);
    for f in &fits {
        if f.identically_zero {
            log::warn!("{} vanishes identically at t = {probe}; no order fitted", f.observable);
        }
    }
    table.artifacts.sidecar =
        sidecar(cfg, "sweep-n", started, json!({ "diagnostics": table.diagnostics, "fits": fits }))?;
    Ok(table)
}

/// `sweep-eps`: fixed `N`, the configured widths, fits in `eps` and the
/// table of successive differences.
pub fn sweep_eps(cfg: &ExperimentConfig) -> LabResult<PointTable<ResultRow>> {
    let sweep = cfg.eps_sweep.as_ref().ok_or_else(|| LabError::Config("sweep-eps needs [eps_sweep]".into()))?;
    let keys: Vec<PointKey> = sweep.values.iter().map(|&e| PointKey::new(sweep.particles, e)).collect();
    let (mut table, started) = run_pairs(cfg, "sweep-eps", &keys)?;
    let probe = cfg.probe();
    let series: Vec<(f64, &[ResultRow])> = table.points.iter().map(|(k, r)| (k.eps(), r.as_slice())).collect();
    let fits = fit_in_eps(&series, probe);
    let at_probe = |f: fn(&ResultRow) -> f64| -> Vec<f64> {
        series.iter().map(|(_, rows)| row_at(rows, probe).map_or(f64::NAN, f)).collect()
    };
    let differences = json!({
        "beta_N": successive_differences(&at_probe(|r| r.beta)),
        "trace_gap_k1": successive_differences(&at_probe(|r| r.trace_gap_k1)),
        "E_N": successive_differences(&at_probe(|r| r.energy_many)),
    });
    table.artifacts.sidecar = sidecar(
        cfg,
        "sweep-eps",
        started,
        json!({ "diagnostics": table.diagnostics, "fits": fits, "successive_differences": differences }),
    )?;
    Ok(table)
}

/// `theorem-l`: rough datum, mollified many-body dynamics, two-leg bound.
pub fn theorem_l(cfg: &ExperimentConfig) -> LabResult<PointTable<TheoremLRow>> {
    let started = Instant::now();
    if cfg.eta.is_none() {
        return Err(LabError::Config("theorem-l needs eta".into()));
    }
    let setup = Setup::new(cfg)?;
    let keys = pair_keys(cfg);
    let (points, diagnostics, csv) =
        run_points(cfg, "theorem-l", &keys, |key| {
        let (rows, diag) = theorem_l_point(cfg, &setup, key.particles, key.eps())?;
        Ok((rows, Some(diag)))
    })?;
    let sidecar = sidecar(cfg, "theorem-l", started, json!({ "diagnostics": diagnostics }))?;
    Ok(PointTable { points, diagnostics, artifacts: RunArtifacts { csv, sidecar } })
}

/// `verify`: every suite; fails with exit status 3 when any suite fails.
pub fn verify(cfg: &ExperimentConfig) -> LabResult<Vec<SuiteReport>> {
    let started = Instant::now();
    let tol = cfg.tolerances.verify.map_or_else(SuiteTolerances::default, SuiteTolerances::uniform);
    let reports = run_all(cfg.seed, &tol)?;
    for r in &reports {
        println!("{}", r.line());
    }
    sidecar(cfg, "verify", started, json!({ "suites": reports }))?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(reports)
    } else {
        Err(LabError::Verification(failed.join(", ")))
    }
}
