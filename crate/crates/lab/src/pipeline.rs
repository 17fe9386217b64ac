//! Many-body vs NLS comparison runs and the sweeps built on them.

use std::sync::Arc;
use std::time::Instant;

use bosegas::counting::{grad_q1_norm_sq, Counter};
use bosegas::fit::{fit_loglog, LineFit};
use bosegas::fock::{build_hamiltonian, product_state, FockBasis, ModeBasis, PotentialShape, TwoBodyKernel};
use bosegas::nls::{nls_energy, nls_evolve, NlsConfig, NlsTrajectory};
use bosegas::observables::{
    energy_per_particle, fidelity, k_from_one_check, rdm1, rdm2, sandwich_check, trace_norm_gap,
};
use bosegas::propagator::{evolve, FockTrajectory, PropagatorConfig};
use bosegas::{par, Coupling, SpectralField, TorusGrid};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::datum::build_datum;
use crate::error::{LabError, LabResult};
use crate::output::{PointKey, PointRow};

/// Shared, immutable ingredients of every point in a run.
#[derive(Clone, Debug)]
pub struct Setup {
    pub grid: TorusGrid,
    pub modes: ModeBasis,
    pub shape: PotentialShape,
    pub coupling: Coupling,
    pub datum: SpectralField,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> LabResult<Self> {
        let grid = TorusGrid::new(cfg.length, cfg.points).map_err(|e| LabError::Config(e.to_string()))?;
        let modes = ModeBasis::new(&grid, cfg.modes).map_err(|e| LabError::Config(e.to_string()))?;
        let datum = build_datum(&cfg.datum, &grid, cfg.seed)?;
        Ok(Self { grid, modes, shape: cfg.potential_shape()?, coupling: cfg.coupling()?, datum })
    }
}

/// One sample of a many-body/NLS comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps: f64,
    pub t: f64,
    #[serde(rename = "beta_N")]
    pub beta: f64,
    #[serde(rename = "alpha_N")]
    pub alpha: f64,
    pub trace_gap_k1: f64,
    pub trace_gap_k2: Option<f64>,
    pub fidelity_k1: f64,
    /// `(1/N) <Phi, H Phi>`.
    #[serde(rename = "E_N")]
    pub energy_many: f64,
    /// NLS energy of `phi(t)`.
    #[serde(rename = "E_nls")]
    pub energy_nls: f64,
    pub energy_gap: f64,
    pub grad_q1: f64,
    pub sandwich_margin: f64,
    pub kfrom1_margin: Option<f64>,
    pub runtime_seconds: Option<f64>,
}

pub const RESULT_COLUMNS: &[&str] = &[
    "N",
    "eps",
    "t",
    "beta_N",
    "alpha_N",
    "trace_gap_k1",
    "trace_gap_k2",
    "fidelity_k1",
    "E_N",
    "E_nls",
    "energy_gap",
    "grad_q1",
    "sandwich_margin",
    "kfrom1_margin",
    "runtime_seconds",
];

impl PointRow for ResultRow {
    fn point(&self) -> PointKey {
        PointKey::new(self.n, self.eps)
    }

    fn header() -> &'static [&'static str] {
        RESULT_COLUMNS
    }
}

/// Conservation diagnostics of one point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointDiagnostics {
    pub particles: usize,
    pub eps: f64,
    pub fock_dimension: usize,
    pub norm_drift: f64,
    /// Drift of `(1/N) <Phi, H Phi>` relative to `|E_0| + 1`.
    pub energy_drift: f64,
    pub nls_mass_drift: f64,
    pub nls_energy_drift: f64,
    /// Largest `|Tr_2 gamma_2 - gamma_1|` over the samples.
    pub partial_trace_defect: f64,
}

#[derive(Clone, Debug)]
pub struct PointOutcome {
    pub rows: Vec<ResultRow>,
    pub diagnostics: PointDiagnostics,
}

/// Matched many-body and NLS trajectories from one windowed datum.
pub struct PairedRun {
    pub basis: Arc<FockBasis>,
    pub many: FockTrajectory,
    pub nls: NlsTrajectory,
    pub hamiltonian: bosegas::fock::SparseHermitian,
}

impl PairedRun {
    /// Conservation diagnostics; the partial-trace defect is left at zero.
    pub fn diagnostics(&self, eps: f64) -> PointDiagnostics {
        let n = self.basis.particles();
        let per_particle: Vec<f64> = self.many.energies.iter().map(|e| e / n as f64).collect();
        let e0 = per_particle[0];
        PointDiagnostics {
            particles: n,
            eps,
            fock_dimension: self.basis.dim(),
            norm_drift: self.many.norm_drift(),
            energy_drift: per_particle.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / (e0.abs() + 1.0),
            nls_mass_drift: self.nls.mass_drift(),
            nls_energy_drift: self.nls.energy_drift(),
            partial_trace_defect: 0.0,
        }
    }
}

fn propagator_config(cfg: &ExperimentConfig) -> PropagatorConfig {
    PropagatorConfig {
        dt: cfg.dt,
        krylov_dim: cfg.tolerances.krylov_dim,
        tolerance: cfg.tolerances.krylov,
        ..PropagatorConfig::default()
    }
}

/// Evolves `product_state(phi0_w)` under `H_{N,eps}` and `phi0_w` under NLS,
/// sampled at identical times. `phi0` must already be windowed.
pub fn paired_run(
    cfg: &ExperimentConfig,
    setup: &Setup,
    phi0: &SpectralField,
    n: usize,
    eps: f64,
) -> LabResult<PairedRun> {
    let kernel = TwoBodyKernel::new(setup.shape, eps, &setup.modes)?;
    let basis = Arc::new(FockBasis::new(n, &setup.modes)?);
    let hamiltonian = build_hamiltonian(&basis, &kernel, setup.coupling);
    let orbital = setup.modes.orbital(phi0)?;
    let state = product_state(&orbital, &basis)?;
    let many = evolve(&hamiltonian, &state, cfg.t_final, &propagator_config(cfg), cfg.sample_every)?;

    let steps = (cfg.t_final / cfg.dt - 1e-9).ceil().max(0.0);
    let step = if steps == 0.0 { cfg.dt } else { cfg.t_final / steps };
    let sub = (step / cfg.nls_dt - 1e-9).ceil().max(1.0) as usize;
    let nls_cfg = NlsConfig::new(step / sub as f64, sub * cfg.sample_every);
    let nls = nls_evolve(phi0, setup.coupling, cfg.t_final, &nls_cfg)?;
    let aligned = many.times.len() == nls.times.len()
        && many.times.iter().zip(&nls.times).all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    if !aligned {
        return Err(LabError::Numerical(bosegas::Error::InvalidArgument(
            "many-body and NLS sample times do not align".into(),
        )));
    }
    Ok(PairedRun { basis, many, nls, hamiltonian })
}

/// `run_pair`: every `ResultRow` column at each sample.
pub fn run_pair(cfg: &ExperimentConfig, setup: &Setup, n: usize, eps: f64) -> LabResult<PointOutcome> {
    let started = Instant::now();
    let phi0 = setup.modes.orbital(&setup.datum)?.to_field(&setup.modes);
    let run = paired_run(cfg, setup, &phi0, n, eps)?;
    let modes = &setup.modes;
    let coupling = setup.coupling;

    let rows: Vec<LabResult<(ResultRow, f64)>> = par::map_indices(run.many.times.len(), |i| {
        let state = &run.many.states[i];
        let field = &run.nls.fields[i];
        let orbital = modes.orbital(field)?;
        let dist = Counter::new(&orbital, &run.basis)?.distribution(state)?;
        let g1 = rdm1(state);
        let (gap2, kmargin, defect) = if n >= 2 {
            let g2 = rdm2(state)?;
            let report = k_from_one_check(&g1, &g2, &orbital)?;
            (Some(trace_norm_gap(&g2, &orbital)), Some(report.margin()), report.partial_trace_defect)
        } else {
            (None, None, 0.0)
        };
        let energy_many = energy_per_particle(state, &run.hamiltonian);
        let energy_nls = nls_energy(field, coupling);
        let row = ResultRow {
            n,
            eps,
            t: run.many.times[i],
            beta: dist.beta(),
            alpha: dist.alpha(),
            trace_gap_k1: trace_norm_gap(&g1, &orbital),
            trace_gap_k2: gap2,
            fidelity_k1: fidelity(&g1, &orbital)?,
            energy_many,
            energy_nls,
            energy_gap: energy_many - energy_nls,
            grad_q1: grad_q1_norm_sq(state, &orbital),
            sandwich_margin: sandwich_check(&g1, &orbital)?.margin(),
            kfrom1_margin: kmargin,
            runtime_seconds: None,
        };
        Ok((row, defect))
    });
    let mut out = Vec::with_capacity(rows.len());
    let mut defect = 0.0f64;
    for r in rows {
        let (row, d) = r?;
        defect = defect.max(d);
        out.push(row);
    }
    if cfg.record_timing {
        let secs = started.elapsed().as_secs_f64();
        out.iter_mut().for_each(|r| r.runtime_seconds = Some(secs));
    }
    let diagnostics = PointDiagnostics { partial_trace_defect: defect, ..run.diagnostics(eps) };
    Ok(PointOutcome { rows: out, diagnostics })
}

/// Row whose time is closest to `t`.
pub fn row_at(rows: &[ResultRow], t: f64) -> Option<&ResultRow> {
    rows.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
}

/// Least-squares order of one observable against a control parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub observable: String,
    pub probe_time: f64,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// `-slope` of `log value` against `log x` (positive: decays in `x`).
    pub order: Option<f64>,
    pub residual: Option<f64>,
    pub strictly_decreasing: bool,
    pub identically_zero: bool,
}

impl OrderFit {
    pub fn new(observable: &str, probe_time: f64, xs: Vec<f64>, values: Vec<f64>) -> Self {
        let identically_zero = values.iter().all(|v| *v == 0.0);
        let strictly_decreasing = values.len() >= 2 && values.windows(2).all(|w| w[1] < w[0]);
        let fit: Option<LineFit> = if identically_zero { None } else { fit_loglog(&xs, &values) };
        Self {
            observable: observable.into(),
            probe_time,
            order: fit.map(|f| -f.slope),
            residual: fit.map(|f| f.residual),
            xs,
            values,
            strictly_decreasing,
            identically_zero,
        }
    }
}

/// Fits of `beta_N` and `trace_gap_k1` at the probe time against `N`.
pub fn fit_in_n(points: &[(usize, &[ResultRow])], probe: f64) -> Vec<OrderFit> {
    let xs: Vec<f64> = points.iter().map(|(n, _)| *n as f64).collect();
    let pick = |f: fn(&ResultRow) -> f64| -> Vec<f64> {
        points.iter().map(|(_, rows)| row_at(rows, probe).map_or(f64::NAN, f)).collect()
    };
    vec![
        OrderFit::new("beta_N", probe, xs.clone(), pick(|r| r.beta)),
        OrderFit::new("trace_gap_k1", probe, xs, pick(|r| r.trace_gap_k1)),
    ]
}

/// Fits of `beta_N` and `trace_gap_k1` at the probe time against `eps`
/// (the reported order is `-slope`, so a positive `eps`-order shows up as a
/// negative number; the raw slope is `-order`).
pub fn fit_in_eps(points: &[(f64, &[ResultRow])], probe: f64) -> Vec<OrderFit> {
    let xs: Vec<f64> = points.iter().map(|(e, _)| *e).collect();
    let pick = |f: fn(&ResultRow) -> f64| -> Vec<f64> {
        points.iter().map(|(_, rows)| row_at(rows, probe).map_or(f64::NAN, f)).collect()
    };
    vec![
        OrderFit::new("beta_N", probe, xs.clone(), pick(|r| r.beta)),
        OrderFit::new("trace_gap_k1", probe, xs, pick(|r| r.trace_gap_k1)),
    ]
}

/// Successive differences `|g(eps_{i+1}) - g(eps_i)|` of an observable at
/// the probe time (Cauchy table of an `eps`-sweep).
pub fn successive_differences(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
}
