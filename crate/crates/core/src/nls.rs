//! Cubic NLS `(i d_t + Delta) phi = kappa |phi|^2 phi` on the torus.
//!
//! Time stepping is Strang splitting: a half kinetic step applied exactly in
//! frequency space, a full pointwise nonlinear phase rotation, and another
//! half kinetic step. Both substeps are unitary, so mass is conserved to
//! round-off.

use std::io::Write;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::grid::{SpectralField, TorusGrid};

/// Sign of the cubic term. `Free` switches the nonlinearity (and, in the
/// many-body problem, the pair interaction) off.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    Repulsive,
    Attractive,
    Free,
}

impl Coupling {
    pub fn value(self) -> f64 {
        match self {
            Coupling::Repulsive => 1.0,
            Coupling::Attractive => -1.0,
            Coupling::Free => 0.0,
        }
    }

    pub fn from_sign(kappa: i32) -> Result<Self> {
        match kappa {
            1 => Ok(Coupling::Repulsive),
            -1 => Ok(Coupling::Attractive),
            0 => Ok(Coupling::Free),
            other => Err(Error::InvalidArgument(format!("coupling must be -1, 0 or 1, got {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NlsConfig {
    pub dt: f64,
    /// Record a sample every this many steps.
    pub sample_every: usize,
    /// Upper bound on `dt * max |k|^2`.
    pub stability_bound: f64,
}

impl NlsConfig {
    pub fn new(dt: f64, sample_every: usize) -> Self {
        Self { dt, sample_every, stability_bound: std::f64::consts::PI }
    }
}

/// NLS energy `||grad phi||^2 + (kappa / 2) ||phi||_4^4`.
pub fn nls_energy(phi: &SpectralField, coupling: Coupling) -> f64 {
    let l4 = phi.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * phi.grid().spacing();
    phi.gradient_norm_sq() + 0.5 * coupling.value() * l4
}

/// Reusable split-step propagator for one grid and coupling.
pub struct SplitStep {
    grid: TorusGrid,
    coupling: Coupling,
    dt: f64,
    half_kinetic: Vec<C64>,
}

impl SplitStep {
    /// `dt` may be negative for backward stepping.
    pub fn new(grid: &TorusGrid, coupling: Coupling, dt: f64) -> Self {
        let m = grid.points() as f64;
        let half_kinetic = grid
            .slot_wavenumbers()
            .into_iter()
            .map(|k| C64::from_polar(1.0 / m, -0.5 * k * k * dt))
            .collect();
        Self { grid: grid.clone(), coupling, dt, half_kinetic }
    }

    fn kinetic_half(&self, buf: &mut [C64]) {
        self.grid.fft_inplace(buf);
        buf.iter_mut().zip(&self.half_kinetic).for_each(|(b, p)| *b *= p);
        self.grid.ifft_inplace(buf);
    }

    /// Advances `values` in place by one step.
    pub fn step(&self, values: &mut [C64]) {
        self.kinetic_half(values);
        let g = self.coupling.value() * self.dt;
        if g != 0.0 {
            values.iter_mut().for_each(|v| *v *= C64::from_polar(1.0, -g * v.norm_sqr()));
        }
        self.kinetic_half(values);
    }

    /// Advances a field by `steps` steps.
    pub fn advance(&self, field: &SpectralField, steps: usize) -> Result<SpectralField> {
        let mut buf = field.values().to_vec();
        for s in 0..steps {
            self.step(&mut buf);
            check_finite(&buf, (s + 1) as f64 * self.dt, self.grid.spacing())?;
        }
        SpectralField::new(self.grid.clone(), buf)
    }
}

fn check_finite(buf: &[C64], time: f64, spacing: f64) -> Result<()> {
    let mass: f64 = buf.iter().map(|v| v.norm_sqr()).sum::<f64>() * spacing;
    if mass.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergence { time, norm: mass.sqrt() })
    }
}

/// Sampled NLS solution.
#[derive(Clone, Debug)]
pub struct NlsTrajectory {
    pub coupling: Coupling,
    /// Step actually used (`t_final` divided into a whole number of steps).
    pub dt: f64,
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
}

/// Evolves `phi0` to `t_final`. The step is shrunk so that a whole number of
/// steps lands exactly on `t_final`; samples are taken every
/// `sample_every` steps and at the terminal time.
pub fn nls_evolve(
    phi0: &SpectralField,
    coupling: Coupling,
    t_final: f64,
    cfg: &NlsConfig,
) -> Result<NlsTrajectory> {
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {}", cfg.dt)));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_final must be nonnegative, got {t_final}")));
    }
    if cfg.sample_every == 0 {
        return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
    }
    let grid = phi0.grid();
    let kmax = grid.nyquist();
    if cfg.dt * kmax * kmax > cfg.stability_bound {
        return Err(Error::InvalidArgument(format!(
            "dt * max|k|^2 = {} exceeds the stability bound {}",
            cfg.dt * kmax * kmax,
            cfg.stability_bound
        )));
    }
    let steps = (t_final / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { cfg.dt } else { t_final / steps as f64 };
    let stepper = SplitStep::new(grid, coupling, dt);

    let mut times = vec![0.0];
    let mut fields = vec![phi0.clone()];
    let mut buf = phi0.values().to_vec();
    for s in 1..=steps {
        stepper.step(&mut buf);
        let t = s as f64 * dt;
        check_finite(&buf, t, grid.spacing())?;
        if s % cfg.sample_every == 0 || s == steps {
            times.push(t);
            fields.push(SpectralField::new(grid.clone(), buf.clone())?);
        }
    }
    Ok(NlsTrajectory { coupling, dt, times, fields })
}

impl NlsTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_field(&self) -> &SpectralField {
        self.fields.last().expect("trajectory holds at least the initial sample")
    }

    /// Field at the sample nearest to `t`.
    pub fn field_at(&self, t: f64) -> &SpectralField {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        &self.fields[i]
    }

    pub fn masses(&self) -> Vec<f64> {
        self.fields.iter().map(SpectralField::mass).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.fields.iter().map(|f| nls_energy(f, self.coupling)).collect()
    }

    /// Largest relative deviation of the mass from its initial value.
    pub fn mass_drift(&self) -> f64 {
        relative_drift(&self.masses())
    }

    /// Largest deviation of the energy from its initial value, relative to
    /// `max(|E_0|, 1)`.
    pub fn energy_drift(&self) -> f64 {
        let e = self.energies();
        let scale = e[0].abs().max(1.0);
        e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max) / scale
    }

    /// Time spacing between consecutive samples (the solver step for a
    /// single-sample trajectory).
    pub fn sample_interval(&self) -> f64 {
        if self.times.len() >= 2 {
            self.times[1] - self.times[0]
        } else {
            self.dt
        }
    }

    /// Writes `t,mass,energy,sup_norm,h1,h2`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,mass,energy,sup_norm,h1,h2")?;
        for (t, f) in self.times.iter().zip(&self.fields) {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t,
                f.mass(),
                nls_energy(f, self.coupling),
                f.sup_norm(),
                f.sobolev_norm(1.0),
                f.sobolev_norm(2.0)
            )?;
        }
        Ok(())
    }
}

fn relative_drift(values: &[f64]) -> f64 {
    let v0 = values[0];
    let scale = if v0 != 0.0 { v0.abs() } else { 1.0 };
    values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max) / scale
}

/// Checks `2/p = 1/2 - 1/q` with `2 <= p, q <= inf`.
pub fn is_admissible(p: f64, q: f64) -> bool {
    let in_range = |e: f64| e >= 2.0 && !e.is_nan();
    in_range(p) && in_range(q) && (2.0 / p - (0.5 - 1.0 / q)).abs() < 1e-12
}

/// Discrete `L^p_t L^q_x` norm of a sampled trajectory: trapezoid rule over
/// the sample times, or weight `dt` for a single-sample trajectory. The
/// quadrature only sees the samples, so coarse sampling under-resolves
/// temporal peaks.
pub fn strichartz_norm(traj: &NlsTrajectory, p: f64, q: f64) -> Result<f64> {
    if !is_admissible(p, q) {
        return Err(Error::InvalidArgument(format!("({p}, {q}) is not Strichartz admissible")));
    }
    let spatial: Vec<f64> = traj.fields.iter().map(|f| f.lq_norm(q)).collect();
    if p.is_infinite() {
        return Ok(spatial.iter().copied().fold(0.0, f64::max));
    }
    let powered: Vec<f64> = spatial.iter().map(|s| s.powf(p)).collect();
    let integral = if powered.len() == 1 {
        powered[0] * traj.dt
    } else {
        traj.times.windows(2).zip(powered.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum()
    };
    Ok(integral.powf(1.0 / p))
}

/// Admissible pairs used for the `S^0`-type diagnostic.
pub const STRICHARTZ_PAIRS: [(f64, f64); 4] =
    [(f64::INFINITY, 2.0), (8.0, 4.0), (6.0, 6.0), (4.0, f64::INFINITY)];

/// Max over [`STRICHARTZ_PAIRS`] of the sampled Strichartz norms.
pub fn s0_norm(traj: &NlsTrajectory) -> f64 {
    STRICHARTZ_PAIRS
        .iter()
        .map(|&(p, q)| strichartz_norm(traj, p, q).expect("pairs are admissible"))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct DependenceReport {
    pub times: Vec<f64>,
    /// `||phi(t) - psi(t)||_{L^2}` at each sample.
    pub gaps: Vec<f64>,
    pub initial_gap: f64,
    pub sup_gap: f64,
    /// `L^4_t L^inf_x` norms of the two solutions.
    pub strichartz_phi: f64,
    pub strichartz_psi: f64,
    /// `||phi0 - psi0|| exp(C sqrt(T) (|phi|^2 + |psi|^2))` at the supplied `C`.
    pub bound: f64,
    /// Fit of `log gap` against `t`, when every gap is positive.
    pub log_gap_fit: Option<LineFit>,
}

/// Evolves two data and reports the sup-in-time `L^2` gap next to the
/// Lipschitz dependence bound evaluated at a caller-supplied constant.
pub fn dependence_gap(
    phi0: &SpectralField,
    psi0: &SpectralField,
    coupling: Coupling,
    t_final: f64,
    cfg: &NlsConfig,
    constant: f64,
) -> Result<DependenceReport> {
    if phi0.grid() != psi0.grid() {
        return Err(Error::InvalidArgument("data live on different grids".into()));
    }
    let a = nls_evolve(phi0, coupling, t_final, cfg)?;
    let b = nls_evolve(psi0, coupling, t_final, cfg)?;
    let gaps: Vec<f64> = a.fields.iter().zip(&b.fields).map(|(x, y)| x.sub(y).l2_norm()).collect();
    let initial_gap = gaps[0];
    let sup_gap = gaps.iter().copied().fold(0.0, f64::max);
    let strichartz_phi = strichartz_norm(&a, 4.0, f64::INFINITY)?;
    let strichartz_psi = strichartz_norm(&b, 4.0, f64::INFINITY)?;
    let bound = initial_gap
        * (constant * t_final.sqrt() * (strichartz_phi.powi(2) + strichartz_psi.powi(2))).exp();
    let log_gap_fit = if gaps.iter().all(|g| *g > 0.0) {
        let logs: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
        fit_line(&a.times, &logs)
    } else {
        None
    };
    Ok(DependenceReport {
        times: a.times,
        gaps,
        initial_gap,
        sup_gap,
        strichartz_phi,
        strichartz_psi,
        bound,
        log_gap_fit,
    })
}

#[derive(Clone, Debug)]
pub struct MollifiedDatum {
    pub field: SpectralField,
    /// Frequency cutoff `(ln N)^eta`.
    pub cutoff: f64,
    /// `||P_{> cutoff} phi0||_{L^2}` of the unnormalized input.
    pub tail_norm: f64,
}

/// `P_{<= (ln N)^eta} phi0`, renormalized to unit mass.
pub fn mollify_initial_datum(phi0: &SpectralField, n: usize, eta: f64) -> Result<MollifiedDatum> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("particle count must be >= 2, got {n}")));
    }
    if !(eta > 0.0 && eta < 0.25) {
        return Err(Error::OutOfRange { value: eta, lo: 0.0, hi: 0.25 });
    }
    let cutoff = (n as f64).ln().powf(eta);
    let low = phi0.lp_project(cutoff);
    let tail_norm = phi0.lp_tail(cutoff).l2_norm();
    let field = low.normalized().filter(|_| low.l2_norm() > 1e-14);
    match field {
        Some(field) => Ok(MollifiedDatum { field, cutoff, tail_norm }),
        None => Err(Error::ZeroLowFrequency { cutoff }),
    }
}
