//! Declarative experiment configuration (TOML, unknown keys rejected).

use std::path::{Path, PathBuf};

use bosegas::fock::PotentialShape;
use bosegas::Coupling;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

/// Interaction width: a fixed value or `eps = N^{-beta}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum EpsRule {
    Fixed(f64),
    Power(f64),
}

impl EpsRule {
    pub fn eps_for(&self, n: usize) -> f64 {
        match *self {
            EpsRule::Fixed(e) => e,
            EpsRule::Power(beta) => (n as f64).powf(-beta),
        }
    }
}

/// Named initial profiles. Every profile is normalized to unit mass after
/// sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatumSpec {
    /// `exp(a cos(x - x0)) e^{i n0 x}`: smooth and spectrally compact.
    VonMises {
        #[serde(default = "one")]
        concentration: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        momentum: i64,
    },
    /// `exp(-(x - x0)^2 / (2 w^2)) e^{i p x}`.
    Gaussian { center: f64, width: f64, #[serde(default)] momentum: f64 },
    /// `sech(x - x0)`.
    Sech { center: f64 },
    /// `e^{i k_n x}`.
    PlaneWave { mode: i64 },
    /// Coefficients `(1 + |n|)^{-s}` with independent uniform phases drawn
    /// from the run seed.
    Rough { tail_exponent: f64 },
    /// Two columns `re,im` per grid node, no header.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Per-step Krylov tolerance.
    #[serde(default = "default_krylov")]
    pub krylov: f64,
    #[serde(default = "default_krylov_dim")]
    pub krylov_dim: usize,
    /// Replaces every verification-suite tolerance when set.
    #[serde(default)]
    pub verify: Option<f64>,
}

fn default_krylov() -> f64 {
    1e-10
}

fn default_krylov_dim() -> usize {
    30
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { krylov: default_krylov(), krylov_dim: default_krylov_dim(), verify: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsSweep {
    pub particles: usize,
    /// Widths, run in the given order (normally descending).
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Box length `L`.
    pub length: f64,
    /// Grid points `M`.
    pub points: usize,
    /// Mode window `K`.
    pub modes: usize,
    pub particles: Vec<usize>,
    pub epsilon: EpsRule,
    #[serde(default = "default_shape")]
    pub shape: String,
    /// `+1`, `-1`, or `0` (interaction and nonlinearity off).
    pub kappa: i32,
    pub datum: DatumSpec,
    pub t_final: f64,
    /// Many-body step; also the sampling unit.
    pub dt: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    /// NLS split-step size (rounded down to divide `dt`).
    #[serde(default = "default_nls_dt")]
    pub nls_dt: f64,
    /// Time at which sweep fits are taken; defaults to `t_final`.
    #[serde(default)]
    pub probe_time: Option<f64>,
    /// Mollification exponent; enables `theorem-l`.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub eps_sweep: Option<EpsSweep>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Fill the `runtime_seconds` column. Off by default because wall time
    /// breaks byte-identical reruns.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_shape() -> String {
    "gaussian".into()
}

fn default_sample_every() -> usize {
    1
}

fn default_nls_dt() -> f64 {
    1e-3
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_workers() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> LabResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> LabResult<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if !(self.length > 0.0 && self.length.is_finite()) {
            return bad(format!("length must be positive, got {}", self.length));
        }
        if self.points < 8 || !self.points.is_power_of_two() {
            return bad(format!("points must be a power of two >= 8, got {}", self.points));
        }
        if self.modes < 2 || !self.modes.is_multiple_of(2) || self.modes > self.points {
            return bad(format!("modes must be even with 2 <= K <= M, got {}", self.modes));
        }
        if self.particles.is_empty() || self.particles.contains(&0) {
            return bad("particles must be a nonempty list of counts >= 1".into());
        }
        match self.epsilon {
            EpsRule::Fixed(e) if !(e > 0.0 && e.is_finite()) => return bad(format!("epsilon must be positive, got {e}")),
            EpsRule::Power(b) if !(b > 0.0 && b.is_finite()) => return bad(format!("beta must be positive, got {b}")),
            _ => {}
        }
        self.potential_shape()?;
        self.coupling()?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be nonnegative, got {}", self.t_final));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.nls_dt > 0.0 && self.nls_dt.is_finite()) {
            return bad("dt and nls_dt must be positive".into());
        }
        if self.sample_every == 0 || self.workers == 0 {
            return bad("sample_every and workers must be at least 1".into());
        }
        if let Some(t) = self.probe_time {
            if !(0.0..=self.t_final).contains(&t) {
                return bad(format!("probe_time {t} lies outside [0, t_final]"));
            }
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta < 0.25) {
                return bad(format!("eta must lie in (0, 1/4), got {eta}"));
            }
        }
        if let Some(sweep) = &self.eps_sweep {
            if sweep.particles == 0 || sweep.values.is_empty() || sweep.values.iter().any(|e| e.is_nan() || *e <= 0.0) {
                return bad("eps_sweep needs particles >= 1 and positive widths".into());
            }
        }
        if let DatumSpec::File { path } = &self.datum {
            if !path.is_file() {
                return bad(format!("datum file {} does not exist", path.display()));
            }
        }
        Ok(())
    }

    pub fn potential_shape(&self) -> LabResult<PotentialShape> {
        self.shape.parse().map_err(|e: bosegas::Error| LabError::Config(e.to_string()))
    }

    pub fn coupling(&self) -> LabResult<Coupling> {
        Coupling::from_sign(self.kappa).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn probe(&self) -> f64 {
        self.probe_time.unwrap_or(self.t_final)
    }
}
