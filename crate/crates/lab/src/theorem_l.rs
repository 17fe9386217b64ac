//! Rough-datum pipeline: many-body dynamics from a mollified product state
//! compared against the rough NLS solution through the triangle inequality
//! `gap(gamma_N, phi) <= gap(gamma_N, phi_N) + gap(phi_N, phi)`.

use bosegas::linalg::trace_norm;
use bosegas::nls::{mollify_initial_datum, nls_evolve, NlsConfig};
use bosegas::observables::{rdm1, trace_norm_gap};
use bosegas::{par, SpectralField, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::output::{PointKey, PointRow};
use crate::pipeline::{paired_run, PointDiagnostics, Setup};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremLRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub eps: f64,
    pub t: f64,
    /// `(ln N)^eta`.
    pub cutoff: f64,
    /// `||P_{> cutoff} phi_0||` of the unit-mass rough datum.
    pub tail_mass: f64,
    /// `Tr |gamma_N - |phi_N><phi_N||` (many-body vs mollified NLS).
    pub leg1: f64,
    /// `Tr ||phi_N><phi_N| - |phi><phi||` by eigendecomposition.
    pub leg2: f64,
    /// `2 sqrt(1 - |<phi_N, phi>|^2)`.
    pub leg2_closed_form: f64,
    pub total: f64,
}

pub const THEOREM_L_COLUMNS: &[&str] =
    &["N", "eps", "t", "cutoff", "tail_mass", "leg1", "leg2", "leg2_closed_form", "total"];

impl PointRow for TheoremLRow {
    fn point(&self) -> PointKey {
        PointKey::new(self.n, self.eps)
    }

    fn header() -> &'static [&'static str] {
        THEOREM_L_COLUMNS
    }
}

/// Trace distance of two pure states, from the eigenvalues of
/// `|u><u| - |v><v|` written in an orthonormal basis of `span{u, v}`.
pub fn pure_state_trace_distance(u: &SpectralField, v: &SpectralField) -> f64 {
    let (u, v) = (u.normalized().expect("nonzero"), v.normalized().expect("nonzero"));
    let a = u.inner(&v);
    let b = v.sub(&u.scaled(a)).l2_norm();
    // coordinates: u = (1, 0), v = (a, b)
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(1.0, 0.0) - a * a.conj(), -a * b, -a.conj() * b, C64::new(-b * b, 0.0)],
    );
    trace_norm(&m)
}

/// `2 sqrt(1 - |<u, v>|^2)` for unit vectors.
pub fn pure_state_closed_form(u: &SpectralField, v: &SpectralField) -> f64 {
    let overlap = u.inner(v).norm() / (u.l2_norm() * v.l2_norm());
    2.0 * (1.0 - overlap * overlap).max(0.0).sqrt()
}

/// Rows of the pipeline for one particle number.
pub fn theorem_l_point(
    cfg: &ExperimentConfig,
    setup: &Setup,
    n: usize,
    eps: f64,
) -> LabResult<(Vec<TheoremLRow>, PointDiagnostics)> {
    let eta = cfg.eta.ok_or_else(|| LabError::Config("theorem-l needs eta".into()))?;
    let mollified = mollify_initial_datum(&setup.datum, n, eta)?;
    let orbital = setup.modes.orbital(&mollified.field)?;
    let window_loss = mollified.field.sub(&orbital.to_field(&setup.modes)).l2_norm();
    if window_loss > 1e-12 {
        log::warn!("N = {n}: mode window cuts the mollified datum (lost L2 mass {window_loss:e})");
    }
    let phi_n0 = orbital.to_field(&setup.modes);
    let run = paired_run(cfg, setup, &phi_n0, n, eps)?;
    let rough = nls_evolve(&setup.datum, setup.coupling, cfg.t_final, &NlsConfig::new(run.nls.dt, 1))?;

    let rows = par::map_indices(run.many.times.len(), |i| -> LabResult<TheoremLRow> {
        let t = run.many.times[i];
        let phi_n = &run.nls.fields[i];
        let phi = rough.field_at(t);
        let leg1 = trace_norm_gap(&rdm1(&run.many.states[i]), &setup.modes.orbital(phi_n)?);
        let leg2 = pure_state_trace_distance(phi_n, phi);
        Ok(TheoremLRow {
            n,
            eps,
            t,
            cutoff: mollified.cutoff,
            tail_mass: mollified.tail_norm,
            leg1,
            leg2,
            leg2_closed_form: pure_state_closed_form(phi_n, phi),
            total: leg1 + leg2,
        })
    });
    Ok((rows.into_iter().collect::<LabResult<_>>()?, run.diagnostics(eps)))
}
