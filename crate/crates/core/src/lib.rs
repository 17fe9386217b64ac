//! Numerical laboratory for the mean-field limit of one-dimensional bosons
//! with a regularized contact interaction.
//!
//! The crate evolves `N`-boson states exactly in a truncated plane-wave Fock
//! space, evolves the cubic NLS that governs the limit, and measures how far
//! the two are apart: reduced density matrices, trace-norm distances, and the
//! counting functionals `alpha_N` / `beta_N` built from the projectors onto
//! "exactly `k` particles outside the condensate".

pub mod counting;
pub mod error;
pub mod fit;
pub mod fock;
pub mod grid;
pub mod linalg;
pub mod nls;
pub mod observables;
pub mod oracle;
pub mod par;
pub mod propagator;

pub use error::{Error, Result};
pub use grid::{SpectralField, TorusGrid};
pub use nls::Coupling;

pub use num_complex::Complex64 as C64;
