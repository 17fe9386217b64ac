//! Truncated plane-wave Fock space for `N` bosons: occupation basis,
//! second-quantized operators, and product states.

mod basis;
mod hamiltonian;
pub mod io;
mod kernel;
mod modes;
mod sparse;
mod state;

pub use basis::{fock_dimension, FockBasis, DEFAULT_DIMENSION_CAP};
pub use hamiltonian::{build_hamiltonian, number_operator, one_body_operator, total_momentum};
pub use kernel::{l4_to_fourth, pair_interaction_energy, PotentialShape, TwoBodyKernel};
pub use modes::{ModeBasis, Orbital};
pub use sparse::SparseHermitian;
pub use state::{product_state, FockVector};

pub(crate) use state::ladder;
