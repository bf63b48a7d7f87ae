//! Dicke-basis representation of the LMG model: parameters, states,
//! Hamiltonian matrix, parity sectors and diagonalization.

mod eigen;
mod hamiltonian;
mod params;
mod polish;
mod state;

pub use eigen::{diagonalize, Eigenpair, Spectrum, DEGENERACY_THRESHOLD};
pub use hamiltonian::{build_hamiltonian, split_parity, HamiltonianMatrix, ParityBlocks, ParitySector};
pub use params::{spin_from_f64, ModelParams};
pub use state::{Parity, StateVector};
