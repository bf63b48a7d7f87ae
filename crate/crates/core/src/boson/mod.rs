//! Uniform-coupling bosonic pairing model on `L+1` levels.

mod basis;
mod model;
mod pairons;
mod state;

pub use basis::{fock_basis, FockBasis};
pub use model::{build_bcs_hamiltonian, diagonalize_bcs, BosonEigenpair, BosonModel, BosonSpectrum};
pub use pairons::{
    best_slice, boson_energy, extract_boson_pairons, reconstruct_boson_state, verify_ellipsoid,
    BosonPaironSet, EllipsoidReport, ELLIPSOID_TOLERANCE,
};
pub use state::{boson_husimi_amplitude, cancellation_ratio, BosonState};
