//! Phase-space zeros and pairing energies of exactly solvable pairing models.
//!
//! The crate covers two models:
//!
//! * the Lipkin-Meshkov-Glick (LMG) Hamiltonian in the quasispin (Dicke)
//!   basis, whose eigenstates are products of boson pair creators labelled by
//!   complex pairing energies ("pairons");
//! * the uniform-coupling bosonic BCS model with `L + 1` levels.
//!
//! For both, the zeros of the Husimi amplitude of an eigenstate are in exact
//! correspondence with its pairons. The modules follow the pipeline
//! `spin` (matrices, spectra) → `phase` (coherent states, Majorana
//! polynomial, roots) → `pairon` (zero ↔ pairon map, reconstruction) →
//! `collapse` (trajectory scans and coincidence structure), with `boson`
//! holding the multi-level generalisation.

pub mod boson;
pub mod collapse;
mod dd;
mod error;
pub mod math;
pub mod pairon;
pub mod phase;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use pairon::{
    eigen_residual, extract_pairons, pairons_to_zeros, reconstruct_state, zeros_to_pairons, PaironSet,
};
pub use phase::{
    cluster_zeros, coherent_overlap, husimi, husimi_quadrature, majorana_poly, poly_roots, MajoranaPoly,
    SpherePoint, ZeroSet,
};
pub use spin::{
    build_hamiltonian, diagonalize, split_parity, HamiltonianMatrix, ModelParams, Parity, Spectrum,
    StateVector,
};
