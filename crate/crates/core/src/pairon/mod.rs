//! The map between Husimi zeros and pairing energies, and the product-form
//! reconstruction of eigenstates from pairing energies.

mod extract;
mod map;
mod reconstruct;

pub use extract::{
    analyze_state, control_t, extract_pairons, extract_with, Diagnostics, ExtractOptions, Extraction,
};
pub use map::{
    correspondence_defect, pair_zeros, pairon_to_zeta_sq, pairons_to_zeros, zeros_to_pairons,
    zeta_sq_to_pairon, PairedZeros, PaironSet, PAIRING_TOLERANCE,
};
pub use reconstruct::{eigen_residual, reconstruct_state};
