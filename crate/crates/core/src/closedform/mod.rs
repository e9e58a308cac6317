//! Closed-form backend: Hermite-polynomial sums evaluated in log space.
//!
//! Values for photon-added and photon-subtracted states refer to the
//! unnormalised vectors `a†ⁿ S(±r)|0⟩` and `aⁿ S(±r)|0⟩`; the squared norms in
//! [`norms`] turn them into physical quantities.

pub mod compass;
pub mod frames;
pub mod hermite;
pub mod norms;
pub mod overlap;
pub mod wigner;

pub use compass::{
    compass_chessboard, compass_fringes, compass_lobes, compass_norm_sq, overlap_compass, overlap_compass_approx,
    wigner_coherent, wigner_compass,
};
pub use frames::{DisplacementFrame, PhasePointMap, SqueezeFrame};
pub use hermite::{hermite, hermite_pair_sum, hermite_sequence, LogComplex};
pub use norms::{branch_inner_product, branch_norm_sq, superposition_norm_sq};
pub use overlap::{
    overlap_coherent, overlap_mixture, overlap_superposition, overlap_term_pasvs, overlap_term_pssvs, OverlapKernel,
};
pub use wigner::{
    spasvs_cross, spssvs_cross, ssv_cross, superposition_cross, wigner_mixture, wigner_pasvs, wigner_pssvs,
    wigner_ssv, wigner_superposition, wigner_svs,
};
