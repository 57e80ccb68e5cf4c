//! One-dimensional scattering: transfer matrices, the scattering matrix and
//! its phase, resonances, and the trace identities tying them to the heat trace.

mod identities;
mod phase;
mod resonance;
mod smatrix;
mod transfer;

pub use identities::{
    birman_krein_check, birman_krein_check_with, breit_wigner_levinson, resonance_sum, weighted_phase_integral, BirmanKreinOptions,
    BirmanKreinReport, BreitWignerReport,
};
pub use phase::{phase_derivative, scattering_phase, PhaseData};
pub use resonance::{bound_state_energies, find_resonances, Region, Resonance, ResonanceClass};
pub use smatrix::{smatrix, SMatrix1D};
pub use transfer::{transfer_matrix, TransferMatrix};

pub use num_complex::Complex64 as C64;
