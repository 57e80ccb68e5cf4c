//! Free heat flow, the simplex Gaussian chain and small closed-form Gaussian integrals.

mod chain;
mod heat;
mod special;

pub use chain::{
    inverse_form, inverse_form_entry, raw_exponent, sample_chain, telescope_quadform, GaussianChain, SimplexPoint,
    Telescoped, MIN_GAP,
};
pub use heat::heat_propagate;
pub use special::{gamma_half, gamma_moment, half_bound_expansion, HalfBound};
