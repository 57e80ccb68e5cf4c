//! Grid potentials, their discrete Fourier transforms, Sobolev norms and mollification.

mod grid;
pub mod io;
mod mollify;
mod potential;
mod sobolev;
mod spectral;

pub use grid::GridSpec;
pub use mollify::mollify;
pub use potential::{make_potential, Component, Potential, ProfileFn, Shape};
pub use sobolev::{hm_norm, sobolev_norm, weighted_norm, SpectralNorm, ALIASING_LIMIT};
pub use spectral::{derivative, fft_nd, fourier, spectral_integral, SpectralRep};
