//! Heat-trace asymptotics of compactly supported Schrödinger potentials.

pub mod duhamel;
pub mod error;
pub mod fields;
pub mod kernels;
pub mod oracle;
pub mod quad;
pub mod regularity;
pub mod rng;
pub mod scalar;
pub mod scattering;

pub use error::{Error, Result};
pub use fields::{fourier, make_potential, mollify, sobolev_norm, GridSpec, Potential, Shape, SpectralRep};
pub use rng::Stream;
pub use scalar::Real;

pub type Potential64 = Potential<f64>;
pub type Potential32 = Potential<f32>;
pub type SpectralRep64 = SpectralRep<f64>;
