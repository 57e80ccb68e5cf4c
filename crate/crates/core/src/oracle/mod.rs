//! Direct spectral ground truth for the heat trace on the periodic box.

mod operator;
mod trace;

pub use operator::{free_spectrum, DiscreteOperator, MAX_DENSE};
pub use trace::{bound_states, bound_states_from, heat_trace_direct, trace_difference, BoundStateSet, OracleSpectrum, OracleValue};
