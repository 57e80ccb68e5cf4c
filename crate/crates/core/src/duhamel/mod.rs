//! Terms `tr W_k(t)` of the Duhamel expansion of the heat trace.
//!
//! All per-term routines return the unsigned quantities; [`trace_total`]
//! applies the alternating sign `(-1)^k` of the Duhamel iteration.

mod exact;
mod montecarlo;
mod series;

pub use exact::{free_factor, symmetric_v_integral, symmetric_v_rule, trace_w1, trace_w2, trace_w2_from, PowerSpectrum, W2Value};
pub use montecarlo::{multilinear_form, multilinear_form_at, trace_wk_mc, BtEstimate, McValue, WkEstimate};
pub use series::{
    bound_term_k, calibrate_c_geo, tail_bound, trace_total, SeriesOptions, SeriesTerm, SignConvention, TraceSeries,
    C_GEO,
};
