//! Heat invariants, expansion fits, the regularity classifier and the
//! product inequalities behind them.

mod classify;
mod coefficients;
mod fit;
mod inequalities;
mod remainder;

pub use classify::{classify_regularity, classify_regularity_with, w2_remainder, ClassifyOptions, OrderReport, RegularityReport, Verdict};
pub use coefficients::{a_coeff, a_coeff_exact, beta_moment, heat_coefficients, HeatCoefficients, SourceCoefficient, SIMPLEX_NODES};
pub use fit::{fit_expansion, fit_expansion_with, geometric_grid, ExpansionFit, FitOptions, HeatTracePoint};
pub use inequalities::{gnm_check, holder_pbound, GnmReport, HolderReport};
pub use remainder::expexp_remainder;
