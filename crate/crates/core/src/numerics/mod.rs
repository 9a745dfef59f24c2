//! Convergence machinery: factorial-like exponents, limits of matrix powers,
//! realizations of ω-expressions as word schedules and rate diagnostics.

pub mod convergence;
pub mod factorial;
pub mod limit;
pub mod schedule;

pub use convergence::{
    estimate_limit, fast_sequence_report, fit_rate, format_sig, ConvergenceReport, Mode, Quantity,
    RateFit, Sample,
};
pub use factorial::{f_p, f_p_u64, f_sp, f_sp_u64};
pub use limit::{
    limit_matrix, numeric_interpretation, numeric_projection, LimitOptions, PROJECTION_EPSILON,
};
pub use schedule::{concat_schedules, realize_polynomial, realize_superpolynomial, WordSchedule};
