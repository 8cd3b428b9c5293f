//! Septic B-spline basis on a uniform knot grid.
//!
//! Three independent constructions are provided: the closed-form piecewise
//! polynomial ([`septic_eval`]), forward differences of truncated powers
//! ([`bspline_by_differences`]) and the Cox–de Boor recursion
//! ([`cox_de_boor`]). The first one is used for assembly; the other two exist
//! to check it.
//!
//! Index convention: `B_j` is centred on knot `x_j` with support
//! `[x_{j-4}, x_{j+4}]`. Exactly `n + 7` of them (`j = -3 ..= n + 3`) are
//! nonzero somewhere on `[a, b]`.

mod differences;
mod grid;
mod recursion;
mod septic;
mod stencil;

use thiserror::Error;

pub use differences::{bspline_by_differences, support_start, truncated_power};
pub use grid::{KnotGrid, EXTENSION, MIN_INTERVALS};
pub use recursion::{cox_de_boor, MAX_DEGREE};
pub use septic::{
    septic_at_knot, septic_eval, septic_eval_with_limit, KnotLimit, DEGREE, FACTORIAL_7,
};
pub use stencil::{
    check_printed_row, exact_knot_stencil, knot_stencil, knot_stencil_with_limit, printed_row,
    CellDiscrepancy, DiscrepancyKind, Stencil, TableCheck, PRINTED_TABLE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("interval endpoints must be finite (a = {a}, b = {b})")]
    NonFiniteEndpoint { a: f64, b: f64 },
    #[error("empty interval: need b > a (a = {a}, b = {b})")]
    EmptyInterval { a: f64, b: f64 },
    #[error("n = {n} sub-intervals is below the minimum n >= {min}")]
    TooFewIntervals { n: usize, min: usize },
    #[error("knot spacing {spacing} after index {index} deviates from h = {h}")]
    NonUniformSpacing { index: i64, spacing: f64, h: f64 },
    #[error("knot index {index} outside stored range {lo}..={hi}")]
    KnotOutOfRange { index: i64, lo: i64, hi: i64 },
    #[error("derivative order {order} outside 0..=7")]
    DerivativeOutOfRange { order: u32 },
    #[error("degree {degree} not supported")]
    DegreeOutOfRange { degree: u32 },
    #[error("non-finite argument")]
    NonFiniteArgument,
}

/// Range of basis labels `j` that are nonzero somewhere on `[a, b]`.
pub fn active_labels(grid: &KnotGrid) -> std::ops::RangeInclusive<i64> {
    -3..=grid.n() as i64 + 3
}
