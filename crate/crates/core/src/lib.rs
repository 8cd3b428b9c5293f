//! Septic B-spline collocation for linear seventh-order boundary value
//! problems
//!
//! ```text
//! y^(7)(x) = g(x) y(x) + q(x),   a <= x <= b
//! y(a), y'(a), y''(a), y'''(a), y(b), y'(b), y''(b) given
//! ```
//!
//! The solution is sought as `y(x) = sum_j alpha_j B_j(x)` over the `n + 7`
//! septic B-splines that touch `[a, b]`. The differential equation is
//! collocated at the knots and the seven boundary conditions are imposed
//! directly, giving a banded linear system.
//!
//! ```no_run
//! use septic_bvp::{problem, solver};
//!
//! let p = problem::example1();
//! let s = solver::solve(&p, 40, Default::default(), Default::default()).unwrap();
//! let y_half = solver::eval_solution(&s, 0.5, 0).unwrap();
//! # let _ = y_half;
//! ```

pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod cli;
pub mod linalg;
pub mod problem;
pub mod selftest;
pub mod solver;
