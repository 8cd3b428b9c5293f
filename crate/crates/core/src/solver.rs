//! End-to-end solve and evaluation of the spline solution.

use std::fmt;

use thiserror::Error;

use crate::assembly::{assemble, AssemblyError, RowKind, Scheme};
use crate::basis::{septic_eval, BasisError, KnotGrid, MIN_INTERVALS};
use crate::linalg::{band_lu_solve, bordered_lstsq, dense_solve_oracle, normal_solve, LinalgError};
use crate::problem::LinearBvp7;

/// Solves flagged when the residual exceeds this fraction of `||rhs||`.
pub const WARNING_RATIO: f64 = 1e-4;

/// Linear solver applied to the assembled system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    /// Band LU; least-squares systems go through a bordered LU update.
    #[default]
    BandLu,
    /// Banded normal equations (Cholesky, then `L D L^T`).
    Normal,
    /// Dense reference elimination.
    Dense,
}

impl SolverChoice {
    pub const ALL: [SolverChoice; 3] = [
        SolverChoice::BandLu,
        SolverChoice::Normal,
        SolverChoice::Dense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::BandLu => "band-lu",
            SolverChoice::Normal => "normal",
            SolverChoice::Dense => "dense",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("n = {n} is too small: need n >= {MIN_INTERVALS}")]
    MeshTooSmall { n: usize },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("x = {x} lies outside [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },
    #[error("derivative order {d} exceeds 7")]
    OrderOutOfRange { d: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineSolution {
    pub grid: KnotGrid,
    /// `alpha_j` for `j = -3 ..= n + 3`.
    pub alpha: Vec<f64>,
    pub scheme: Scheme,
    pub solver: SolverChoice,
    /// `||A alpha - rhs||_2` on the equilibrated system.
    pub solve_residual: f64,
    pub rhs_norm: f64,
    /// Set when `solve_residual > WARNING_RATIO * rhs_norm`.
    pub warning: Option<String>,
}

impl SplineSolution {
    pub fn n(&self) -> usize {
        self.grid.n()
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Collocation solve of `p` on `n` uniform intervals.
pub fn solve(
    p: &LinearBvp7,
    n: usize,
    scheme: Scheme,
    solver: SolverChoice,
) -> Result<SplineSolution, SolveError> {
    if n < MIN_INTERVALS {
        return Err(SolveError::MeshTooSmall { n });
    }
    let grid = KnotGrid::uniform(p.a(), p.b(), n)?;
    let sys = assemble(p, &grid, scheme)?;
    let a = &sys.matrix;
    let alpha = match (solver, scheme.is_square()) {
        (SolverChoice::BandLu, true) => band_lu_solve(a, &sys.rhs)?,
        (SolverChoice::BandLu, false) => {
            let extra = sys
                .row_of(RowKind::Collocation { i: n })
                .expect("least squares keeps every collocation row");
            bordered_lstsq(a, &sys.rhs, extra)?.x
        }
        (SolverChoice::Normal, _) => normal_solve(a, &sys.rhs)?.x,
        (SolverChoice::Dense, _) => dense_solve_oracle(&sys.to_dense(), &sys.rhs)?,
    };
    let ax = a.matvec(&alpha)?;
    let diff: Vec<f64> = ax.iter().zip(&sys.rhs).map(|(u, v)| u - v).collect();
    let solve_residual = norm2(&diff);
    let rhs_norm = norm2(&sys.rhs);
    let warning = (solve_residual.is_nan() || solve_residual > WARNING_RATIO * rhs_norm).then(|| {
        format!("solve residual {solve_residual:e} exceeds {WARNING_RATIO:e} x ||rhs|| (||rhs|| = {rhs_norm:e})")
    });
    Ok(SplineSolution {
        grid,
        alpha,
        scheme,
        solver,
        solve_residual,
        rhs_norm,
        warning,
    })
}

/// `d`-th derivative of the spline solution at `x`.
pub fn eval_solution(s: &SplineSolution, x: f64, d: u32) -> Result<f64, SolveError> {
    if d > 7 {
        return Err(SolveError::OrderOutOfRange { d });
    }
    let g = &s.grid;
    let x = g.clamp_to_domain(x).ok_or(SolveError::OutOfDomain {
        x,
        a: g.a(),
        b: g.b(),
    })?;
    let cell = g.position(x).floor() as i64;
    let lo = (cell - 4).max(-3);
    let hi = (cell + 4).min(g.n() as i64 + 3);
    let mut sum = 0.0;
    for j in lo..=hi {
        sum += s.alpha[(j + 3) as usize] * septic_eval(j, x, g, d)?;
    }
    Ok(sum)
}
