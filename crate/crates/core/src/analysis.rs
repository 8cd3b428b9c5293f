//! Error measurement, residual diagnostics and convergence studies.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::assembly::Scheme;
use crate::problem::{LinearBvp7, ProblemError};
use crate::solver::{eval_solution, solve, SolveError, SolverChoice, SplineSolution};

/// Errors below this are treated as exact and excluded from order fits.
pub const EXACT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sample {
    #[default]
    Knots,
    KnotsAndMidpoints,
}

impl Sample {
    pub fn name(self) -> &'static str {
        match self {
            Sample::Knots => "knots",
            Sample::KnotsAndMidpoints => "knots_and_midpoints",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Sample::Knots, Sample::KnotsAndMidpoints]
            .into_iter()
            .find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("exact solution required")]
    MissingExact,
    #[error("need at least one mesh")]
    NoMeshes,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("n = {n}: {source}")]
    AtMesh {
        n: usize,
        #[source]
        source: Box<AnalysisError>,
    },
}

/// Sample abscissae in increasing order.
pub fn sample_points(s: &SplineSolution, sample: Sample) -> Vec<f64> {
    let knots = s.grid.interior();
    match sample {
        Sample::Knots => knots.to_vec(),
        Sample::KnotsAndMidpoints => {
            let mut out = Vec::with_capacity(2 * knots.len() - 1);
            for w in knots.windows(2) {
                out.push(w[0]);
                out.push(0.5 * (w[0] + w[1]));
            }
            out.push(*knots.last().expect("grid has knots"));
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub points: Vec<f64>,
    pub spline_values: Vec<f64>,
    pub exact_values: Vec<f64>,
    pub abs_errors: Vec<f64>,
    pub max_abs_error: f64,
    pub location_of_max: f64,
}

pub fn error_report(
    s: &SplineSolution,
    p: &LinearBvp7,
    sample: Sample,
) -> Result<ErrorReport, AnalysisError> {
    let exact = p.exact().ok_or(AnalysisError::MissingExact)?;
    let points = sample_points(s, sample);
    let spline_values = points
        .iter()
        .map(|&x| eval_solution(s, x, 0))
        .collect::<Result<Vec<_>, _>>()?;
    let exact_values = points
        .iter()
        .map(|&x| exact.value(x))
        .collect::<Result<Vec<_>, _>>()?;
    let abs_errors: Vec<f64> = spline_values
        .iter()
        .zip(&exact_values)
        .map(|(u, v)| (u - v).abs())
        .collect();
    let mut k = 0;
    for (i, e) in abs_errors.iter().enumerate() {
        if *e > abs_errors[k] || e.is_nan() {
            k = i;
        }
    }
    Ok(ErrorReport {
        max_abs_error: abs_errors[k],
        location_of_max: points[k],
        points,
        spline_values,
        exact_values,
        abs_errors,
    })
}

/// Max of `|y^(7) - g y - q|` over `m` interval midpoints (cycling through
/// the intervals), normalized by `max(1, max |q|)` over the same probes.
pub fn ode_residual(s: &SplineSolution, p: &LinearBvp7, m: usize) -> Result<f64, AnalysisError> {
    let knots = s.grid.interior();
    let n = s.n();
    let mut worst: f64 = 0.0;
    let mut qmax: f64 = 0.0;
    for k in 0..m.max(1) {
        let c = k % n;
        let x = 0.5 * (knots[c] + knots[c + 1]);
        let q = p.q(x)?;
        let r = eval_solution(s, x, 7)? - p.g(x)? * eval_solution(s, x, 0)? - q;
        worst = worst.max(r.abs());
        qmax = qmax.max(q.abs());
    }
    Ok(worst / qmax.max(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub h: f64,
    pub max_abs_error: f64,
    pub solve_residual: f64,
    pub wall_time: Duration,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Sorted by increasing `n`.
    pub records: Vec<ConvergenceRecord>,
    /// Slope of `log e` against `log h`.
    pub fitted_order: Option<f64>,
    /// `log2(e_{k-1} / e_k)` when `n_k = 2 n_{k-1}`; aligned with `records`.
    pub pairwise_orders: Vec<Option<f64>>,
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Order estimates from a list of `(n, h, error)` sorted by `n`.
pub fn orders(records: &[ConvergenceRecord]) -> (Option<f64>, Vec<Option<f64>>) {
    let pairwise = records
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let prev = k.checked_sub(1).map(|i| &records[i])?;
            let usable = r.n == 2 * prev.n
                && r.max_abs_error > EXACT_FLOOR
                && prev.max_abs_error > EXACT_FLOOR;
            usable.then(|| (prev.max_abs_error / r.max_abs_error).log2())
        })
        .collect();
    let fitted = (records.len() >= 3 && records.iter().all(|r| r.max_abs_error > EXACT_FLOOR))
        .then(|| {
            let pts: Vec<(f64, f64)> = records
                .iter()
                .map(|r| (r.h.ln(), r.max_abs_error.ln()))
                .collect();
            fit_slope(&pts)
        });
    (fitted, pairwise)
}

/// Solves on every mesh in `ns` and measures the knot error.
pub fn convergence_study(
    p: &LinearBvp7,
    ns: &[usize],
    scheme: Scheme,
    solver: SolverChoice,
) -> Result<ConvergenceReport, AnalysisError> {
    if p.exact().is_none() {
        return Err(AnalysisError::MissingExact);
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(AnalysisError::NoMeshes);
    }
    let at = |n: usize| {
        move |e: AnalysisError| AnalysisError::AtMesh {
            n,
            source: Box::new(e),
        }
    };
    let mut records = Vec::with_capacity(ns.len());
    for n in ns {
        let start = Instant::now();
        let s = solve(p, n, scheme, solver).map_err(|e| at(n)(e.into()))?;
        let wall_time = start.elapsed();
        let report = error_report(&s, p, Sample::Knots).map_err(at(n))?;
        records.push(ConvergenceRecord {
            n,
            h: s.grid.h(),
            max_abs_error: report.max_abs_error,
            solve_residual: s.solve_residual,
            wall_time,
            warning: s.warning,
        });
    }
    let (fitted_order, pairwise_orders) = orders(&records);
    Ok(ConvergenceReport {
        records,
        fitted_order,
        pairwise_orders,
    })
}
