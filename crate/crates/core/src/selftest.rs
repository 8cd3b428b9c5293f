//! Built-in oracle suite behind the `selftest` command.

use std::time::{Duration, Instant};

use crate::analysis::{error_report, Sample};
use crate::assembly::{assemble, RowKind, Scheme};
use crate::basis::{
    bspline_by_differences, cox_de_boor, exact_knot_stencil, knot_stencil, printed_row,
    septic_eval, KnotGrid, KnotLimit, FACTORIAL_7,
};
use crate::linalg::{band_lu_solve, bordered_lstsq, dense_solve_oracle};
use crate::problem::{example1, monomial};
use crate::solver::{solve, SolverChoice};

/// Soft wall-clock budget for the whole suite.
pub const BUDGET: Duration = Duration::from_secs(30);

pub const GROUPS: [&str; 5] = [
    "stencil",
    "basis-equivalence",
    "partition-of-unity",
    "band-vs-dense",
    "polynomial-exactness",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Fault injection: perturb one computed stencil entry.
    pub corrupt_stencil: bool,
}

#[derive(Debug, Clone)]
pub struct GroupResult {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub groups: Vec<GroupResult>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(|g| g.outcome.is_ok())
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.groups
            .iter()
            .filter(|g| g.outcome.is_err())
            .map(|g| g.name)
            .collect()
    }
}

fn stencils(opts: Options) -> Result<(), String> {
    for d in 0..=7 {
        let mut computed = knot_stencil(d).values;
        if opts.corrupt_stencil && d == 3 {
            computed[1] += 1.0;
        }
        let exact = exact_knot_stencil(d, KnotLimit::Right);
        for (k, (c, e)) in computed.iter().zip(exact).enumerate() {
            if *c != e as f64 {
                return Err(format!(
                    "d={d} offset {}: computed {c}, exact {e}",
                    k as i64 - 4
                ));
            }
        }
        if (3..=6).contains(&d) {
            let printed = printed_row(d).expect("rows 3..6 are printed");
            if printed != exact {
                return Err(format!("d={d}: printed row disagrees with exact stencil"));
            }
        }
    }
    Ok(())
}

/// Deterministic low-discrepancy samples in `[0, 1)`.
fn samples(count: usize) -> impl Iterator<Item = f64> {
    const PHI: f64 = 0.618_033_988_749_894_9;
    (1..=count).map(|k| (k as f64 * PHI).fract())
}

fn basis_equivalence() -> Result<(), String> {
    let grid = KnotGrid::uniform(-1.0, 2.0, 12).map_err(|e| e.to_string())?;
    for (k, u) in samples(2000).enumerate() {
        let x = -1.0 + 3.0 * u;
        let j = -3 + (k % 19) as i64;
        let closed = septic_eval(j, x, &grid, 0).map_err(|e| e.to_string())?;
        let diff = bspline_by_differences(j, 7, x, &grid).map_err(|e| e.to_string())?;
        let cdb = FACTORIAL_7 * cox_de_boor(j - 4, 7, x, &grid).map_err(|e| e.to_string())?;
        // relative to the basis scale: the difference form cancels away from its support
        let scale = closed.abs().max(FACTORIAL_7);
        if (closed - diff).abs() > 1e-9 * scale || (closed - cdb).abs() > 1e-9 * scale {
            return Err(format!("j={j} x={x}: {closed} / {diff} / {cdb}"));
        }
    }
    Ok(())
}

fn partition_of_unity() -> Result<(), String> {
    let grid = KnotGrid::uniform(0.0, 1.0, 10).map_err(|e| e.to_string())?;
    for u in samples(1000) {
        let sum: f64 = (-3..=13)
            .map(|j| cox_de_boor(j - 4, 7, u, &grid))
            .sum::<Result<f64, _>>()
            .map_err(|e| e.to_string())?;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(format!("x={u}: sum {sum}"));
        }
    }
    Ok(())
}

fn band_vs_dense() -> Result<(), String> {
    let p = example1();
    for n in [8, 12, 20] {
        let grid = KnotGrid::uniform(p.a(), p.b(), n).map_err(|e| e.to_string())?;
        let sq = assemble(&p, &grid, Scheme::SquareDropLast).map_err(|e| e.to_string())?;
        let x = band_lu_solve(&sq.matrix, &sq.rhs).map_err(|e| e.to_string())?;
        let y = dense_solve_oracle(&sq.to_dense(), &sq.rhs).map_err(|e| e.to_string())?;
        let norm = y.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if x.iter().zip(&y).any(|(u, v)| (u - v).abs() > 1e-10 * norm) {
            return Err(format!("square system n={n}: band LU and dense disagree"));
        }
        let ls = assemble(&p, &grid, Scheme::LeastSquares).map_err(|e| e.to_string())?;
        let extra = ls.row_of(RowKind::Collocation { i: n }).expect("row kept");
        let b = bordered_lstsq(&ls.matrix, &ls.rhs, extra).map_err(|e| e.to_string())?;
        let d = dense_solve_oracle(&ls.to_dense(), &ls.rhs).map_err(|e| e.to_string())?;
        let norm = d.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if b.x.iter().zip(&d).any(|(u, v)| (u - v).abs() > 1e-6 * norm) {
            return Err(format!(
                "least squares n={n}: bordered LU and dense disagree"
            ));
        }
    }
    Ok(())
}

fn polynomial_exactness() -> Result<(), String> {
    for k in 0..=7 {
        let p = monomial(k).map_err(|e| e.to_string())?;
        let s =
            solve(&p, 16, Scheme::default(), SolverChoice::default()).map_err(|e| e.to_string())?;
        let r = error_report(&s, &p, Sample::KnotsAndMidpoints).map_err(|e| e.to_string())?;
        if r.max_abs_error > 1e-6 {
            return Err(format!("x^{k}: max error {:e}", r.max_abs_error));
        }
    }
    Ok(())
}

pub fn run(opts: Options) -> Report {
    let start = Instant::now();
    let outcomes = [
        stencils(opts),
        basis_equivalence(),
        partition_of_unity(),
        band_vs_dense(),
        polynomial_exactness(),
    ];
    let groups = GROUPS
        .into_iter()
        .zip(outcomes)
        .map(|(name, outcome)| GroupResult { name, outcome })
        .collect();
    Report {
        groups,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let r = run(Options::default());
        assert!(r.passed(), "{:?}", r.groups);
    }

    #[test]
    fn corruption_is_caught() {
        let r = run(Options {
            corrupt_stencil: true,
        });
        assert_eq!(r.failed(), vec!["stencil"]);
    }
}
