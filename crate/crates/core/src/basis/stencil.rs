//! Knot-value stencils: `h^d B_j^{(d)}(x_{j+k})` for `k = -4..=4`.

use std::sync::OnceLock;

use super::differences::binomial;
use super::septic::{septic_eval_with_limit, KnotLimit};
use super::KnotGrid;

/// Dimensionless values of one derivative order at the nine support knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub deriv_order: u32,
    pub values: [f64; 9],
    /// One-sided convention used at knots; `None` below order 7, where the
    /// derivative is continuous.
    pub limit: Option<KnotLimit>,
}

impl Stencil {
    /// The values as integers, if every entry is one.
    pub fn as_integers(&self) -> Option<[i64; 9]> {
        let mut out = [0i64; 9];
        for (o, &v) in out.iter_mut().zip(&self.values) {
            if v.fract() != 0.0 || v.abs() > 2f64.powi(53) {
                return None;
            }
            *o = v as i64;
        }
        Some(out)
    }
}

/// Knot values as commonly printed for orders 3 to 7. The order-7 row is
/// reproduced as printed, including its right half.
pub const PRINTED_TABLE: [(u32, [i64; 9]); 5] = [
    (3, [0, 210, 1680, -3990, 0, 3990, -1680, -210, 0]),
    (4, [0, 840, 0, -7560, 13440, -7560, 0, 840, 0]),
    (5, [0, 2520, -10080, 12600, 0, -12600, 10080, -2520, 0]),
    (6, [0, 5040, -30240, 75600, -100800, 75600, -30240, 5040, 0]),
    (
        7,
        [0, 5040, -35280, 105840, -176400, -176400, 105840, -35280, 0],
    ),
];

pub fn printed_row(d: u32) -> Option<[i64; 9]> {
    PRINTED_TABLE.iter().find(|(o, _)| *o == d).map(|(_, r)| *r)
}

fn unit_grid() -> &'static KnotGrid {
    static GRID: OnceLock<KnotGrid> = OnceLock::new();
    // centre j = 8 keeps all nine support knots strictly inside [a, b]
    GRID.get_or_init(|| KnotGrid::uniform(0.0, 16.0, 16).expect("valid unit grid"))
}

/// Stencil for derivative order `d` under an explicit knot convention,
/// evaluated live through the closed-form basis.
pub fn knot_stencil_with_limit(d: u32, limit: KnotLimit) -> Stencil {
    let d = d.min(7);
    let grid = unit_grid();
    let mut values = [0.0; 9];
    for (k, v) in values.iter_mut().enumerate() {
        let x = (4 + k) as f64;
        *v = septic_eval_with_limit(8, x, grid, d, limit).expect("order checked");
    }
    Stencil {
        deriv_order: d,
        values,
        limit: (d == 7).then_some(limit),
    }
}

/// Stencil for derivative order `d` (`0..=7`, larger values are clamped)
/// with the seventh derivative taken as a right limit.
pub fn knot_stencil(d: u32) -> Stencil {
    knot_stencil_with_limit(d, KnotLimit::Right)
}

/// Same stencil computed in exact integer arithmetic from the truncated-power
/// expansion `sum_k (-1)^k C(8,k) D^d (t - k)_+^7` at integer `t`.
pub fn exact_knot_stencil(d: u32, limit: KnotLimit) -> [i64; 9] {
    let d = d.min(7);
    let falling: i64 = ((8 - d as i64)..=7).product();
    let mut out = [0i64; 9];
    for (t, o) in out.iter_mut().enumerate() {
        let t = t as i64;
        *o = (0..=8i64)
            .filter(|&k| {
                if d == 7 && limit == KnotLimit::Left {
                    t > k
                } else {
                    t >= k
                }
            })
            .map(|k| {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                sign * binomial(8, k as u32) as i64 * falling * (t - k).pow(7 - d)
            })
            .sum();
        // for the right limit at t = 8 all nine terms are active and cancel
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscrepancyKind {
    /// Same magnitude, opposite sign.
    Sign,
    /// Anything else.
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellDiscrepancy {
    /// Position in the stencil, `0..9`.
    pub cell: usize,
    pub printed: i64,
    pub computed: i64,
    pub kind: DiscrepancyKind,
}

impl CellDiscrepancy {
    /// Knot offset from the centre, `-4..=4`.
    pub fn offset(&self) -> i64 {
        self.cell as i64 - 4
    }
}

/// Result of checking one printed row against the computed stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCheck {
    pub deriv_order: u32,
    /// Convention the comparison was made under (order 7 only).
    pub limit: Option<KnotLimit>,
    pub computed: [i64; 9],
    pub printed: [i64; 9],
    pub discrepancies: Vec<CellDiscrepancy>,
}

fn diff_cells(printed: &[i64; 9], computed: &[i64; 9]) -> Vec<CellDiscrepancy> {
    printed
        .iter()
        .zip(computed)
        .enumerate()
        .filter(|(_, (p, c))| p != c)
        .map(|(cell, (&printed, &computed))| CellDiscrepancy {
            cell,
            printed,
            computed,
            kind: if printed == -computed {
                DiscrepancyKind::Sign
            } else {
                DiscrepancyKind::Value
            },
        })
        .collect()
}

/// Compares the printed row of order `d` with the computed stencil.
///
/// For order 7 the printed row does not state its knot convention, so the
/// comparison uses whichever one-sided limit agrees with it on more cells.
/// Returns `None` for orders without a printed row.
pub fn check_printed_row(d: u32) -> Option<TableCheck> {
    let printed = printed_row(d)?;
    let candidates: Vec<Option<KnotLimit>> = if d == 7 {
        vec![Some(KnotLimit::Left), Some(KnotLimit::Right)]
    } else {
        vec![None]
    };
    candidates
        .into_iter()
        .map(|limit| {
            let stencil = knot_stencil_with_limit(d, limit.unwrap_or(KnotLimit::Right));
            let computed = stencil
                .as_integers()
                .expect("unit-grid stencils are integral");
            TableCheck {
                deriv_order: d,
                limit,
                computed,
                printed,
                discrepancies: diff_cells(&printed, &computed),
            }
        })
        .min_by_key(|c| c.discrepancies.len())
}
