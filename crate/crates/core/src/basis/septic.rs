//! Closed-form piecewise evaluation of the septic B-spline and its derivatives.
//!
//! `B_j` is supported on `[x_{j-4}, x_{j+4}]` and normalised so that
//! `B_j(x_j) = 2416` independent of `h` (it equals `7!` times the
//! partition-of-unity spline). With local coordinate `t = (x - x_{j-4}) / h`
//! the left four pieces are
//!
//! ```text
//! sum_{k=0}^{p} (-1)^k C(8,k) (t - k)^7,        t in [p, p+1],  p = 0..3
//! ```
//!
//! and the right four are the mirror images in `8 - t`.

use super::differences::binomial;
use super::{BasisError, KnotGrid};

pub const DEGREE: u32 = 7;

/// `7!`, the ratio between the two normalisations.
pub const FACTORIAL_7: f64 = 5040.0;

/// Which one-sided limit to take where a derivative is discontinuous.
///
/// Only the seventh derivative (piecewise constant) is affected; lower orders
/// are continuous across knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KnotLimit {
    Left,
    Right,
}

/// `7! / (7 - d)!`
fn falling(d: u32) -> f64 {
    ((8 - d)..=7).map(f64::from).product()
}

/// Dimensionless `d`-th derivative (`h = 1`) on piece `piece` (0..=7) at local
/// coordinate `t`.
fn piece_value(piece: u32, t: f64, d: u32) -> f64 {
    let e = (DEGREE - d) as i32;
    let scale = falling(d);
    if piece <= 3 {
        (0..=piece)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(8, k) as f64 * (t - k as f64).powi(e)
            })
            .sum::<f64>()
            * scale
    } else {
        let mirror = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        (0..=(7 - piece))
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(8, k) as f64 * (8.0 - k as f64 - t).powi(e)
            })
            .sum::<f64>()
            * scale
            * mirror
    }
}

/// Value at local coordinate `t` with an explicit one-sided convention for
/// knots; `h = 1`.
fn local_value(t: f64, d: u32, limit: KnotLimit) -> f64 {
    if !(0.0..=8.0).contains(&t) {
        return 0.0;
    }
    let on_knot = t.fract() == 0.0;
    let piece = if on_knot && limit == KnotLimit::Left {
        t as i64 - 1
    } else {
        t.floor() as i64
    };
    if !(0..=7).contains(&piece) {
        return 0.0;
    }
    piece_value(piece as u32, t, d)
}

fn check_order(d: u32) -> Result<(), BasisError> {
    if d > DEGREE {
        Err(BasisError::DerivativeOutOfRange { order: d })
    } else {
        Ok(())
    }
}

/// `d`-th derivative of `B_j` at `x` using the given one-sided convention at
/// knots.
pub fn septic_eval_with_limit(
    center_j: i64,
    x: f64,
    grid: &KnotGrid,
    d: u32,
    limit: KnotLimit,
) -> Result<f64, BasisError> {
    check_order(d)?;
    if !x.is_finite() {
        return Err(BasisError::NonFiniteArgument);
    }
    let t = grid.position(x) - (center_j - 4) as f64;
    Ok(local_value(t, d, limit) / grid.h().powi(d as i32))
}

/// `d`-th derivative of `B_j` at `x`.
///
/// At knots the seventh derivative is the right limit, except at `x = b`
/// where the left limit is used so that nothing beyond `[a, b]` is read.
pub fn septic_eval(center_j: i64, x: f64, grid: &KnotGrid, d: u32) -> Result<f64, BasisError> {
    let limit = if grid.position(x) == grid.n() as f64 {
        KnotLimit::Left
    } else {
        KnotLimit::Right
    };
    septic_eval_with_limit(center_j, x, grid, d, limit)
}

/// `d`-th derivative of `B_j` at the grid knot `x_i`, computed from the
/// integer offset `i - j` rather than from the floating-point abscissa.
///
/// Uses the same convention as [`septic_eval`].
pub fn septic_at_knot(center_j: i64, i: i64, grid: &KnotGrid, d: u32) -> Result<f64, BasisError> {
    check_order(d)?;
    let limit = if i == grid.n() as i64 {
        KnotLimit::Left
    } else {
        KnotLimit::Right
    };
    let t = (i - center_j + 4) as f64;
    Ok(local_value(t, d, limit) / grid.h().powi(d as i32))
}
