//! B-splines as forward differences of truncated powers.
//!
//! This is the slow, transparent construction: every value is an explicit
//! alternating binomial sum of `(x_k - t)_+^m` over the `m + 2` knots of the
//! support. The other constructions are checked against it.

use super::{BasisError, KnotGrid};

/// `(x - t)_+^m`: `(x - t)^m` for `x >= t`, zero otherwise. For `m = 0` this
/// is the unit step `[x >= t]`.
pub fn truncated_power(x: f64, t: f64, m: u32) -> Result<f64, BasisError> {
    if !x.is_finite() || !t.is_finite() {
        return Err(BasisError::NonFiniteArgument);
    }
    if x < t {
        return Ok(0.0);
    }
    Ok(if m == 0 { 1.0 } else { (x - t).powi(m as i32) })
}

pub(crate) fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    (0..k).fold(1u64, |acc, i| acc * (n as u64 - i) / (i + 1))
}

/// First knot index of the support of the degree-`m` B-spline labelled `i`.
///
/// Labels are chosen so that odd degrees are centred on `x_i`; for the septic
/// case the support is `[x_{i-4}, x_{i+4}]`.
pub fn support_start(i: i64, m: u32) -> i64 {
    i - ((m as i64 + 1) / 2)
}

/// Degree-`m` B-spline labelled `i`, evaluated at `t` as
/// `h^{-m} Δ^{m+1} (x_s - t)_+^m` where `x_s` is the first support knot.
///
/// The normalisation makes the septic spline equal `7!` times the
/// partition-of-unity basis. Left of the support centre the mirrored powers
/// `(-1)^(m+1) (t - x_k)_+^m` are summed instead; both give the same spline, but
/// each form cancels catastrophically on the far side of the support.
pub fn bspline_by_differences(i: i64, m: u32, t: f64, grid: &KnotGrid) -> Result<f64, BasisError> {
    if m == 0 {
        return Err(BasisError::DegreeOutOfRange { degree: m });
    }
    let start = support_start(i, m);
    let centre = grid.knot(start)? + 0.5 * (m + 1) as f64 * grid.h();
    let mirrored = t < centre;
    let mut sum = 0.0;
    for k in 0..=m + 1 {
        let xk = grid.knot(start + k as i64)?;
        let sign = if (m + 1 - k).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let p = if mirrored {
            let p = truncated_power(t, xk, m)?;
            if m.is_multiple_of(2) {
                -p
            } else {
                p
            }
        } else {
            truncated_power(xk, t, m)?
        };
        sum += sign * binomial(m + 1, k) as f64 * p;
    }
    Ok(sum / grid.h().powi(m as i32))
}
