use super::{BasisError, KnotGrid};

/// Largest degree the recursion accepts.
pub const MAX_DEGREE: u32 = 7;

/// Normalised B-spline `N_{i,p}(u)` by the Cox–de Boor recursion.
///
/// Standard indexing: `N_{i,p}` is supported on `[x_i, x_{i+p+1})`, so the
/// septic spline centred on `x_j` is `N_{j-4,7}`. Terms of the form `0/0`
/// are taken as zero.
pub fn cox_de_boor(i: i64, p: u32, u: f64, grid: &KnotGrid) -> Result<f64, BasisError> {
    if p > MAX_DEGREE {
        return Err(BasisError::DegreeOutOfRange { degree: p });
    }
    if !u.is_finite() {
        return Err(BasisError::NonFiniteArgument);
    }
    // validate the whole index window up front so recursion cannot fail halfway
    grid.knot(i)?;
    grid.knot(i + p as i64 + 1)?;
    Ok(recurse(i, p, u, grid))
}

fn recurse(i: i64, p: u32, u: f64, grid: &KnotGrid) -> f64 {
    let x = |k: i64| grid.knot(k).expect("index window checked by caller");
    if p == 0 {
        return if x(i) <= u && u < x(i + 1) { 1.0 } else { 0.0 };
    }
    let left_den = x(i + p as i64) - x(i);
    let right_den = x(i + p as i64 + 1) - x(i + 1);
    let left = if left_den == 0.0 {
        0.0
    } else {
        (u - x(i)) / left_den * recurse(i, p - 1, u, grid)
    };
    let right = if right_den == 0.0 {
        0.0
    } else {
        (x(i + p as i64 + 1) - u) / right_den * recurse(i + 1, p - 1, u, grid)
    };
    left + right
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_half_open() {
        let g = KnotGrid::uniform(0.0, 1.0, 10).unwrap();
        let u3 = g.knot(3).unwrap();
        let u4 = g.knot(4).unwrap();
        assert_eq!(cox_de_boor(3, 0, u3, &g).unwrap(), 1.0);
        assert_eq!(cox_de_boor(3, 0, u4, &g).unwrap(), 0.0);
        assert_eq!(cox_de_boor(3, 0, 0.5 * (u3 + u4), &g).unwrap(), 1.0);
    }

    #[test]
    fn septic_centre_value() {
        let g = KnotGrid::uniform(0.0, 16.0, 16).unwrap();
        let v = cox_de_boor(4, 7, 8.0, &g).unwrap();
        assert!((v - 2416.0 / 5040.0).abs() < 1e-14, "{v}");
        assert!((v - 0.479365).abs() < 1e-6);
    }

    #[test]
    fn sums_to_one() {
        let g = KnotGrid::uniform(-2.0, 3.0, 11).unwrap();
        for k in 0..50 {
            let u = -2.0 + 5.0 * (k as f64 + 0.37) / 50.0;
            let s: f64 = (-7..=g.n() as i64 - 1)
                .map(|i| cox_de_boor(i, 7, u, &g).unwrap())
                .sum();
            assert!((s - 1.0).abs() < 1e-13, "u={u} sum={s}");
        }
    }

    #[test]
    fn rejects_high_degree_and_bad_index() {
        let g = KnotGrid::uniform(0.0, 1.0, 8).unwrap();
        assert!(matches!(
            cox_de_boor(0, 8, 0.5, &g),
            Err(BasisError::DegreeOutOfRange { degree: 8 })
        ));
        assert!(cox_de_boor(-8, 7, 0.0, &g).is_err());
        assert!(cox_de_boor(7, 7, 1.0, &g).is_ok());
        assert!(cox_de_boor(8, 7, 1.0, &g).is_err());
    }
}
