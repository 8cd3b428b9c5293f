use super::BasisError;

/// Number of extension knots stored on each side of `[a, b]`.
pub const EXTENSION: usize = 7;

/// Relative tolerance on the spacing of consecutive stored knots.
const SPACING_TOL: f64 = 1e-12;

/// Smallest supported number of sub-intervals: seven boundary rows plus at
/// least one interior collocation row.
pub const MIN_INTERVALS: usize = 8;

/// Uniform knot sequence `x_{-7} .. x_{n+7}` over `[a, b]`, with `x_i = a + i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotGrid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    knots: Vec<f64>,
}

impl KnotGrid {
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, BasisError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(BasisError::NonFiniteEndpoint { a, b });
        }
        if b <= a {
            return Err(BasisError::EmptyInterval { a, b });
        }
        if n < MIN_INTERVALS {
            return Err(BasisError::TooFewIntervals {
                n,
                min: MIN_INTERVALS,
            });
        }
        let h = (b - a) / n as f64;
        let knots: Vec<f64> = (0..n + 1 + 2 * EXTENSION)
            .map(|k| {
                let i = k as i64 - EXTENSION as i64;
                if i == 0 {
                    a
                } else if i == n as i64 {
                    b
                } else {
                    a + i as f64 * h
                }
            })
            .collect();
        for (k, w) in knots.windows(2).enumerate() {
            if (w[1] - w[0] - h).abs() > SPACING_TOL * h.abs() {
                return Err(BasisError::NonUniformSpacing {
                    index: k as i64 - EXTENSION as i64,
                    spacing: w[1] - w[0],
                    h,
                });
            }
        }
        Ok(Self { a, b, n, h, knots })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of sub-intervals of `[a, b]`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Lowest and highest stored knot index.
    pub fn index_range(&self) -> (i64, i64) {
        (-(EXTENSION as i64), (self.n + EXTENSION) as i64)
    }

    pub fn knot(&self, i: i64) -> Result<f64, BasisError> {
        let (lo, hi) = self.index_range();
        if i < lo || i > hi {
            return Err(BasisError::KnotOutOfRange { index: i, lo, hi });
        }
        Ok(self.knots[(i - lo) as usize])
    }

    /// All stored knots, `x_{-7}` first.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Interior knots `x_0 .. x_n`.
    pub fn interior(&self) -> &[f64] {
        &self.knots[EXTENSION..=EXTENSION + self.n]
    }

    /// Position of `x` in units of `h` measured from `a`, snapped to the
    /// nearest integer when it lies within rounding distance of a knot.
    pub fn position(&self, x: f64) -> f64 {
        let s = (x - self.a) / self.h;
        let r = s.round();
        if (s - r).abs() <= 64.0 * f64::EPSILON * r.abs().max(1.0) {
            r
        } else {
            s
        }
    }

    /// Clamps `x` onto `[a, b]` if it lies outside by no more than a few ulps
    /// of the nearer endpoint; returns `None` for anything further away.
    pub fn clamp_to_domain(&self, x: f64) -> Option<f64> {
        if !x.is_finite() {
            return None;
        }
        if (self.a..=self.b).contains(&x) {
            return Some(x);
        }
        let ulp = |v: f64| 4.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE);
        if x < self.a && self.a - x <= ulp(self.a).max(4.0 * f64::EPSILON * self.h) {
            Some(self.a)
        } else if x > self.b && x - self.b <= ulp(self.b).max(4.0 * f64::EPSILON * self.h) {
            Some(self.b)
        } else {
            None
        }
    }
}
