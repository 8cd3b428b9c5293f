//! Banded LU with partial pivoting (the `gbtrf`/`gbtrs` scheme).

use super::{BandMatrix, LinalgError, PIVOT_TOL};

/// `P A = L U` for a square band matrix.
///
/// Factors live in a `(2 kl + ku + 1) x n` band array: pivoting lets `U` grow
/// to `kl + ku` super-diagonals. Entry `(i, j)` is at row `kl + ku + i - j`.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &BandMatrix) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::NotSquare {
                nrows: a.nrows(),
                ncols: a.ncols(),
            });
        }
        let n = a.ncols();
        let (kl, ku) = (a.kl(), a.ku());
        let mut lu = Self {
            n,
            kl,
            ku,
            ab: vec![0.0; (2 * kl + ku + 1) * n],
            piv: vec![0; n],
        };
        for i in 0..n {
            for j in a.row_span(i) {
                *lu.at(i, j) = a.get(i, j);
            }
        }
        let scale = a.max_abs();
        let uw = kl + ku;
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let mut p = j;
            for i in j + 1..=last {
                if lu.get(i, j).abs() > lu.get(p, j).abs() {
                    p = i;
                }
            }
            let pivot = lu.get(p, j).abs();
            if pivot == 0.0 || pivot < PIVOT_TOL * scale {
                return Err(LinalgError::Singular { pivot_index: j });
            }
            lu.piv[j] = p;
            let right = (j + uw).min(n - 1);
            if p != j {
                for c in j..=right {
                    let (x, y) = (lu.get(p, c), lu.get(j, c));
                    *lu.at(p, c) = y;
                    *lu.at(j, c) = x;
                }
            }
            let d = lu.get(j, j);
            for i in j + 1..=last {
                *lu.at(i, j) /= d;
            }
            for c in j + 1..=right {
                let u = lu.get(j, c);
                if u == 0.0 {
                    continue;
                }
                for i in j + 1..=last {
                    let l = lu.get(i, j);
                    *lu.at(i, c) -= l * u;
                }
            }
        }
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.kl + self.ku >= j && i <= j + self.kl);
        (self.kl + self.ku + i - j) * self.n + j
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.ab[self.idx(i, j)]
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        let k = self.idx(i, j);
        &mut self.ab[k]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check_len(&self, b: &[f64]) -> Result<(), LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        Ok(())
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.check_len(b)?;
        let (n, kl, uw) = (self.n, self.kl, self.kl + self.ku);
        let mut x = b.to_vec();
        for j in 0..n {
            x.swap(j, self.piv[j]);
            let xj = x[j];
            if xj != 0.0 {
                for i in j + 1..=(j + kl).min(n - 1) {
                    x[i] -= self.get(i, j) * xj;
                }
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.get(j, j);
            let xj = x[j];
            for i in j.saturating_sub(uw)..j {
                x[i] -= self.get(i, j) * xj;
            }
        }
        Ok(x)
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.check_len(b)?;
        let (n, kl, uw) = (self.n, self.kl, self.kl + self.ku);
        let mut x = b.to_vec();
        for j in 0..n {
            let s: f64 = (j.saturating_sub(uw)..j)
                .map(|i| self.get(i, j) * x[i])
                .sum();
            x[j] = (x[j] - s) / self.get(j, j);
        }
        for j in (0..n).rev() {
            let s: f64 = (j + 1..=(j + kl).min(n - 1))
                .map(|i| self.get(i, j) * x[i])
                .sum();
            x[j] -= s;
            x.swap(j, self.piv[j]);
        }
        Ok(x)
    }
}

/// Solves the square band system `A x = rhs` by LU with partial pivoting.
pub fn band_lu_solve(a: &BandMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if rhs.len() != a.nrows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.nrows(),
            found: rhs.len(),
        });
    }
    BandLu::factor(a)?.solve(rhs)
}
