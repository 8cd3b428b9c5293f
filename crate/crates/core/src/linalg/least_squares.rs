//! Overdetermined band systems.

use super::{BandLu, BandMatrix, LinalgError, PIVOT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factorization {
    Cholesky,
    Ldlt,
    BorderedLu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// `||A x - b||_2`
    pub residual_norm: f64,
    pub method: Factorization,
}

fn residual_norm(a: &BandMatrix, x: &[f64], b: &[f64]) -> Result<f64, LinalgError> {
    let ax = a.matvec(x)?;
    Ok(ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt())
}

fn check_shape(a: &BandMatrix, rhs: &[f64]) -> Result<(), LinalgError> {
    if rhs.len() != a.nrows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.nrows(),
            found: rhs.len(),
        });
    }
    if a.nrows() < a.ncols() {
        return Err(LinalgError::Underdetermined {
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    Ok(())
}

/// Lower band of a symmetric matrix: `(i, j)` for `0 <= i - j <= kd`.
struct SymBand {
    n: usize,
    kd: usize,
    data: Vec<f64>,
}

impl SymBand {
    fn zeros(n: usize, kd: usize) -> Self {
        Self {
            n,
            kd,
            data: vec![0.0; n * (kd + 1)],
        }
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[j * (self.kd + 1) + (i - j)]
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * (self.kd + 1) + (i - j)]
    }

    fn max_diag(&self) -> f64 {
        (0..self.n)
            .map(|j| self.get(j, j).abs())
            .fold(0.0, f64::max)
    }
}

fn normal_matrix(a: &BandMatrix, rhs: &[f64]) -> (SymBand, Vec<f64>) {
    let n = a.ncols();
    let mut ata = SymBand::zeros(n, a.kl() + a.ku());
    let mut atb = vec![0.0; n];
    for r in 0..a.nrows() {
        let span = a.row_span(r);
        for c1 in span.clone() {
            let v1 = a.get(r, c1);
            if v1 == 0.0 {
                continue;
            }
            atb[c1] += v1 * rhs[r];
            for c2 in span.start..=c1 {
                *ata.at(c1, c2) += v1 * a.get(r, c2);
            }
        }
    }
    (ata, atb)
}

/// In-place `L L^T`; `Err(Some(j))` flags a tiny positive pivot, `Err(None)`
/// a non-positive one.
fn cholesky(m: &mut SymBand, tol: f64) -> Result<(), Option<usize>> {
    let (n, kd) = (m.n, m.kd);
    for j in 0..n {
        let lo = j.saturating_sub(kd);
        let d = m.get(j, j) - (lo..j).map(|k| m.get(j, k).powi(2)).sum::<f64>();
        if d <= 0.0 {
            return Err(None);
        }
        if d <= tol {
            return Err(Some(j));
        }
        let d = d.sqrt();
        *m.at(j, j) = d;
        for i in j + 1..(j + kd + 1).min(n) {
            let lo = i.saturating_sub(kd);
            let s: f64 = (lo..j).map(|k| m.get(i, k) * m.get(j, k)).sum();
            *m.at(i, j) = (m.get(i, j) - s) / d;
        }
    }
    Ok(())
}

/// In-place `L D L^T` with unit `L`; `D` on the diagonal.
fn ldlt(m: &mut SymBand, tol: f64) -> Result<(), usize> {
    let (n, kd) = (m.n, m.kd);
    for j in 0..n {
        let lo = j.saturating_sub(kd);
        let d = m.get(j, j)
            - (lo..j)
                .map(|k| m.get(j, k).powi(2) * m.get(k, k))
                .sum::<f64>();
        if d.abs() <= tol {
            return Err(j);
        }
        *m.at(j, j) = d;
        for i in j + 1..(j + kd + 1).min(n) {
            let lo = i.saturating_sub(kd);
            let s: f64 = (lo..j)
                .map(|k| m.get(i, k) * m.get(j, k) * m.get(k, k))
                .sum();
            *m.at(i, j) = (m.get(i, j) - s) / d;
        }
    }
    Ok(())
}

fn forward(m: &SymBand, x: &mut [f64], unit: bool) {
    for i in 0..m.n {
        let lo = i.saturating_sub(m.kd);
        let s: f64 = (lo..i).map(|k| m.get(i, k) * x[k]).sum();
        x[i] -= s;
        if !unit {
            x[i] /= m.get(i, i);
        }
    }
}

fn backward(m: &SymBand, x: &mut [f64], unit: bool) {
    for i in (0..m.n).rev() {
        let hi = (i + m.kd + 1).min(m.n);
        let s: f64 = (i + 1..hi).map(|k| m.get(k, i) * x[k]).sum();
        x[i] -= s;
        if !unit {
            x[i] /= m.get(i, i);
        }
    }
}

/// Least squares through the banded normal equations `A^T A x = A^T b`.
///
/// Cholesky first; a non-positive pivot from roundoff drops to `L D L^T`.
/// Conditioning is that of `A` squared.
pub fn normal_solve(a: &BandMatrix, rhs: &[f64]) -> Result<LstsqSolution, LinalgError> {
    check_shape(a, rhs)?;
    let (ata, atb) = normal_matrix(a, rhs);
    let tol = PIVOT_TOL * ata.max_diag();
    let mut chol = SymBand {
        n: ata.n,
        kd: ata.kd,
        data: ata.data.clone(),
    };
    let mut x = atb;
    let method = match cholesky(&mut chol, tol) {
        Ok(()) => {
            forward(&chol, &mut x, false);
            backward(&chol, &mut x, false);
            Factorization::Cholesky
        }
        Err(Some(column)) => return Err(LinalgError::RankDeficient { column }),
        Err(None) => {
            let mut m = ata;
            ldlt(&mut m, tol).map_err(|column| LinalgError::RankDeficient { column })?;
            forward(&m, &mut x, true);
            for (i, v) in x.iter_mut().enumerate() {
                *v /= m.get(i, i);
            }
            backward(&m, &mut x, true);
            Factorization::Ldlt
        }
    };
    let residual_norm = residual_norm(a, &x, rhs)?;
    Ok(LstsqSolution {
        x,
        residual_norm,
        method,
    })
}

/// Least squares for a band system with exactly one row more than columns.
///
/// Row `extra_row` is split off; the remaining square block `S` is factored by
/// band LU and the border handled by the rank-one update
/// `x = S^{-1} (c + z t)`, `z = S^{-T} r`, `t = (beta - z.c) / (1 + z.z)`,
/// which never forms `A^T A`.
pub fn bordered_lstsq(
    a: &BandMatrix,
    rhs: &[f64],
    extra_row: usize,
) -> Result<LstsqSolution, LinalgError> {
    check_shape(a, rhs)?;
    if a.nrows() != a.ncols() + 1 {
        return Err(LinalgError::DimensionMismatch {
            expected: a.ncols() + 1,
            found: a.nrows(),
        });
    }
    if extra_row >= a.nrows() {
        return Err(LinalgError::OutOfBounds { i: extra_row, j: 0 });
    }
    let square = a.without_row(extra_row);
    let lu = BandLu::factor(&square)?;
    let c: Vec<f64> = rhs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != extra_row)
        .map(|(_, v)| *v)
        .collect();
    let z = lu.solve_transpose(&a.row(extra_row))?;
    let zc: f64 = z.iter().zip(&c).map(|(p, q)| p * q).sum();
    let zz: f64 = z.iter().map(|v| v * v).sum();
    let t = (rhs[extra_row] - zc) / (1.0 + zz);
    let y: Vec<f64> = c.iter().zip(&z).map(|(ci, zi)| ci + zi * t).collect();
    let x = lu.solve(&y)?;
    let residual_norm = residual_norm(a, &x, rhs)?;
    Ok(LstsqSolution {
        x,
        residual_norm,
        method: Factorization::BorderedLu,
    })
}
