//! Plain row-major dense matrices and a deliberately simple reference solver.

use std::ops::{Index, IndexMut};

use super::{LinalgError, PIVOT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self {
            nrows: rows.len(),
            ncols,
            data: rows.concat(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Gaussian elimination with partial pivoting on a square system.
fn gauss(mut a: DenseMatrix, mut b: Vec<f64>) -> Result<Vec<f64>, LinalgError> {
    let n = a.nrows;
    let scale = a.max_abs();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
            .expect("non-empty range");
        let pivot = a[(p, k)].abs();
        if pivot == 0.0 || pivot < PIVOT_TOL * scale {
            return Err(LinalgError::Singular { pivot_index: k });
        }
        if p != k {
            for j in 0..n {
                a.data.swap(p * n + j, k * n + j);
            }
            b.swap(p, k);
        }
        for i in k + 1..n {
            let l = a[(i, k)] / a[(k, k)];
            if l == 0.0 {
                continue;
            }
            for j in k..n {
                a[(i, j)] -= l * a[(k, j)];
            }
            b[i] -= l * b[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[(k, j)] * b[j]).sum();
        b[k] = (b[k] - s) / a[(k, k)];
    }
    Ok(b)
}

/// Reference solver: elimination for square systems, dense normal equations
/// for overdetermined ones.
pub fn dense_solve_oracle(a: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if rhs.len() != a.nrows {
        return Err(LinalgError::DimensionMismatch {
            expected: a.nrows,
            found: rhs.len(),
        });
    }
    if a.nrows < a.ncols {
        return Err(LinalgError::Underdetermined {
            nrows: a.nrows,
            ncols: a.ncols,
        });
    }
    if a.nrows == a.ncols {
        return gauss(a.clone(), rhs.to_vec());
    }
    let n = a.ncols;
    let mut ata = DenseMatrix::zeros(n, n);
    let mut atb = vec![0.0; n];
    for r in 0..a.nrows {
        let row = a.row(r);
        for i in 0..n {
            if row[i] == 0.0 {
                continue;
            }
            atb[i] += row[i] * rhs[r];
            for j in 0..n {
                ata[(i, j)] += row[i] * row[j];
            }
        }
    }
    gauss(ata, atb)
}
