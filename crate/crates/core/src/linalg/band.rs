use super::{DenseMatrix, LinalgError};

/// Rectangular matrix with `kl` sub-diagonals and `ku` super-diagonals in
/// compact band storage.
///
/// Logical entry `(i, j)` with `-ku <= i - j <= kl` lives at band row
/// `ku + i - j`, column `j` of a `(kl + ku + 1) x ncols` array (the LAPACK
/// layout). Everything outside the band is an implicit zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    nrows: usize,
    ncols: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(nrows: usize, ncols: usize, kl: usize, ku: usize) -> Self {
        Self {
            nrows,
            ncols,
            kl,
            ku,
            data: vec![0.0; (kl + ku + 1) * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n, 0, 0);
        m.data.fill(1.0);
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.nrows && j < self.ncols && i + self.ku >= j && j + self.kl >= i
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        (self.ku + i - j) * self.ncols + j
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<(), LinalgError> {
        if i >= self.nrows || j >= self.ncols {
            return Err(LinalgError::OutOfBounds { i, j });
        }
        if !self.in_band(i, j) {
            return Err(LinalgError::OutOfBand {
                i,
                j,
                kl: self.kl,
                ku: self.ku,
            });
        }
        let k = self.offset(i, j);
        self.data[k] = v;
        Ok(())
    }

    /// Raw band row `r` (`0 ..= kl + ku`), indexed by column.
    pub fn band_row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    /// Column range that row `i` can touch.
    pub fn row_span(&self, i: usize) -> std::ops::Range<usize> {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku + 1).min(self.ncols);
        lo..hi.max(lo)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.ncols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        Ok((0..self.nrows)
            .map(|i| self.row_span(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for j in self.row_span(i) {
                d[(i, j)] = self.get(i, j);
            }
        }
        d
    }

    /// Band copy of `dense`; fails if a nonzero lies outside the band.
    pub fn from_dense(dense: &DenseMatrix, kl: usize, ku: usize) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dense.nrows(), dense.ncols(), kl, ku);
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                let v = dense[(i, j)];
                if m.in_band(i, j) {
                    m.set(i, j, v)?;
                } else if v != 0.0 {
                    return Err(LinalgError::OutOfBand { i, j, kl, ku });
                }
            }
        }
        Ok(m)
    }

    /// Copy with row `r` removed. Rows below `r` move up by one, which widens
    /// the upper band by one.
    pub fn without_row(&self, r: usize) -> Self {
        assert!(r < self.nrows, "row {r} out of range");
        let mut m = Self::zeros(self.nrows - 1, self.ncols, self.kl, self.ku + 1);
        for i in (0..self.nrows).filter(|&i| i != r) {
            let dst = if i > r { i - 1 } else { i };
            for j in self.row_span(i) {
                m.set(dst, j, self.get(i, j))
                    .expect("widened band holds the row");
            }
        }
        m
    }

    /// Row `r` as a dense vector.
    pub fn row(&self, r: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for j in self.row_span(r) {
            out[j] = self.get(r, j);
        }
        out
    }
}
