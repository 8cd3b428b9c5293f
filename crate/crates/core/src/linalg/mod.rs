//! Band storage and the solvers used on collocation systems.

#![allow(clippy::needless_range_loop)]

mod band;
mod dense;
mod least_squares;
mod lu;

pub use band::BandMatrix;
pub use dense::{dense_solve_oracle, DenseMatrix};
pub use least_squares::{bordered_lstsq, normal_solve, Factorization, LstsqSolution};
pub use lu::{band_lu_solve, BandLu};

/// Pivots below this fraction of the largest entry count as zero.
pub const PIVOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {nrows}x{ncols}, expected square")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("system is underdetermined ({nrows} rows, {ncols} columns)")]
    Underdetermined { nrows: usize, ncols: usize },
    #[error("matrix is singular: no usable pivot in column {pivot_index}")]
    Singular { pivot_index: usize },
    #[error("normal matrix is rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("entry ({i}, {j}) is outside the band (kl = {kl}, ku = {ku})")]
    OutOfBand {
        i: usize,
        j: usize,
        kl: usize,
        ku: usize,
    },
    #[error("entry ({i}, {j}) is outside the matrix")]
    OutOfBounds { i: usize, j: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(rng: &mut ChaCha8Rng, n: usize, kl: usize, ku: usize) -> BandMatrix {
        let mut m = BandMatrix::zeros(n, n, kl, ku);
        for i in 0..n {
            for j in m.row_span(i) {
                m.set(i, j, rng.gen_range(-1.0..1.0)).unwrap();
            }
            // keep the matrix comfortably nonsingular
            let d = m.get(i, i);
            m.set(i, i, d + 4.0 * d.signum()).unwrap();
        }
        m
    }

    #[test]
    fn random_systems_match_dense() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..40);
            let (kl, ku) = (rng.gen_range(0..8), rng.gen_range(0..8));
            let a = random_band(&mut rng, n, kl, ku);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = band_lu_solve(&a, &b).unwrap();
            let y = dense_solve_oracle(&a.to_dense(), &b).unwrap();
            let norm = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for (u, v) in x.iter().zip(&y) {
                assert!((u - v).abs() <= 1e-10 * norm, "seed {seed}");
            }
        }
    }
}
