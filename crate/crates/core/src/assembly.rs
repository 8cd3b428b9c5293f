//! The collocation system: seven boundary rows plus one row per knot.
//!
//! Unknown `alpha_j`, `j = -3 ..= n + 3`, is column `j + 3`. Rows are ordered
//! for band locality: the four conditions at `a`, the collocation rows by
//! increasing knot index, then the three conditions at `b`.

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::basis::{septic_at_knot, BasisError, KnotGrid};
use crate::linalg::{BandMatrix, DenseMatrix, LinalgError};
use crate::problem::{LinearBvp7, ProblemError, Side, BOUNDARY_CONDITIONS};

/// Which equations make up the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// All `n + 1` collocation rows: `(n + 8) x (n + 7)`.
    #[default]
    LeastSquares,
    /// Square system without the collocation row at `x_0`.
    SquareDropFirst,
    /// Square system without the collocation row at `x_n`.
    SquareDropLast,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::LeastSquares,
        Scheme::SquareDropFirst,
        Scheme::SquareDropLast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::LeastSquares => "least_squares",
            Scheme::SquareDropFirst => "square_drop_first",
            Scheme::SquareDropLast => "square_drop_last",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn is_square(self) -> bool {
        self != Scheme::LeastSquares
    }

    fn dropped(self, n: usize) -> Option<usize> {
        match self {
            Scheme::LeastSquares => None,
            Scheme::SquareDropFirst => Some(0),
            Scheme::SquareDropLast => Some(n),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Logical identity of a system row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Boundary condition `k_index`, `index` in `1 ..= 7`.
    Boundary { index: usize },
    /// Collocation at knot `x_i`.
    Collocation { i: usize },
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::Boundary { index } => write!(f, "bc{index}"),
            RowKind::Collocation { i } => write!(f, "x{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error("grid [{grid_a}, {grid_b}] does not match the problem interval [{a}, {b}]")]
    DomainMismatch {
        a: f64,
        b: f64,
        grid_a: f64,
        grid_b: f64,
    },
    #[error("collocation index {i} outside 0..={n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("at x = {x}: {source}")]
    Eval {
        x: f64,
        #[source]
        source: ProblemError,
    },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("row {row} is identically zero")]
    ZeroRow { row: RowKind },
    #[error("row {row} has a non-finite entry in column {column}")]
    NonFinite { row: RowKind, column: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Contiguous run of entries starting at column `start`, with its rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub start: usize,
    pub values: Vec<f64>,
    pub rhs: f64,
}

impl SparseRow {
    /// Drops exact zeros at either end.
    fn trimmed(mut self) -> Self {
        while self.values.last() == Some(&0.0) {
            self.values.pop();
        }
        let lead = self.values.iter().take_while(|v| **v == 0.0).count();
        self.values.drain(..lead);
        self.start += lead;
        self
    }

    pub fn columns(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.values.len()
    }
}

fn column(j: i64) -> usize {
    (j + 3) as usize
}

/// Labels `j` with `B_j` possibly nonzero at knot `x_i`, clipped to the
/// active set.
fn labels_near(grid: &KnotGrid, i: i64) -> std::ops::RangeInclusive<i64> {
    (i - 4).max(-3)..=(i + 4).min(grid.n() as i64 + 3)
}

fn stencil_row(
    grid: &KnotGrid,
    i: i64,
    mut entry: impl FnMut(i64) -> Result<f64, AssemblyError>,
) -> Result<SparseRow, AssemblyError> {
    let labels = labels_near(grid, i);
    let start = column(*labels.start());
    let values = labels.map(&mut entry).collect::<Result<_, _>>()?;
    Ok(SparseRow {
        start,
        values,
        rhs: 0.0,
    })
}

/// Collocation row at `x_i`: `B_j^(7)(x_i) - g(x_i) B_j(x_i)`, rhs `q(x_i)`.
pub fn collocation_row(
    p: &LinearBvp7,
    grid: &KnotGrid,
    i: usize,
) -> Result<SparseRow, AssemblyError> {
    if i > grid.n() {
        return Err(AssemblyError::IndexOutOfRange { i, n: grid.n() });
    }
    let x = grid.interior()[i];
    let eval = |source| AssemblyError::Eval { x, source };
    let g = p.g(x).map_err(eval)?;
    let q = p.q(x).map_err(eval)?;
    let ii = i as i64;
    let mut row = stencil_row(grid, ii, |j| {
        Ok(septic_at_knot(j, ii, grid, 7)? - g * septic_at_knot(j, ii, grid, 0)?)
    })?;
    row.rhs = q;
    Ok(row.trimmed())
}

/// The seven boundary rows, in `k1 ..= k7` order.
pub fn boundary_rows(p: &LinearBvp7, grid: &KnotGrid) -> Result<Vec<SparseRow>, AssemblyError> {
    BOUNDARY_CONDITIONS
        .iter()
        .zip(p.boundary_values())
        .map(|(&(side, d), &k)| {
            let i = match side {
                Side::A => 0,
                Side::B => grid.n() as i64,
            };
            let mut row = stencil_row(grid, i, |j| Ok(septic_at_knot(j, i, grid, d)?))?;
            row.rhs = k;
            Ok(row.trimmed())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSystem {
    pub num_unknowns: usize,
    pub num_rows: usize,
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
    /// Max-abs entry of each row before scaling.
    pub row_scales: Vec<f64>,
    pub scheme: Scheme,
    pub row_map: Vec<RowKind>,
}

impl CollocationSystem {
    pub fn to_dense(&self) -> DenseMatrix {
        self.matrix.to_dense()
    }

    /// Position of a logical row, if the scheme kept it.
    pub fn row_of(&self, kind: RowKind) -> Option<usize> {
        self.row_map.iter().position(|r| *r == kind)
    }

    /// Dense CSV: a provenance column, one column per unknown, then rhs.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "row")?;
        for j in 0..self.num_unknowns {
            write!(w, ",a{}", j as i64 - 3)?;
        }
        writeln!(w, ",rhs")?;
        let dense = self.to_dense();
        for (r, kind) in self.row_map.iter().enumerate() {
            write!(w, "{kind}")?;
            for v in dense.row(r) {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w, ",{:.16e}", self.rhs[r])?;
        }
        Ok(())
    }
}

/// Builds and equilibrates the system for `scheme`.
pub fn assemble(
    p: &LinearBvp7,
    grid: &KnotGrid,
    scheme: Scheme,
) -> Result<CollocationSystem, AssemblyError> {
    if grid.a() != p.a() || grid.b() != p.b() {
        return Err(AssemblyError::DomainMismatch {
            a: p.a(),
            b: p.b(),
            grid_a: grid.a(),
            grid_b: grid.b(),
        });
    }
    let n = grid.n();
    let dropped = scheme.dropped(n);
    let mut bc = boundary_rows(p, grid)?.into_iter();
    let mut rows: Vec<(RowKind, SparseRow)> = Vec::with_capacity(n + 8);
    for index in 1..=4 {
        rows.push((RowKind::Boundary { index }, bc.next().expect("seven rows")));
    }
    for i in (0..=n).filter(|&i| Some(i) != dropped) {
        rows.push((RowKind::Collocation { i }, collocation_row(p, grid, i)?));
    }
    for index in 5..=7 {
        rows.push((RowKind::Boundary { index }, bc.next().expect("seven rows")));
    }

    let num_unknowns = n + 7;
    let mut kl = 0;
    let mut ku = 0;
    for (r, (kind, row)) in rows.iter().enumerate() {
        if row.values.is_empty() {
            return Err(AssemblyError::ZeroRow { row: *kind });
        }
        let cols = row.columns();
        kl = kl.max(r.saturating_sub(cols.start));
        ku = ku.max((cols.end - 1).saturating_sub(r));
    }

    let mut matrix = BandMatrix::zeros(rows.len(), num_unknowns, kl, ku);
    let mut rhs = Vec::with_capacity(rows.len());
    let mut row_scales = Vec::with_capacity(rows.len());
    let mut row_map = Vec::with_capacity(rows.len());
    for (r, (kind, row)) in rows.iter().enumerate() {
        if let Some(k) = row.values.iter().position(|v| !v.is_finite()) {
            return Err(AssemblyError::NonFinite {
                row: *kind,
                column: row.start + k,
            });
        }
        let scale = row.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        for (c, v) in row.columns().zip(&row.values) {
            matrix.set(r, c, v / scale)?;
        }
        if !row.rhs.is_finite() {
            return Err(AssemblyError::NonFinite {
                row: *kind,
                column: num_unknowns,
            });
        }
        rhs.push(row.rhs / scale);
        row_scales.push(scale);
        row_map.push(*kind);
    }
    Ok(CollocationSystem {
        num_unknowns,
        num_rows: rows.len(),
        matrix,
        rhs,
        row_scales,
        scheme,
        row_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::septic_eval;
    use crate::problem::{example1, monomial};

    fn grid(p: &LinearBvp7, n: usize) -> KnotGrid {
        KnotGrid::uniform(p.a(), p.b(), n).unwrap()
    }

    fn as_labelled(row: &SparseRow) -> Vec<(i64, f64)> {
        row.columns()
            .zip(&row.values)
            .map(|(c, v)| (c as i64 - 3, *v))
            .collect()
    }

    #[test]
    fn dimensions() {
        let p = example1();
        let g = grid(&p, 20);
        let ls = assemble(&p, &g, Scheme::LeastSquares).unwrap();
        assert_eq!((ls.num_rows, ls.num_unknowns), (28, 27));
        for s in [Scheme::SquareDropFirst, Scheme::SquareDropLast] {
            let sys = assemble(&p, &g, s).unwrap();
            assert_eq!((sys.num_rows, sys.num_unknowns), (27, 27));
        }
        let first = assemble(&p, &g, Scheme::SquareDropFirst).unwrap();
        assert_eq!(first.row_of(RowKind::Collocation { i: 0 }), None);
        assert_eq!(first.row_of(RowKind::Collocation { i: 1 }), Some(4));
        let last = assemble(&p, &g, Scheme::SquareDropLast).unwrap();
        assert_eq!(last.row_of(RowKind::Collocation { i: 20 }), None);
    }

    #[test]
    fn interior_collocation_entries() {
        let p = example1();
        let g = grid(&p, 20);
        let h7 = g.h().powi(7);
        let row = collocation_row(&p, &g, 10).unwrap();
        let entries = as_labelled(&row);
        // right limit at the centre knot, g = 1
        let centre = entries.iter().find(|(j, _)| *j == 10).unwrap().1;
        let expected = 176400.0 / h7 - 2416.0;
        assert!((centre - expected).abs() <= 1e-12 * expected.abs());
        assert_eq!(entries.first().unwrap().0, 7);
        assert_eq!(entries.last().unwrap().0, 14);
        let far = entries.last().unwrap().1;
        assert!((far - 5040.0 / h7).abs() <= 1e-12 * far.abs());
        assert_eq!(row.rhs, p.q(g.interior()[10]).unwrap());
    }

    #[test]
    fn last_collocation_row_uses_left_limit() {
        let p = example1();
        let g = grid(&p, 20);
        let labels: Vec<i64> = as_labelled(&collocation_row(&p, &g, 20).unwrap())
            .iter()
            .map(|e| e.0)
            .collect();
        assert_eq!(labels, (16..=23).collect::<Vec<_>>());
    }

    #[test]
    fn manufactured_rhs() {
        let p = monomial(7).unwrap();
        let g = grid(&p, 8);
        for i in 0..=8 {
            assert_eq!(collocation_row(&p, &g, i).unwrap().rhs, 5040.0);
        }
    }

    #[test]
    fn boundary_row_stencils() {
        let p = example1();
        let g = grid(&p, 20);
        let h = g.h();
        let rows = boundary_rows(&p, &g).unwrap();
        let y = as_labelled(&rows[0]);
        let expect0 = [1.0, 120.0, 1191.0, 2416.0, 1191.0, 120.0, 1.0];
        assert_eq!(
            y.iter().map(|e| e.0).collect::<Vec<_>>(),
            (-3..=3).collect::<Vec<_>>()
        );
        for ((_, v), e) in y.iter().zip(expect0) {
            assert_eq!(*v, e);
        }
        // odd stencils are antisymmetric, so column order j = -3..3 mirrors
        // the offset order of the tables
        let d1 = [-7.0, -392.0, -1715.0, 0.0, 1715.0, 392.0, 7.0];
        for ((_, v), e) in as_labelled(&rows[1]).iter().zip(d1) {
            assert!(
                (v - e / h).abs() <= 1e-12 * (e / h).abs().max(1.0),
                "{v} vs {}",
                e / h
            );
        }
        let d3 = [-210.0, -1680.0, 3990.0, 0.0, -3990.0, 1680.0, 210.0];
        for ((_, v), e) in as_labelled(&rows[3]).iter().zip(d3) {
            let e = e / h.powi(3);
            assert!((v - e).abs() <= 1e-12 * e.abs().max(1.0));
        }
        for (r, k) in rows.iter().zip(p.boundary_values()) {
            assert_eq!(r.rhs, *k);
            assert!(r.values.len() <= 7);
        }
        let b_labels: Vec<i64> = as_labelled(&rows[4]).iter().map(|e| e.0).collect();
        assert_eq!(b_labels, (17..=23).collect::<Vec<_>>());
    }

    #[test]
    fn equilibrated_and_banded() {
        let p = example1();
        for n in [8, 13, 20] {
            let g = grid(&p, n);
            for s in Scheme::ALL {
                let sys = assemble(&p, &g, s).unwrap();
                let d = sys.to_dense();
                for r in 0..sys.num_rows {
                    let row = d.row(r);
                    let max = row.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
                    assert_eq!(max, 1.0);
                    let nz: Vec<usize> = (0..row.len()).filter(|&c| row[c] != 0.0).collect();
                    assert!(nz.last().unwrap() - nz.first().unwrap() < 8);
                    let limit = match sys.row_map[r] {
                        RowKind::Boundary { .. } => 7,
                        RowKind::Collocation { .. } => 8,
                    };
                    assert!(nz.len() <= limit);
                }
            }
        }
    }

    #[test]
    fn schemes_are_consistent() {
        let p = example1();
        let g = grid(&p, 12);
        let ls = assemble(&p, &g, Scheme::LeastSquares).unwrap();
        let ld = ls.to_dense();
        for s in [Scheme::SquareDropFirst, Scheme::SquareDropLast] {
            let sq = assemble(&p, &g, s).unwrap();
            let sd = sq.to_dense();
            for (r, kind) in sq.row_map.iter().enumerate() {
                let lr = ls.row_of(*kind).unwrap();
                assert_eq!(sd.row(r), ld.row(lr));
                assert_eq!(sq.rhs[r], ls.rhs[lr]);
                assert_eq!(sq.row_scales[r], ls.row_scales[lr]);
            }
        }
    }

    #[test]
    fn matches_pointwise_evaluation() {
        let p = example1();
        for n in 8..=12 {
            let g = grid(&p, n);
            let sys = assemble(&p, &g, Scheme::LeastSquares).unwrap();
            let d = sys.to_dense();
            for (r, kind) in sys.row_map.iter().enumerate() {
                let (x, order) = match *kind {
                    RowKind::Collocation { i } => (g.interior()[i], 7),
                    RowKind::Boundary { index } => {
                        let (side, d) = BOUNDARY_CONDITIONS[index - 1];
                        (p.endpoint(side), d)
                    }
                };
                let gx = p.g(x).unwrap();
                let raw: Vec<f64> = (0..sys.num_unknowns)
                    .map(|c| {
                        let j = c as i64 - 3;
                        let v = septic_eval(j, x, &g, order).unwrap();
                        if order == 7 {
                            v - gx * septic_eval(j, x, &g, 0).unwrap()
                        } else {
                            v
                        }
                    })
                    .collect();
                let scale = raw.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
                assert_eq!(scale, sys.row_scales[r]);
                for c in 0..sys.num_unknowns {
                    assert_eq!(d[(r, c)], raw[c] / scale, "{kind} column {c}");
                }
            }
        }
    }

    #[test]
    fn csv_dump_shape() {
        let p = example1();
        let sys = assemble(&p, &grid(&p, 8), Scheme::SquareDropLast).unwrap();
        let mut out = Vec::new();
        sys.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 15);
        assert!(lines[0].starts_with("row,a-3,a-2"));
        assert!(lines[0].ends_with(",a11,rhs"));
        assert!(lines[1].starts_with("bc1,"));
        assert!(lines[5].starts_with("x0,"));
        assert_eq!(lines[1].split(',').count(), 1 + 15 + 1);
    }

    #[test]
    fn mismatched_grid() {
        let p = example1();
        let g = KnotGrid::uniform(0.0, 2.0, 8).unwrap();
        assert!(matches!(
            assemble(&p, &g, Scheme::LeastSquares),
            Err(AssemblyError::DomainMismatch { .. })
        ));
        assert!(collocation_row(&p, &grid(&p, 8), 9).is_err());
    }
}
