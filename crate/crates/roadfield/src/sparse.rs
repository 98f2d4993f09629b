//! Compressed sparse row matrices sized for 2D finite-difference stencils.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Square sparse matrix in CSR layout with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// Accumulating builder: repeated `add` calls to one entry sum up.
#[derive(Debug)]
pub struct CsrBuilder {
    n: usize,
    rows: Vec<BTreeMap<usize, f64>>,
}

impl CsrBuilder {
    pub fn new(n: usize) -> Self {
        CsrBuilder { n, rows: vec![BTreeMap::new(); n] }
    }

    /// Adds `v` to entry `(i, j)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n, "entry ({i}, {j}) outside {0}x{0}", self.n);
        *self.rows[i].entry(j).or_insert(0.0) += v;
    }

    pub fn build(self) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let nnz: usize = self.rows.iter().map(BTreeMap::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in &self.rows {
            for (&j, &v) in row {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n: self.n, row_ptr, cols, vals }
    }
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entry accessor (zero when the position is not stored).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.cols[lo..hi].binary_search(&j) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Iterates the stored entries of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.cols[lo..hi].iter().copied().zip(self.vals[lo..hi].iter().copied())
    }

    /// Matrix-vector product `y = A x`.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n || y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len().max(y.len()) });
        }
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    /// Half-bandwidths `(lower, upper)`: max of `i - j` and `j - i` over
    /// stored entries.
    pub fn bandwidth(&self) -> (usize, usize) {
        let mut lower = 0usize;
        let mut upper = 0usize;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                if j < i {
                    lower = lower.max(i - j);
                } else {
                    upper = upper.max(j - i);
                }
            }
        }
        (lower, upper)
    }

    /// Gershgorin lower bound: `min_i (a_ii - sum_{j != i} |a_ij|)`.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut lo = f64::INFINITY;
        for i in 0..self.n {
            let mut diag = 0.0;
            let mut off = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    diag = self.vals[k];
                } else {
                    off += self.vals[k].abs();
                }
            }
            lo = lo.min(diag - off);
        }
        lo
    }

    /// Dense copy in row-major order; guarded so tests cannot accidentally
    /// materialize a huge operator.
    pub fn to_dense(&self) -> Result<Vec<Vec<f64>>> {
        const DENSE_CAP: usize = 4096;
        if self.n > DENSE_CAP {
            return Err(Error::OrderTooLarge { order: self.n, cap: DENSE_CAP });
        }
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                dense[i][self.cols[k]] = self.vals[k];
            }
        }
        Ok(dense)
    }

    /// Writes the matrix as `row col value` coordinate lines (16-digit
    /// scientific floats), one stored entry per line.
    pub fn write_coordinate<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "row,col,value")?;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(w, "{},{},{}", i, self.cols[k], crate::util::fmt17(self.vals[k]))?;
            }
        }
        Ok(())
    }

    /// Maximum absolute entry-wise difference with `other` over the union of
    /// sparsity patterns.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - other.entry(i, j)).abs());
            }
            for (j, v) in other.row(i) {
                worst = worst.max((v - self.entry(i, j)).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        // [ 2 -1  0 ]
        // [-1  2 -1 ]
        // [ 0 -1  2 ]
        let mut b = CsrBuilder::new(3);
        for i in 0..3 {
            b.add(i, i, 2.0);
        }
        b.add(0, 1, -1.0);
        b.add(1, 0, -1.0);
        b.add(1, 2, -1.0);
        b.add(2, 1, -1.0);
        b.build()
    }

    #[test]
    fn builder_accumulates_duplicate_entries() {
        let mut b = CsrBuilder::new(2);
        b.add(0, 0, 1.5);
        b.add(0, 0, 2.5);
        b.add(0, 1, -1.0);
        let m = b.build();
        assert_eq!(m.entry(0, 0), 4.0);
        assert_eq!(m.entry(0, 1), -1.0);
        assert_eq!(m.entry(1, 1), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn apply_matches_hand_computation() {
        let m = sample();
        let y = m.apply(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![0.0, 0.0, 4.0]);
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let m = sample();
        assert!(matches!(m.apply(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bandwidth_and_gershgorin() {
        let m = sample();
        assert_eq!(m.bandwidth(), (1, 1));
        // Middle row: 2 - 2 = 0 is the minimum.
        assert_eq!(m.gershgorin_lower(), 0.0);
    }

    #[test]
    fn dense_round_trip() {
        let m = sample();
        let d = m.to_dense().unwrap();
        assert_eq!(d[1], vec![-1.0, 2.0, -1.0]);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let b = CsrBuilder::new(5000);
        let m = b.build();
        assert!(matches!(m.to_dense(), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn coordinate_output_lists_entries() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "row,col,value");
        assert_eq!(lines.len(), 1 + m.nnz());
        assert!(lines[1].starts_with("0,0,"));
    }
}
