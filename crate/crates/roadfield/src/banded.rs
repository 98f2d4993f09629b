//! Banded LU factorization with partial pivoting, in the LAPACK band layout.
//!
//! Storage follows `dgbtrf`: column-major array with leading dimension
//! `ldab = 2*kl + ku + 1`; entry `(i, j)` of the matrix lives at
//! `ab[j * ldab + (kl + ku + i - j)]`. The extra `kl` rows on top absorb
//! fill-in from row swaps.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    /// Factors `A - shift * I` where `A` is given in CSR form.
    pub fn factor_shifted(a: &CsrMatrix, shift: f64) -> Result<Self> {
        let n = a.n();
        let (kl, ku_plain) = a.bandwidth();
        // Pivoting can push fill one position past the plain upper bandwidth
        // per eliminated column; the standard bound is ku + kl.
        let ku = ku_plain;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![0.0; ldab * n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                ab[j * ldab + (kl + ku + i - j)] = v;
            }
            ab[i * ldab + (kl + ku)] -= shift;
        }
        let mut ipiv = vec![0usize; n];

        // Right-looking elimination with partial pivoting (dgbtrf shape).
        for k in 0..n {
            let hi_l = (k + kl).min(n - 1); // last row that can hold a pivot for column k
            // Find the pivot in column k among rows k..=hi_l.
            let mut piv_row = k;
            let mut piv_mag = band_get(&ab, ldab, kl, ku, k, k).abs();
            for i in (k + 1)..=hi_l {
                let mag = band_get(&ab, ldab, kl, ku, i, k).abs();
                if mag > piv_mag {
                    piv_mag = mag;
                    piv_row = i;
                }
            }
            if piv_mag < f64::MIN_POSITIVE {
                return Err(Error::SingularFactorization);
            }
            ipiv[k] = piv_row;
            let hi_u = (k + ku + kl).min(n - 1); // last column row-k touches after swaps
            if piv_row != k {
                for j in k..=hi_u {
                    if in_band(kl, ku, k, j) || in_band(kl, ku, piv_row, j) {
                        let a_kj = band_get(&ab, ldab, kl, ku, k, j);
                        let a_pj = band_get(&ab, ldab, kl, ku, piv_row, j);
                        band_set(&mut ab, ldab, kl, ku, k, j, a_pj);
                        band_set(&mut ab, ldab, kl, ku, piv_row, j, a_kj);
                    }
                }
            }
            let pivot = band_get(&ab, ldab, kl, ku, k, k);
            // Multipliers stored in place of the eliminated entries.
            for i in (k + 1)..=hi_l {
                let m = band_get(&ab, ldab, kl, ku, i, k) / pivot;
                band_set(&mut ab, ldab, kl, ku, i, k, m);
            }
            // Rank-1 update of the trailing band, column by column so the
            // inner loop walks contiguous memory.
            for j in (k + 1)..=hi_u {
                let a_kj = band_get(&ab, ldab, kl, ku, k, j);
                if a_kj == 0.0 {
                    continue;
                }
                let col = j * ldab;
                for i in (k + 1)..=hi_l {
                    let m = ab[k * ldab + (kl + ku + i - k)];
                    ab[col + (kl + ku + i - j)] -= m * a_kj;
                }
            }
        }
        Ok(BandedLu { n, kl, ku, ldab, ab, ipiv })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `(A - shift I) x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        // Forward: apply the recorded swaps and the unit-lower factor.
        for k in 0..n {
            let p = self.ipiv[k];
            if p != k {
                b.swap(k, p);
            }
            let hi = (k + kl).min(n - 1);
            let bk = b[k];
            if bk != 0.0 {
                for i in (k + 1)..=hi {
                    b[i] -= self.ab[k * ldab + (kl + ku + i - k)] * bk;
                }
            }
        }
        // Back substitution with the upper factor (bandwidth ku + kl).
        for k in (0..n).rev() {
            let hi = (k + ku + kl).min(n - 1);
            let mut acc = b[k];
            for j in (k + 1)..=hi {
                acc -= self.ab[j * ldab + (kl + ku + k - j)] * b[j];
            }
            let diag = self.ab[k * ldab + (kl + ku)];
            b[k] = acc / diag;
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

#[inline]
fn in_band(kl: usize, ku: usize, i: usize, j: usize) -> bool {
    // The working band includes kl extra superdiagonals for pivot fill.
    j + kl >= i && j <= i + kl + ku
}

#[inline]
fn band_get(ab: &[f64], ldab: usize, kl: usize, ku: usize, i: usize, j: usize) -> f64 {
    ab[j * ldab + (kl + ku + i - j)]
}

#[inline]
fn band_set(ab: &mut [f64], ldab: usize, kl: usize, ku: usize, i: usize, j: usize, v: f64) {
    ab[j * ldab + (kl + ku + i - j)] = v;
}
