//! Dense square complex matrices.
//!
//! The collections handled here are tiny (n ≤ a few dozen), so the matrix
//! type is a plain row-major `Vec<Complex64>` with naive O(n³) products and
//! a partially pivoted Gauss inverse. No external linear-algebra backend.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut, Mul};

/// Relative pivot threshold below which the Gauss elimination reports a
/// singular matrix.
const SINGULAR_PIVOT_REL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("matrix is singular to working precision (pivot {pivot:.3e} at step {step})")]
pub struct SingularMatrix {
    pub step: usize,
    pub pivot: f64,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// The involution `J`: ones on the anti-diagonal, zero elsewhere.
    pub fn anti_identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, n - 1 - i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(
            n >= 1 && rows.iter().all(|r| r.len() == n),
            "rows must form a square matrix"
        );
        Self::from_fn(n, |i, j| rows[i][j])
    }

    /// Convenience for tests: a matrix from real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(
            n >= 1 && rows.iter().all(|r| r.len() == n),
            "rows must form a square matrix"
        );
        Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Largest entry magnitude; 0 for the zero matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Extracts the square submatrix at rows and columns `start..start+len`.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.n);
        Self::from_fn(len, |i, j| self[(start + i, start + j)])
    }

    /// Overwrites the principal block at `start` with `block`.
    pub fn set_principal_block(&mut self, start: usize, block: &Self) {
        assert!(start + block.n <= self.n);
        for i in 0..block.n {
            for j in 0..block.n {
                self[(start + i, start + j)] = block[(i, j)];
            }
        }
    }

    /// Reindexes rows and columns by `map`, where `map[new] = old`.
    pub fn reindexed(&self, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.n);
        Self::from_fn(self.n, |i, j| self[(map[i], map[j])])
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self, SingularMatrix> {
        let n = self.n;
        let scale = self.max_abs().max(1.0);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty pivot search");
            if pivot_mag <= SINGULAR_PIVOT_REL * scale {
                return Err(SingularMatrix {
                    step: col,
                    pivot: pivot_mag,
                });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for j in 0..self.n {
            self.data.swap(r1 * self.n + j, r2 * self.n + j);
        }
    }

    /// Largest entrywise deviation from `other`, relative to the overall
    /// entry scale (floored at 1 so near-zero matrices compare absolutely).
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        let scale = self.max_abs().max(other.max_abs()).max(1.0);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        self.n == other.n && self.max_rel_diff(other) <= rel_tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "  [")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_matches_hand_computation() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[3.0, 1.0]]);
        let p = &a * &b;
        let expected = ComplexMatrix::from_real_rows(&[&[7.0, 2.0], &[3.0, 1.0]]);
        assert!(p.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn inverse_round_trip() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(0.5, -0.3), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, -1.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5)],
        ]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).approx_eq(&ComplexMatrix::identity(3), 1e-12));
        assert!((&inv * &a).approx_eq(&ComplexMatrix::identity(3), 1e-12));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn anti_identity_is_involution() {
        for n in 1..6 {
            let j = ComplexMatrix::anti_identity(n);
            assert!((&j * &j).approx_eq(&ComplexMatrix::identity(n), 0.0));
        }
    }

    #[test]
    fn reindex_matches_conjugation_by_permutation() {
        // map[new] = old realizes Qᵀ M Q for the permutation matrix Q with
        // Q[old][new] = 1.
        let m =
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 9.0]]);
        let map = [2usize, 0, 1];
        let mut q = ComplexMatrix::zeros(3);
        for (new, &old) in map.iter().enumerate() {
            q[(old, new)] = c(1.0, 0.0);
        }
        let qt = ComplexMatrix::from_fn(3, |i, j| q[(j, i)]);
        let direct = &(&qt * &m) * &q;
        assert!(m.reindexed(&map).approx_eq(&direct, 1e-15));
    }
}
