//! Dense exact rational linear algebra.
//!
//! Everything is deterministic: pivots are chosen as the first nonzero
//! entry scanning rows top-down within the leftmost unfinished column, and
//! solutions set all free variables to zero.  Failed solves return a
//! certificate functional `phi` with `phi A = 0`, `phi b != 0`.

use num_traits::{One, Zero};

use crate::q::{q_int, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![q_int(0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, q_int(1));
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<Q>>) -> Self {
        let ncols = cols.len();
        let mut m = QMatrix::zero(rows, ncols);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a * b;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = q_int(0);
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Row-reduce in place, returning pivot columns and the transform `T`
    /// with `T * original = reduced` (reduced row echelon form).
    fn rref_with_transform(&self) -> (QMatrix, Vec<usize>, QMatrix) {
        let mut a = self.clone();
        let mut t = QMatrix::identity(self.rows);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            if row >= a.rows {
                break;
            }
            let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, row * a.cols + j);
                }
                for j in 0..t.cols {
                    t.data.swap(p * t.cols + j, row * t.cols + j);
                }
            }
            let inv = {
                let piv = a.get(row, col).clone();
                q_int(1) / piv
            };
            if !inv.is_one() {
                for j in 0..a.cols {
                    let v = a.get(row, j) * &inv;
                    a.set(row, j, v);
                }
                for j in 0..t.cols {
                    let v = t.get(row, j) * &inv;
                    t.set(row, j, v);
                }
            }
            for r in 0..a.rows {
                if r == row || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..a.cols {
                    let v = a.get(r, j).clone() - &f * a.get(row, j);
                    a.set(r, j, v);
                }
                for j in 0..t.cols {
                    let v = t.get(r, j).clone() - &f * t.get(row, j);
                    t.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots, t)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_transform().1.len()
    }

    /// Solve `A x = b`; `Ok` holds the deterministic solution (free
    /// variables zero), `Err` holds a certificate functional.
    pub fn solve(&self, b: &[Q]) -> std::result::Result<Vec<Q>, Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let (r, pivots, t) = self.rref_with_transform();
        let tb = t.mul_vec(b);
        for row in pivots.len()..self.rows {
            if !tb[row].is_zero() {
                // functional = that row of T
                let phi: Vec<Q> = (0..t.cols).map(|j| t.get(row, j).clone()).collect();
                return Err(phi);
            }
        }
        let mut x = vec![q_int(0); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = tb[row].clone();
        }
        // pivot rows may still involve free columns; with free vars at zero
        // the pivot value is exactly tb[row].
        let _ = r;
        Ok(x)
    }

    /// Basis of the nullspace (free variables each set to one in turn).
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let (r, pivots, _) = self.rref_with_transform();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut out = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![q_int(0); self.cols];
            v[free] = q_int(1);
            for (row, &pc) in pivots.iter().enumerate() {
                let coeff = r.get(row, free);
                if !coeff.is_zero() {
                    v[pc] = -coeff.clone();
                }
            }
            out.push(v);
        }
        out
    }

    /// Exact inverse of a square matrix, if it exists.
    pub fn invert(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let (_, pivots, t) = self.rref_with_transform();
        if pivots.len() == self.rows {
            Some(t)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }
}
