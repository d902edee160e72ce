//! Sparse integer matrices with exact `i64` arithmetic.
//!
//! The cube and Khovanov modules only ever produce entries in `{0, ±1, ±2}`,
//! so `i64` is ample for assembling differentials and checking `∂² = 0`;
//! anything requiring unbounded coefficient growth (Smith normal form)
//! converts to `BigInt` in the homology module.

use std::collections::BTreeMap;

/// A sparse `rows × cols` integer matrix. Absent entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), i64>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, it: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut m = IntMat::zero(rows, cols);
        for (r, c, v) in it {
            m.add(r, c, v);
        }
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        debug_assert!(r < self.rows && c < self.cols);
        if v == 0 {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    /// Adds `v` to entry `(r, c)`.
    pub fn add(&mut self, r: usize, c: usize, v: i64) {
        debug_assert!(r < self.rows && c < self.cols, "({r},{c}) out of {}x{}", self.rows, self.cols);
        if v == 0 {
            return;
        }
        let e = self.entries.entry((r, c)).or_insert(0);
        *e = e.checked_add(v).expect("integer overflow in IntMat::add");
        if *e == 0 {
            self.entries.remove(&(r, c));
        }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        *self.entries.get(&(r, c)).unwrap_or(&0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            t.set(c, r, v);
        }
        t
    }

    pub fn scaled(&self, k: i64) -> IntMat {
        let mut m = IntMat::zero(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            m.set(r, c, v.checked_mul(k).expect("integer overflow in IntMat::scaled"));
        }
        m
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in IntMat::mul");
        // group other's entries by row for the sparse product
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for (r, c, v) in other.iter() {
            by_row[r].push((c, v));
        }
        let mut out = IntMat::zero(self.rows, other.cols);
        for (r, k, v) in self.iter() {
            for &(c, w) in &by_row[k] {
                out.add(r, c, v.checked_mul(w).expect("integer overflow in IntMat::mul"));
            }
        }
        out
    }

    /// Writes `block` into `self` with its upper-left corner at `(r0, c0)`,
    /// scaled by `sign`.
    pub fn insert_block(&mut self, r0: usize, c0: usize, block: &IntMat, sign: i64) {
        for (r, c, v) in block.iter() {
            self.add(r0 + r, c0 + c, v * sign);
        }
    }

    /// Applies the matrix to an integer vector: `self * x`.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0i64; self.rows];
        for (r, c, v) in self.iter() {
            y[r] = y[r].checked_add(v.checked_mul(x[c]).expect("overflow")).expect("overflow");
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_identity() {
        let m = IntMat::from_dense(&[vec![1, 2], vec![3, 4], vec![0, -1]]);
        assert_eq!(m.mul(&IntMat::identity(2)), m);
        assert_eq!(IntMat::identity(3).mul(&m), m);
    }

    #[test]
    fn transpose_involution() {
        let m = IntMat::from_dense(&[vec![1, 0, 5], vec![2, -7, 0]]);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn add_cancels_to_zero() {
        let mut m = IntMat::zero(1, 1);
        m.add(0, 0, 3);
        m.add(0, 0, -3);
        assert!(m.is_zero());
        assert_eq!(m.nnz(), 0);
    }
}
