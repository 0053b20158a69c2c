//! Sparse matrices over Q or F_p with exact elimination.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::field::{Coeff, Field};
use crate::error::{Error, Result};

/// Triplet-backed sparse matrix. No stored zeros, no duplicate positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseFieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Coeff>,
}

/// Reduced row echelon form of a matrix.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub field: Field,
    pub cols: usize,
    /// `(pivot column, row)`, row normalized so the pivot entry is 1 and zero in
    /// every other pivot column.
    pub rows: Vec<(usize, BTreeMap<usize, Coeff>)>,
}

impl SparseFieldMatrix {
    pub fn new(field: Field, rows: usize, cols: usize) -> Self {
        SparseFieldMatrix { field, rows, cols, entries: BTreeMap::new() }
    }

    /// Validates the field and sums duplicate triplets.
    pub fn from_triplets(
        field: Field,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Coeff)>,
    ) -> Result<Self> {
        if let Field::Prime(p) = field {
            Field::prime(p)?;
        }
        let mut m = SparseFieldMatrix::new(field, rows, cols);
        for (r, c, x) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::InvalidInput(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            m.add_to(r, c, &x);
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Coeff {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_to(&mut self, r: usize, c: usize, x: &Coeff) {
        let f = self.field;
        let cur = self.entries.remove(&(r, c)).unwrap_or_else(Coeff::zero);
        let v = f.add(&cur, x);
        if !v.is_zero() {
            self.entries.insert((r, c), v);
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Coeff)> {
        self.entries.iter().map(|(&(r, c), x)| (r, c, x))
    }

    pub fn column(&self, c: usize) -> Vec<Coeff> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul_vec(&self, v: &[Coeff]) -> Vec<Coeff> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        let mut out = vec![Coeff::zero(); self.rows];
        for (&(r, c), x) in &self.entries {
            if !v[c].is_zero() {
                out[r] = f.add(&out[r], &f.mul(x, &v[c]));
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseFieldMatrix) -> SparseFieldMatrix {
        assert_eq!(self.cols, other.rows);
        let f = self.field;
        let mut by_row: BTreeMap<usize, Vec<(usize, &Coeff)>> = BTreeMap::new();
        for (&(r, c), x) in &other.entries {
            by_row.entry(r).or_default().push((c, x));
        }
        let mut out = SparseFieldMatrix::new(f, self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn sparse_rows(&self) -> Vec<BTreeMap<usize, Coeff>> {
        let mut rows = vec![BTreeMap::new(); self.rows];
        for (&(r, c), x) in &self.entries {
            rows[r].insert(c, x.clone());
        }
        rows
    }

    /// Gauss-Jordan elimination. Pivot rows are chosen by fewest nonzeros.
    pub fn echelon(&self) -> Echelon {
        let f = self.field;
        let mut pending: Vec<BTreeMap<usize, Coeff>> =
            self.sparse_rows().into_iter().filter(|r| !r.is_empty()).collect();
        let mut done: Vec<(usize, BTreeMap<usize, Coeff>)> = Vec::new();
        for c in 0..self.cols {
            let candidate = pending
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains_key(&c))
                .min_by_key(|(_, r)| r.len())
                .map(|(i, _)| i);
            let Some(pi) = candidate else { continue };
            let mut pivot = pending.swap_remove(pi);
            let inv = f.inv(&pivot[&c]).expect("nonzero pivot");
            for x in pivot.values_mut() {
                *x = f.mul(x, &inv);
            }
            for row in pending.iter_mut().chain(done.iter_mut().map(|(_, r)| r)) {
                if let Some(factor) = row.get(&c).cloned() {
                    for (&j, x) in &pivot {
                        let cur = row.remove(&j).unwrap_or_else(Coeff::zero);
                        let v = f.sub(&cur, &f.mul(&factor, x));
                        if !v.is_zero() {
                            row.insert(j, v);
                        }
                    }
                }
            }
            pending.retain(|r| !r.is_empty());
            done.push((c, pivot));
        }
        done.sort_by_key(|(c, _)| *c);
        Echelon { field: f, cols: self.cols, rows: done }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rows.len()
    }

    /// Rank and a kernel basis; every kernel vector is annihilated exactly.
    pub fn rank_kernel(&self) -> Result<(usize, Vec<Vec<Coeff>>)> {
        if let Field::Prime(p) = self.field {
            Field::prime(p)?;
        }
        let ech = self.echelon();
        let kernel = ech.kernel_basis();
        Ok((ech.rows.len(), kernel))
    }

    /// Some `x` with `self * x == b`, if one exists.
    pub fn solve(&self, b: &[Coeff]) -> Option<Vec<Coeff>> {
        assert_eq!(b.len(), self.rows);
        let f = self.field;
        let mut aug = self.clone();
        aug.cols += 1;
        for (r, x) in b.iter().enumerate() {
            aug.add_to(r, self.cols, x);
        }
        let ech = aug.echelon();
        let mut x = vec![Coeff::zero(); self.cols];
        for (c, row) in &ech.rows {
            if *c == self.cols {
                return None;
            }
            if let Some(v) = row.get(&self.cols) {
                x[*c] = v.clone();
            }
        }
        debug_assert_eq!(self.mul_vec(&x), b.iter().map(|v| f.reduce(v.clone())).collect::<Vec<_>>());
        Some(x)
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.iter().map(|(c, _)| *c).collect()
    }

    pub fn kernel_basis(&self) -> Vec<Vec<Coeff>> {
        let f = self.field;
        let pivots = self.pivot_columns();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Coeff::zero(); self.cols];
                v[fc] = f.one();
                for (pc, row) in &self.rows {
                    if let Some(x) = row.get(&fc) {
                        v[*pc] = f.neg(x);
                    }
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(field: Field, rows: &[&[i64]]) -> SparseFieldMatrix {
        let trip = rows.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, &x)| (r, c, field.from_int(x)))
        });
        SparseFieldMatrix::from_triplets(field, rows.len(), rows[0].len(), trip.collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_over_f5() {
        let m = dense(Field::Prime(5), &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let (rank, ker) = m.rank_kernel().unwrap();
        assert_eq!(rank, 3);
        assert!(ker.is_empty());
    }

    #[test]
    fn dependent_rows_over_f3() {
        let m = dense(Field::Prime(3), &[&[1, 2], &[2, 4]]);
        let (rank, ker) = m.rank_kernel().unwrap();
        assert_eq!(rank, 1);
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn zero_matrix_over_q() {
        let m = SparseFieldMatrix::new(Field::Rational, 2, 2);
        let (rank, ker) = m.rank_kernel().unwrap();
        assert_eq!((rank, ker.len()), (0, 2));
    }

    #[test]
    fn invalid_field_rejected() {
        let bad = SparseFieldMatrix::new(Field::Prime(2), 1, 1);
        assert!(bad.rank_kernel().is_err());
        assert!(SparseFieldMatrix::from_triplets(Field::Prime(9), 1, 1, vec![]).is_err());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let f = Field::Rational;
        let m = dense(f, &[&[1, 1], &[1, 1]]);
        assert!(m.solve(&[f.from_int(1), f.from_int(2)]).is_none());
        let x = m.solve(&[f.from_int(3), f.from_int(3)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![f.from_int(3), f.from_int(3)]);
    }
}
