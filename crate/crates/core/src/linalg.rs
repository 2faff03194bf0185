//! Sparse Gaussian elimination over an exact field.

use std::collections::BTreeMap;

use crate::exactnum::{FieldScalar, Scalar};

/// A sparse vector: column index to nonzero entry.
pub type SparseVec<F> = BTreeMap<usize, F>;

/// v += k·w
pub fn axpy<F: Scalar>(v: &mut SparseVec<F>, k: &F, w: &SparseVec<F>) {
    for (c, x) in w {
        let t = k.mul_ref(x);
        match v.get_mut(c) {
            Some(e) => {
                e.add_assign_ref(&t);
                if e.is_zero() {
                    v.remove(c);
                }
            }
            None => {
                v.insert(*c, t);
            }
        }
    }
}

/// Rows in echelon form, one per pivot column, each normalized to a leading 1.
#[derive(Debug, Clone)]
pub struct Echelon<F> {
    ncols: usize,
    rows: BTreeMap<usize, SparseVec<F>>,
}

impl<F: FieldScalar> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduce `v` against the current pivots. The result has no entry in any pivot column.
    pub fn reduce(&self, mut v: SparseVec<F>) -> SparseVec<F> {
        let mut cursor = 0;
        loop {
            let next = v.range(cursor..).map(|(c, _)| *c).find(|c| self.rows.contains_key(c));
            let Some(c) = next else { break };
            let k = v[&c].neg();
            axpy(&mut v, &k, &self.rows[&c]);
            cursor = c + 1;
        }
        v
    }

    /// Insert a vector; returns true if it increased the rank.
    pub fn insert(&mut self, v: SparseVec<F>) -> bool {
        let v = self.reduce(v);
        let Some((&c, lead)) = v.iter().next() else { return false };
        let inv = lead.inv().expect("nonzero leading entry is invertible");
        let row: SparseVec<F> = v.into_iter().map(|(j, x)| (j, x.mul_ref(&inv))).collect();
        self.rows.insert(c, row);
        true
    }

    /// Clear entries above every pivot, giving reduced row echelon form.
    pub fn make_reduced(&mut self) {
        let pivots: Vec<usize> = self.rows.keys().rev().copied().collect();
        for (i, &p) in pivots.iter().enumerate() {
            let prow = self.rows[&p].clone();
            for &q in &pivots[i + 1..] {
                let row = self.rows.get_mut(&q).unwrap();
                if let Some(x) = row.get(&p).cloned() {
                    axpy(row, &x.neg(), &prow);
                }
            }
        }
    }

    pub fn row(&self, pivot: usize) -> Option<&SparseVec<F>> {
        self.rows.get(&pivot)
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.rows.contains_key(c)).collect()
    }

    /// Basis of the null space, one vector per free column. Requires reduced form.
    pub fn nullspace(&self, one: &F) -> Vec<SparseVec<F>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = SparseVec::new();
                v.insert(f, one.clone());
                for (&p, row) in &self.rows {
                    if let Some(x) = row.get(&f) {
                        v.insert(p, x.neg());
                    }
                }
                v
            })
            .collect()
    }
}

/// Rank of a family of sparse vectors.
pub fn rank<F: FieldScalar>(ncols: usize, vecs: impl IntoIterator<Item = SparseVec<F>>) -> usize {
    let mut e = Echelon::new(ncols);
    for v in vecs {
        e.insert(v);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::exactnum::Rational;

    fn sv(entries: &[(usize, i64)]) -> SparseVec<Rational> {
        entries.iter().map(|(c, x)| (*c, int(*x))).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![sv(&[(0, 1), (1, 2)]), sv(&[(0, 2), (1, 4)]), sv(&[(2, 1)])];
        assert_eq!(rank(3, rows), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let mut e = Echelon::new(4);
        e.insert(sv(&[(0, 1), (1, 1), (2, 1)]));
        e.insert(sv(&[(1, 1), (3, -1)]));
        e.make_reduced();
        let ns = e.nullspace(&int(1));
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in [sv(&[(0, 1), (1, 1), (2, 1)]), sv(&[(1, 1), (3, -1)])] {
                let dot: Rational = r.iter().filter_map(|(c, x)| v.get(c).map(|y| x * y)).sum();
                assert_eq!(dot, int(0));
            }
        }
    }

    #[test]
    fn reduce_clears_pivots() {
        let mut e = Echelon::new(3);
        e.insert(sv(&[(0, 2), (2, 1)]));
        let r = e.reduce(sv(&[(0, 1), (1, 1)]));
        assert!(!r.contains_key(&0));
        assert_eq!(r[&2], crate::exactnum::rat(-1, 2));
    }
}
