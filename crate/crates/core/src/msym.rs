//! Manin symbols: the free module on SL₂(Z/NZ)/±1, its quotient V_N by the two- and
//! three-term relations, and the boundary map to divisors on the cusps.
//!
//! Orientation: δ(ξ(g)) = [g·P∞] − [g·P₀], i.e. first column minus second column.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::LevelError;
use crate::exactnum::rational::{format_rational, int, parse_rational};
use crate::exactnum::{Rational, Scalar};
use crate::linalg::{Echelon, SparseVec};
use crate::modgroup::{cusp_count, genus, Column, GroupElem, LevelContext, PointClass};

/// Sparse formal combination of Manin generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ManinChain<C> {
    level: u32,
    terms: BTreeMap<GroupElem, C>,
}

impl<C: Scalar> ManinChain<C> {
    pub fn new(level: u32) -> Self {
        ManinChain { level, terms: BTreeMap::new() }
    }

    pub fn generator(level: u32, g: GroupElem, one: C) -> Self {
        let mut c = Self::new(level);
        c.add_term(g, &one);
        c
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<GroupElem, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, g: GroupElem, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(e) => {
                e.add_assign_ref(c);
                if e.is_zero() {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, c.clone());
            }
        }
    }

    pub fn add_chain(&mut self, o: &Self) {
        assert_eq!(self.level, o.level, "chains of different levels");
        for (g, c) in &o.terms {
            self.add_term(*g, c);
        }
    }

    pub fn scaled(&self, k: &C) -> Self {
        let mut out = Self::new(self.level);
        for (g, c) in &self.terms {
            out.add_term(*g, &c.mul_ref(k));
        }
        out
    }

    pub fn scaled_rational(&self, q: &Rational) -> Self {
        let mut out = Self::new(self.level);
        for (g, c) in &self.terms {
            out.add_term(*g, &c.scale(q));
        }
        out
    }

    /// ξ(γ) ↦ ξ(hγ)
    pub fn left_translate(&self, h: &GroupElem, ctx: &LevelContext) -> Self {
        let mut out = Self::new(self.level);
        for (g, c) in &self.terms {
            out.add_term(ctx.mul(h, g), c);
        }
        out
    }

    /// ξ(γ) ↦ ξ(γh)
    pub fn right_translate(&self, h: &GroupElem, ctx: &LevelContext) -> Self {
        let mut out = Self::new(self.level);
        for (g, c) in &self.terms {
            out.add_term(ctx.mul(g, h), c);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(g, c)| json!({"g": g, "coeff": c.to_json()})).collect())
    }
}

/// Sparse divisor supported on the cusp set C_N.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspDivisor<C> {
    level: u32,
    terms: BTreeMap<PointClass, C>,
}

impl<C: Scalar> CuspDivisor<C> {
    pub fn new(level: u32) -> Self {
        CuspDivisor { level, terms: BTreeMap::new() }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<PointClass, C> {
        &self.terms
    }

    pub fn coeff(&self, q: &PointClass) -> Option<&C> {
        self.terms.get(q)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, q: PointClass, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&q) {
            Some(e) => {
                e.add_assign_ref(c);
                if e.is_zero() {
                    self.terms.remove(&q);
                }
            }
            None => {
                self.terms.insert(q, c.clone());
            }
        }
    }

    pub fn add_divisor(&mut self, o: &Self) {
        for (q, c) in &o.terms {
            self.add_term(*q, c);
        }
    }

    pub fn scaled_rational(&self, k: &Rational) -> Self {
        let mut out = Self::new(self.level);
        for (q, c) in &self.terms {
            out.add_term(*q, &c.scale(k));
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (q, c) in &o.terms {
            out.add_term(*q, &c.neg());
        }
        out
    }

    /// Coefficient sum; `None` for the empty divisor.
    pub fn degree(&self) -> Option<C> {
        let mut it = self.terms.values();
        let mut acc = it.next()?.clone();
        for c in it {
            acc.add_assign_ref(c);
        }
        Some(acc)
    }

    pub fn has_degree_zero(&self) -> bool {
        self.degree().is_none_or(|d| d.is_zero())
    }

    /// Q ↦ hQ
    pub fn translate(&self, h: &GroupElem, ctx: &LevelContext) -> Self {
        let mut out = Self::new(self.level);
        for (q, c) in &self.terms {
            out.add_term(ctx.act(h, *q), c);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(q, c)| json!({"cusp": q, "coeff": c.to_json()})).collect())
    }
}

/// δ on a single generator.
pub fn boundary_generator<C: Scalar>(g: &GroupElem, c: &C, n: u32, out: &mut CuspDivisor<C>) {
    out.add_term(g.cusp_of_column(Column::First, n), c);
    out.add_term(g.cusp_of_column(Column::Second, n), &c.neg());
}

pub fn boundary<C: Scalar>(chain: &ManinChain<C>) -> CuspDivisor<C> {
    let n = chain.level();
    let mut out = CuspDivisor::new(n);
    for (g, c) in chain.terms() {
        boundary_generator(g, c, n, &mut out);
    }
    out
}

/// 2g + c − 1
pub fn expected_dim(n: u32) -> u64 {
    2 * genus(n) + cusp_count(n) - 1
}

/// The quotient V_N with a fixed basis of generator classes and the coordinates of every
/// generator in that basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationBasis {
    level: u32,
    basis: Vec<GroupElem>,
    coords: Vec<Vec<(usize, Rational)>>,
}

impl RelationBasis {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Generators whose classes form the basis of V_N.
    pub fn basis(&self) -> &[GroupElem] {
        &self.basis
    }

    /// Coordinates of ξ(g).
    pub fn coords_of(&self, g: &GroupElem, ctx: &LevelContext) -> &[(usize, Rational)] {
        &self.coords[ctx.index_of(g)]
    }

    pub fn reduce<C: Scalar>(&self, chain: &ManinChain<C>, ctx: &LevelContext) -> Result<SparseVec<C>, LevelError> {
        if chain.level() != self.level {
            return Err(LevelError::LevelMismatch { expected: self.level, found: chain.level() });
        }
        let mut out = SparseVec::new();
        for (g, c) in chain.terms() {
            for (j, q) in self.coords_of(g, ctx) {
                add_entry(&mut out, *j, c.scale(q));
            }
        }
        Ok(out)
    }

    /// The chain Σ v_j ξ(basis_j).
    pub fn lift<C: Scalar>(&self, v: &SparseVec<C>) -> ManinChain<C> {
        let mut out = ManinChain::new(self.level);
        for (j, c) in v {
            out.add_term(self.basis[*j], c);
        }
        out
    }

    pub fn to_data(&self, ctx: &LevelContext) -> RelationBasisData {
        RelationBasisData {
            level: self.level,
            group_size: ctx.group().len(),
            basis: self.basis.iter().map(|g| ctx.index_of(g)).collect(),
            coords: self.coords.iter().map(|v| v.iter().map(|(j, q)| (*j, format_rational(q))).collect()).collect(),
        }
    }

    pub fn from_data(data: &RelationBasisData, ctx: &LevelContext) -> Option<Self> {
        if data.level != ctx.level() || data.group_size != ctx.group().len() {
            return None;
        }
        if data.coords.len() != data.group_size || data.basis.iter().any(|&i| i >= data.group_size) {
            return None;
        }
        let dim = data.basis.len();
        let mut coords = Vec::with_capacity(data.coords.len());
        for v in &data.coords {
            let mut row = Vec::with_capacity(v.len());
            for (j, s) in v {
                if *j >= dim {
                    return None;
                }
                row.push((*j, parse_rational(s).ok()?));
            }
            coords.push(row);
        }
        Some(RelationBasis { level: data.level, basis: data.basis.iter().map(|&i| ctx.group()[i]).collect(), coords })
    }
}

fn add_entry<C: Scalar>(v: &mut SparseVec<C>, j: usize, t: C) {
    match v.get_mut(&j) {
        Some(e) => {
            e.add_assign_ref(&t);
            if e.is_zero() {
                v.remove(&j);
            }
        }
        None => {
            if !t.is_zero() {
                v.insert(j, t);
            }
        }
    }
}

/// Serializable form of [`RelationBasis`] used by the on-disk cache.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RelationBasisData {
    pub level: u32,
    pub group_size: usize,
    pub basis: Vec<usize>,
    pub coords: Vec<Vec<(usize, String)>>,
}

/// Eliminate the Manin relations and pick the free S-orbits as a basis of V_N.
pub fn build_quotient(ctx: &LevelContext) -> RelationBasis {
    let group = ctx.group();
    let s = ctx.s();
    let u = ctx.u();
    let u2 = ctx.mul(&u, &u);
    // each S-orbit {g, gS} is one unknown; ξ(gS) = −ξ(g)
    let mut orbit = vec![(usize::MAX, 0i64); group.len()];
    let mut ncols = 0;
    for (i, g) in group.iter().enumerate() {
        if orbit[i].0 != usize::MAX {
            continue;
        }
        let j = ctx.index_of(&ctx.mul(g, &s));
        orbit[i] = (ncols, 1);
        orbit[j] = (ncols, -1);
        ncols += 1;
    }
    let mut seen = vec![false; group.len()];
    let mut ech: Echelon<Rational> = Echelon::new(ncols);
    for (i, g) in group.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let mut row = SparseVec::new();
        for h in [*g, ctx.mul(g, &u), ctx.mul(g, &u2)] {
            let k = ctx.index_of(&h);
            seen[k] = true;
            let (col, sign) = orbit[k];
            add_entry(&mut row, col, int(sign));
        }
        ech.insert(row);
    }
    ech.make_reduced();
    let free = ech.free_columns();
    let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let col_coords: Vec<Vec<(usize, Rational)>> = (0..ncols)
        .map(|c| match pos.get(&c) {
            Some(&k) => vec![(k, int(1))],
            None => ech
                .row(c)
                .expect("non-free column is a pivot")
                .iter()
                .filter(|(j, _)| **j != c)
                .map(|(j, x)| (pos[j], -x))
                .collect(),
        })
        .collect();
    let coords = orbit
        .iter()
        .map(|&(col, sign)| col_coords[col].iter().map(|(k, x)| (*k, if sign > 0 { x.clone() } else { -x })).collect())
        .collect();
    // the generator representing each free orbit is its sign +1 member
    let mut basis = vec![None; free.len()];
    for (i, &(col, sign)) in orbit.iter().enumerate() {
        if sign > 0 {
            if let Some(&k) = pos.get(&col) {
                basis[k] = Some(group[i]);
            }
        }
    }
    RelationBasis {
        level: ctx.level(),
        basis: basis.into_iter().map(|g| g.expect("every orbit has a representative")).collect(),
        coords,
    }
}

/// Matrix of δ on V_N: one sparse row per cusp, columns indexed by the basis of V_N.
pub fn boundary_rows(ctx: &LevelContext, basis: &RelationBasis) -> Vec<SparseVec<Rational>> {
    let mut rows = vec![SparseVec::new(); ctx.cusps().len()];
    for (j, g) in basis.basis().iter().enumerate() {
        let mut d = CuspDivisor::new(ctx.level());
        boundary_generator(g, &int(1), ctx.level(), &mut d);
        for (q, c) in d.terms() {
            let i = ctx.cusp_index(q).expect("column of an SL2 matrix has full order");
            rows[i].insert(j, c.clone());
        }
    }
    rows
}

pub fn boundary_rank(ctx: &LevelContext, basis: &RelationBasis) -> usize {
    crate::linalg::rank(basis.dim(), boundary_rows(ctx, basis))
}

/// Basis of ker(δ) ⊂ V_N in V_N coordinates.
pub fn boundary_kernel(ctx: &LevelContext, basis: &RelationBasis) -> Vec<SparseVec<Rational>> {
    let mut e = Echelon::new(basis.dim());
    for r in boundary_rows(ctx, basis) {
        e.insert(r);
    }
    e.make_reduced();
    e.nullspace(&int(1))
}
