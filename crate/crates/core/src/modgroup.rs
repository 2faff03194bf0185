//! (Z/NZ)², SL₂(Z/NZ)/{±1}, the odd lift to (Z/2NZ)², and the cusp set C_N.
//!
//! Group elements act on column vectors from the left. The cusp ∞ corresponds to
//! P∞ = (1,0)ᵗ and 0 to P₀ = (0,1)ᵗ, so the columns of g are the classes of g∞ and g0.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::ser::{Serialize, Serializer};

use crate::error::LevelError;
use crate::exactnum::CycloContext;

/// A point of (Z/NZ)², column convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointN {
    pub u: u32,
    pub v: u32,
}

impl PointN {
    pub fn new(u: i64, v: i64, n: u32) -> Self {
        PointN { u: u.rem_euclid(n as i64) as u32, v: v.rem_euclid(n as i64) as u32 }
    }

    pub fn neg(self, n: u32) -> Self {
        PointN::new(-(self.u as i64), -(self.v as i64), n)
    }

    pub fn scale(self, k: i64, n: u32) -> Self {
        PointN::new(k * self.u as i64, k * self.v as i64, n)
    }

    pub fn class(self, n: u32) -> PointClass {
        let m = self.neg(n);
        let (u, v) = (self.u, self.v).min((m.u, m.v));
        PointClass { u, v }
    }

    /// Additive order in (Z/NZ)².
    pub fn order(self, n: u32) -> u32 {
        let g = n.gcd(&self.u).gcd(&self.v);
        n / g
    }
}

/// A class of (Z/NZ)²/{±1}, stored as its lexicographically smallest representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointClass {
    pub u: u32,
    pub v: u32,
}

impl PointClass {
    pub fn rep(self) -> PointN {
        PointN { u: self.u, v: self.v }
    }

    pub fn order(self, n: u32) -> u32 {
        self.rep().order(n)
    }
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

impl Serialize for PointClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.u, self.v].serialize(s)
    }
}

/// An element of SL₂(Z/NZ)/{±1} stored as its lexicographically smallest sign choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl GroupElem {
    /// Canonical class of the matrix (a b; c d) mod N, or `None` if its determinant is not 1.
    pub fn new(a: i64, b: i64, c: i64, d: i64, n: u32) -> Option<Self> {
        let m = n as i64;
        let r = |x: i64| x.rem_euclid(m);
        let (a, b, c, d) = (r(a), r(b), r(c), r(d));
        if (a * d - b * c).rem_euclid(m) != 1 % m {
            return None;
        }
        let pos = (a as u32, b as u32, c as u32, d as u32);
        let neg = (r(-a) as u32, r(-b) as u32, r(-c) as u32, r(-d) as u32);
        let (a, b, c, d) = pos.min(neg);
        Some(GroupElem { a, b, c, d })
    }

    pub fn identity(n: u32) -> Self {
        GroupElem::new(1, 0, 0, 1, n).unwrap()
    }

    /// S = (0 -1; 1 0)
    pub fn s(n: u32) -> Self {
        GroupElem::new(0, -1, 1, 0, n).unwrap()
    }

    /// T = (1 1; 0 1)
    pub fn t(n: u32) -> Self {
        GroupElem::new(1, 1, 0, 1, n).unwrap()
    }

    /// U = ST = (0 -1; 1 1)
    pub fn u(n: u32) -> Self {
        GroupElem::new(0, -1, 1, 1, n).unwrap()
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a as i64, self.b as i64, self.c as i64, self.d as i64]
    }

    pub fn mul(&self, o: &Self, n: u32) -> Self {
        let [a, b, c, d] = self.entries();
        let [e, f, g, h] = o.entries();
        GroupElem::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, n)
            .expect("product of determinant-one matrices")
    }

    pub fn inv(&self, n: u32) -> Self {
        let [a, b, c, d] = self.entries();
        GroupElem::new(d, -b, -c, a, n).unwrap()
    }

    pub fn act_point(&self, p: PointN, n: u32) -> PointN {
        let [a, b, c, d] = self.entries();
        let (u, v) = (p.u as i64, p.v as i64);
        PointN::new(a * u + b * v, c * u + d * v, n)
    }

    /// Left action on ±-classes.
    pub fn act(&self, p: PointClass, n: u32) -> PointClass {
        self.act_point(p.rep(), n).class(n)
    }

    /// First column is the cusp g∞, second column g0.
    pub fn cusp_of_column(&self, which: Column, n: u32) -> PointClass {
        match which {
            Column::First => PointN::new(self.a as i64, self.c as i64, n).class(n),
            Column::Second => PointN::new(self.b as i64, self.d as i64, n).class(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    First,
    Second,
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for GroupElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [[self.a, self.b], [self.c, self.d]].serialize(s)
    }
}

/// A point of (Z/2NZ)² congruent to a given point mod N and to (1,1) mod 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lift0 {
    pub u: u32,
    pub v: u32,
}

/// The unique odd lift of `p` to (Z/2NZ)² (CRT with N odd).
pub fn lift0(p: PointN, n: u32) -> Lift0 {
    debug_assert!(n % 2 == 1);
    let odd = |x: u32| if x % 2 == 1 { x } else { x + n };
    Lift0 { u: odd(p.u % n), v: odd(p.v % n) }
}

pub fn validate_level(n: u32) -> Result<(), LevelError> {
    if n.is_multiple_of(2) {
        return Err(LevelError::EvenLevel(n));
    }
    if n < 3 {
        return Err(LevelError::TooSmall(n));
    }
    Ok(())
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// d = N³ Π_{p|N} (1 − p⁻²) / 2, the order of SL₂(Z/NZ)/{±1}.
pub fn group_order(n: u32) -> u64 {
    let n = n as u64;
    let mut d = n * n * n;
    for p in prime_factors(n) {
        d = d / (p * p) * (p * p - 1);
    }
    d / 2
}

/// |C_N| = N² Π_{p|N} (1 − p⁻²) / 2 = d / N.
pub fn cusp_count(n: u32) -> u64 {
    group_order(n) / n as u64
}

/// Genus of X(N) from g = 1 + d(N − 6)/(12N).
pub fn genus(n: u32) -> u64 {
    let d = group_order(n) as i64;
    let n = n as i64;
    let num = d * (n - 6);
    assert_eq!(num % (12 * n), 0, "genus formula must be integral");
    (1 + num / (12 * n)) as u64
}

pub fn enumerate_group(n: u32) -> Result<Vec<GroupElem>, LevelError> {
    validate_level(n)?;
    let m = n as i64;
    let mut out = Vec::with_capacity(group_order(n) as usize);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if let Some(g) = GroupElem::new(a, b, c, d, n) {
                        // keep only the canonical sign choice
                        if g.entries() == [a, b, c, d] {
                            out.push(g);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn enumerate_cusps(n: u32) -> Result<Vec<PointClass>, LevelError> {
    validate_level(n)?;
    let mut out: Vec<PointClass> = (0..n)
        .flat_map(|u| (0..n).map(move |v| PointN { u, v }))
        .filter(|p| p.order(n) == n)
        .map(|p| p.class(n))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// All ±-classes of (Z/NZ)², including lower-order points.
pub fn enumerate_point_classes(n: u32) -> Vec<PointClass> {
    let mut out: Vec<PointClass> = (0..n).flat_map(|u| (0..n).map(move |v| PointN { u, v }.class(n))).collect();
    out.sort();
    out.dedup();
    out
}

/// Units of Z/NZ in increasing order.
pub fn units(n: u32) -> Vec<u32> {
    (1..n).filter(|k| k.gcd(&n) == 1).collect()
}

/// Immutable per-level data shared by every computation at level N.
#[derive(Debug)]
pub struct LevelContext {
    n: u32,
    group: Vec<GroupElem>,
    index: HashMap<GroupElem, usize>,
    cusps: Vec<PointClass>,
    cusp_index: HashMap<PointClass, usize>,
    cyclo: Arc<CycloContext>,
}

impl LevelContext {
    pub fn new(n: u32) -> Result<Self, LevelError> {
        let group = enumerate_group(n)?;
        let cusps = enumerate_cusps(n)?;
        let index = group.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let cusp_index = cusps.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        Ok(LevelContext { n, group, index, cusps, cusp_index, cyclo: CycloContext::get(2 * n) })
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn group(&self) -> &[GroupElem] {
        &self.group
    }

    pub fn index_of(&self, g: &GroupElem) -> usize {
        self.index[g]
    }

    pub fn cusps(&self) -> &[PointClass] {
        &self.cusps
    }

    pub fn cusp_index(&self, p: &PointClass) -> Option<usize> {
        self.cusp_index.get(p).copied()
    }

    /// The field Q(ζ_{2N}) housing cos(πx/N) and e(x/2N).
    pub fn cyclo(&self) -> &Arc<CycloContext> {
        &self.cyclo
    }

    pub fn point(&self, u: i64, v: i64) -> PointN {
        PointN::new(u, v, self.n)
    }

    pub fn class(&self, u: i64, v: i64) -> PointClass {
        self.point(u, v).class(self.n)
    }

    pub fn mul(&self, g: &GroupElem, h: &GroupElem) -> GroupElem {
        g.mul(h, self.n)
    }

    pub fn inv(&self, g: &GroupElem) -> GroupElem {
        g.inv(self.n)
    }

    pub fn act(&self, g: &GroupElem, p: PointClass) -> PointClass {
        g.act(p, self.n)
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem::identity(self.n)
    }

    pub fn s(&self) -> GroupElem {
        GroupElem::s(self.n)
    }

    pub fn t(&self) -> GroupElem {
        GroupElem::t(self.n)
    }

    pub fn u(&self) -> GroupElem {
        GroupElem::u(self.n)
    }
}
