//! Integer matrix families of fixed determinant m, the C_m condition, Hecke action on
//! Manin chains, and checkers for the function-level identities satisfied by such families.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::eisfun::{f2, fhat, FTable};
use crate::error::HeckeError;
use crate::exactnum::rational::{format_rational, int, parse_rational};
use crate::exactnum::{rat, CycloElem, Rational, Scalar};
use crate::modgroup::{GroupElem, LevelContext, PointN};
use crate::msym::ManinChain;

/// 2×2 integer matrix (a b; c d).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMat2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        IntMat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn neg(&self) -> Self {
        IntMat2 { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    /// (d −b; −c a)
    pub fn adjugate(&self) -> Self {
        IntMat2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    /// c·M·c with c = (−1 0; 0 1).
    pub fn c_conjugate(&self) -> Self {
        IntMat2 { a: self.a.clone(), b: -&self.b, c: -&self.c, d: self.d.clone() }
    }

    /// Sign representative of {M, −M}: first nonzero entry positive.
    pub fn canonical_sign(&self) -> Self {
        let first = [&self.a, &self.b, &self.c, &self.d].into_iter().find(|x| !x.is_zero());
        match first {
            Some(x) if x.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn entries_mod(&self, n: u32) -> [i64; 4] {
        let n = BigInt::from(n);
        [&self.a, &self.b, &self.c, &self.d].map(|x| x.mod_floor(&n).to_i64().unwrap())
    }

    /// Reduction into SL₂(Z/NZ)/±1; requires det ≡ 1 (mod N).
    pub fn reduce_mod(&self, n: u32) -> Option<GroupElem> {
        let [a, b, c, d] = self.entries_mod(n);
        GroupElem::new(a, b, c, d, n)
    }

    /// Column Hermite form (p 0; q r) of the lattice spanned by the columns; a complete
    /// invariant of the right coset M·SL₂(Z).
    pub fn column_hnf(&self) -> (BigInt, BigInt, BigInt) {
        let e = self.a.extended_gcd(&self.b);
        let mut p = e.gcd;
        // (x, y) completes to a unimodular column operation sending the first row to (p, 0)
        let mut q = &self.c * &e.x + &self.d * &e.y;
        let mut r = self.det() / &p;
        if r.is_negative() {
            r = -r;
        }
        if p.is_negative() {
            p = -p;
            q = -q;
        }
        q = q.mod_floor(&r);
        (p, q, r)
    }

    /// Image of the cusp x under the Möbius action.
    pub fn act_cusp(&self, x: &Cusp) -> Cusp {
        match x {
            Cusp::Infinity => Cusp::from_frac(&self.a, &self.c),
            Cusp::Finite(q) => {
                let num = &self.a * q.numer() + &self.b * q.denom();
                let den = &self.c * q.numer() + &self.d * q.denom();
                Cusp::from_frac(&num, &den)
            }
        }
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for IntMat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let e = [&self.a, &self.b, &self.c, &self.d].map(|x| x.to_string());
        [[&e[0], &e[1]], [&e[2], &e[3]]].serialize(s)
    }
}

/// A point of P¹(Q).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cusp {
    Infinity,
    Finite(Rational),
}

impl Cusp {
    pub fn from_frac(num: &BigInt, den: &BigInt) -> Cusp {
        if den.is_zero() {
            Cusp::Infinity
        } else {
            Cusp::Finite(Rational::new(num.clone(), den.clone()))
        }
    }

    pub fn zero() -> Cusp {
        Cusp::Finite(Rational::zero())
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cusp::Infinity => write!(f, "oo"),
            Cusp::Finite(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

/// Weighted family Σ u_M [M] of matrices of determinant m.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeFamily {
    m: BigInt,
    terms: Vec<(Rational, IntMat2)>,
}

impl HeckeFamily {
    pub fn new(m: BigInt, terms: Vec<(Rational, IntMat2)>) -> Result<Self, HeckeError> {
        if terms.is_empty() {
            return Err(HeckeError::Empty);
        }
        for (_, mat) in &terms {
            let det = mat.det();
            if det != m {
                return Err(HeckeError::Determinant {
                    matrix: mat.to_string(),
                    expected: m.to_string(),
                    found: det.to_string(),
                });
            }
        }
        Ok(HeckeFamily { m, terms })
    }

    pub fn identity() -> Self {
        HeckeFamily { m: BigInt::one(), terms: vec![(int(1), IntMat2::new(1, 0, 0, 1))] }
    }

    pub fn det(&self) -> &BigInt {
        &self.m
    }

    pub fn terms(&self) -> &[(Rational, IntMat2)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The family as a weighted multiset of matrices modulo ±1, zero weights dropped.
    pub fn multiset(&self) -> BTreeMap<IntMat2, Rational> {
        multiset_of(self.terms.iter().cloned())
    }

    pub fn commutes_with_c(&self) -> bool {
        let conj = multiset_of(self.terms.iter().map(|(u, m)| (u.clone(), m.c_conjugate())));
        conj == self.multiset()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(u, m)| json!({"weight": format_rational(u), "matrix": m})).collect())
    }
}

fn multiset_of(it: impl Iterator<Item = (Rational, IntMat2)>) -> BTreeMap<IntMat2, Rational> {
    let mut out: BTreeMap<IntMat2, Rational> = BTreeMap::new();
    for (u, m) in it {
        *out.entry(m.canonical_sign()).or_insert_with(Rational::zero) += u;
    }
    out.retain(|_, u| !Zero::is_zero(u));
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// σ(m): the number of sublattices of Z² of index m.
pub fn divisor_sum(m: u64) -> u64 {
    (1..=m).filter(|d| m.is_multiple_of(*d)).sum()
}

/// Smallest odd prime l with l ≡ 1 (mod N).
pub fn default_hecke_prime(n: u32) -> u64 {
    let n = n as u64;
    (1..).map(|k| k * n + 1).find(|&l| l % 2 == 1 && is_prime(l)).unwrap()
}

/// All (a b; c d) of determinant l with a > b ≥ 0 and d > c ≥ 0, weight 1.
pub fn heilbronn_family(l: u64) -> Result<HeckeFamily, HeckeError> {
    if !is_prime(l) {
        return Err(HeckeError::NotPrime(l));
    }
    let li = l as i64;
    let mut terms = Vec::new();
    // a·d − b·c ≥ a + d − 1 under the inequalities, so a + d ≤ l + 1
    for a in 1..=li {
        for d in 1..=(li + 1 - a) {
            for b in 0..a {
                for c in 0..d {
                    if a * d - b * c == li {
                        terms.push((int(1), IntMat2::new(a, b, c, d)));
                    }
                }
            }
        }
    }
    let fam = HeckeFamily::new(BigInt::from(l), terms)?;
    let rep = verify_cm(&fam);
    if !rep.pass {
        return Err(HeckeError::ConditionFailed(rep.failures.join("; ")));
    }
    Ok(fam)
}

#[derive(Clone, Debug, Serialize)]
pub struct CmReport {
    pub m: String,
    pub classes: usize,
    pub expected_classes: u64,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Check Σ_{M ∈ K} u_M (M∞ − M0) = ∞ − 0 for every right SL₂(Z)-coset K met by the
/// family, and that the cosets met are all σ(m) of them.
pub fn verify_cm(fam: &HeckeFamily) -> CmReport {
    let mut classes: BTreeMap<(BigInt, BigInt, BigInt), BTreeMap<Cusp, Rational>> = BTreeMap::new();
    for (u, m) in fam.terms() {
        let acc = classes.entry(m.column_hnf()).or_default();
        *acc.entry(m.act_cusp(&Cusp::Infinity)).or_insert_with(Rational::zero) += u;
        *acc.entry(m.act_cusp(&Cusp::zero())).or_insert_with(Rational::zero) -= u;
    }
    let mut target = BTreeMap::new();
    target.insert(Cusp::Infinity, int(1));
    target.insert(Cusp::zero(), int(-1));
    let mut failures = Vec::new();
    for (k, acc) in classes.iter_mut() {
        acc.retain(|_, u| !Zero::is_zero(u));
        if *acc != target {
            let got: Vec<String> = acc.iter().map(|(c, u)| format!("{}[{}]", format_rational(u), c)).collect();
            failures.push(format!("class ({} 0; {} {}): {}", k.0, k.1, k.2, got.join(" + ")));
        }
    }
    let expected = fam.det().to_u64().map(divisor_sum).unwrap_or(0);
    if classes.len() as u64 != expected {
        failures.push(format!("{} classes, expected {}", classes.len(), expected));
    }
    CmReport {
        m: fam.det().to_string(),
        classes: classes.len(),
        expected_classes: expected,
        pass: failures.is_empty(),
        failures,
    }
}

/// ½ Σ u_M ([M] + [cMc]), merged as a multiset modulo ±1.
pub fn symmetrize_c(fam: &HeckeFamily) -> Result<HeckeFamily, HeckeError> {
    let half = rat(1, 2);
    let ms = multiset_of(fam.terms().iter().flat_map(|(u, m)| {
        let w = u * &half;
        [(w.clone(), m.clone()), (w, m.c_conjugate())]
    }));
    let out = HeckeFamily::new(fam.det().clone(), ms.into_iter().map(|(m, u)| (u, m)).collect())?;
    let rep = verify_cm(&out);
    if !rep.pass {
        return Err(HeckeError::ConditionFailed(rep.failures.join("; ")));
    }
    if !out.commutes_with_c() {
        return Err(HeckeError::ConditionFailed("symmetrized family does not commute with c".into()));
    }
    Ok(out)
}

/// T ξ(g) = Σ u_M ξ(g·M̄).
pub fn hecke_act<C: Scalar>(
    fam: &HeckeFamily,
    chain: &ManinChain<C>,
    ctx: &LevelContext,
) -> Result<ManinChain<C>, HeckeError> {
    let n = ctx.level();
    if fam.det().mod_floor(&BigInt::from(n)) != BigInt::one() {
        return Err(HeckeError::NotOneModN(fam.det().to_string(), n));
    }
    let reduced: Vec<(Rational, GroupElem)> =
        fam.terms().iter().map(|(u, m)| (u.clone(), m.reduce_mod(n).expect("det ≡ 1 mod N"))).collect();
    let mut out = ManinChain::new(chain.level());
    for (g, c) in chain.terms() {
        for (u, mbar) in &reduced {
            out.add_term(ctx.mul(g, mbar), &c.scale(u));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GridFailure {
    pub s: (String, String),
    pub on_jump_set: bool,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FIdentityReport {
    pub level: u32,
    pub m: String,
    pub points: usize,
    pub failures: Vec<GridFailure>,
    pub failures_off_jump_set: usize,
    /// Holds off the jump set of B̄₁.
    pub pass: bool,
}

fn row_act(s: &(Rational, Rational), m: &IntMat2) -> (Rational, Rational) {
    let a = Rational::from_integer(m.a.clone());
    let b = Rational::from_integer(m.b.clone());
    let c = Rational::from_integer(m.c.clone());
    let d = Rational::from_integer(m.d.clone());
    (&s.0 * &a + &s.1 * &c, &s.0 * &b + &s.1 * &d)
}

fn touches_integer(p: &(Rational, Rational)) -> bool {
    p.0.is_integer() || p.1.is_integer()
}

/// Σ u_L f(sL) = m·f(s) + f(ms) on the grid s ∈ ((1/2N)Z / Z)², row action.
///
/// A grid point is on the jump set when some argument at which f is evaluated (s, ms, or
/// any sL) has an integral coordinate, i.e. sits on a discontinuity of B̄₁.
pub fn check_function_identity_f(fam: &HeckeFamily, n: u32) -> FIdentityReport {
    let m = Rational::from_integer(fam.det().clone());
    let k = 2 * n as i64;
    let mut failures = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let s = (rat(i, k), rat(j, k));
            let mut lhs = Rational::zero();
            let mut jump = touches_integer(&s);
            for (u, l) in fam.terms() {
                let t = row_act(&s, l);
                jump |= touches_integer(&t);
                lhs += u * f2(&t.0, &t.1);
            }
            let ms = (&s.0 * &m, &s.1 * &m);
            jump |= touches_integer(&ms);
            let rhs = &m * f2(&s.0, &s.1) + f2(&ms.0, &ms.1);
            if lhs != rhs {
                failures.push(GridFailure {
                    s: (format_rational(&s.0), format_rational(&s.1)),
                    on_jump_set: jump,
                    lhs: format_rational(&lhs),
                    rhs: format_rational(&rhs),
                });
            }
        }
    }
    let off = failures.iter().filter(|f| !f.on_jump_set).count();
    FIdentityReport {
        level: n,
        m: fam.det().to_string(),
        points: (k * k) as usize,
        failures,
        failures_off_jump_set: off,
        pass: off == 0,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointFailure {
    pub point: (u32, u32),
    pub lift: (i64, i64),
    pub lhs: Value,
    pub rhs: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointIdentityReport {
    pub level: u32,
    pub m: String,
    pub points: usize,
    pub failures: Vec<PointFailure>,
    pub pass: bool,
}

struct FhatCache<'a> {
    n: u32,
    ctx: &'a LevelContext,
    memo: HashMap<(i64, i64), CycloElem>,
}

impl FhatCache<'_> {
    fn get(&mut self, p: (i64, i64)) -> CycloElem {
        let k = 2 * self.n as i64;
        let key = (p.0.rem_euclid(k), p.1.rem_euclid(k));
        let (n, cyc) = (self.n, self.ctx.cyclo());
        self.memo.entry(key).or_insert_with(|| fhat(key, n, cyc)).clone()
    }
}

fn col_act_mod(m: &IntMat2, p: (i64, i64), k: u32) -> (i64, i64) {
    let [a, b, c, d] = m.entries_mod(k);
    let k = k as i64;
    ((a * p.0 + b * p.1).rem_euclid(k), (c * p.0 + d * p.1).rem_euclid(k))
}

/// Σ u_L f̂(L̃P) = m·f̂(mP) + f̂(P) at P = lift0(Q) for every Q ∈ (Z/NZ)².
pub fn check_function_identity_fhat(fam: &HeckeFamily, ctx: &LevelContext) -> PointIdentityReport {
    let n = ctx.level();
    let m = Rational::from_integer(fam.det().clone());
    let mi = fam.det().mod_floor(&BigInt::from(2 * n)).to_i64().unwrap();
    let mut cache = FhatCache { n, ctx, memo: HashMap::new() };
    let mut failures = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let q = ctx.point(u as i64, v as i64);
            let l0 = crate::modgroup::lift0(q, n);
            let p = (l0.u as i64, l0.v as i64);
            let mut lhs = CycloElem::zero(ctx.cyclo());
            for (w, l) in fam.terms() {
                let t = col_act_mod(&l.adjugate(), p, 2 * n);
                lhs.add_assign_ref(&cache.get(t).scale(w));
            }
            let rhs = &cache.get((mi * p.0, mi * p.1)).scale(&m) + &cache.get(p);
            if lhs != rhs {
                failures.push(PointFailure { point: (u, v), lift: p, lhs: lhs.to_json(), rhs: rhs.to_json() });
            }
        }
    }
    PointIdentityReport {
        level: n,
        m: fam.det().to_string(),
        points: (n * n) as usize,
        pass: failures.is_empty(),
        failures,
    }
}

/// Σ u_L F(LP) = F(P) + m·F(mP) for every P ∈ (Z/NZ)².
pub fn check_f_identity(fam: &HeckeFamily, ctx: &LevelContext, table: &FTable) -> PointIdentityReport {
    let n = ctx.level();
    let m = Rational::from_integer(fam.det().clone());
    let mi = fam.det().mod_floor(&BigInt::from(n)).to_i64().unwrap();
    let mut failures = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let p = (u as i64, v as i64);
            let mut lhs = CycloElem::zero(ctx.cyclo());
            for (w, l) in fam.terms() {
                let t = col_act_mod(l, p, n);
                lhs.add_assign_ref(&table.at(ctx.point(t.0, t.1)).scale(w));
            }
            let rhs = table.at(ctx.point(p.0, p.1)) + &table.at(ctx.point(mi * p.0, mi * p.1)).scale(&m);
            if lhs != rhs {
                failures.push(PointFailure { point: (u, v), lift: p, lhs: lhs.to_json(), rhs: rhs.to_json() });
            }
        }
    }
    PointIdentityReport {
        level: n,
        m: fam.det().to_string(),
        points: (n * n) as usize,
        pass: failures.is_empty(),
        failures,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub m: String,
    pub commutes_with_c: bool,
    pub h_relation: bool,
    pub identity_mod_2: bool,
    pub pass: bool,
    pub diff: Vec<String>,
}

const H: [i64; 4] = [1, 1, -1, 1];
const S: [i64; 4] = [0, -1, 1, 0];

fn mat(e: [i64; 4]) -> IntMat2 {
    IntMat2::new(e[0], e[1], e[2], e[3])
}

/// Relations expected of a θ family: θc = cθ; X = θH − Hθ̃ is fixed by left
/// multiplication by S (so X is a left multiple of [1] + [S]); every matrix ≡ 1 mod 2.
pub fn check_theta_relations(fam: &HeckeFamily) -> ThetaReport {
    let mut diff = Vec::new();
    let commutes = fam.commutes_with_c();
    if !commutes {
        let conj = multiset_of(fam.terms().iter().map(|(u, m)| (u.clone(), m.c_conjugate())));
        let ms = fam.multiset();
        for (m, u) in &ms {
            if conj.get(m) != Some(u) {
                diff.push(format!(
                    "c-commutation: {} has weight {} but its conjugate has {}",
                    m,
                    format_rational(u),
                    conj.get(m).map(format_rational).unwrap_or_else(|| "0".into())
                ));
            }
        }
        for m in conj.keys().filter(|m| !ms.contains_key(m)) {
            diff.push(format!("c-commutation: conjugate {m} missing from the family"));
        }
    }
    let h = mat(H);
    let x =
        multiset_of(fam.terms().iter().flat_map(|(u, m)| [(u.clone(), m.mul(&h)), (-u.clone(), h.mul(&m.adjugate()))]));
    let s = mat(S);
    let ix = multiset_of(x.iter().map(|(m, u)| (u.clone(), s.mul(m))));
    let h_rel = ix == x;
    if !h_rel {
        for (m, u) in &x {
            if ix.get(m) != Some(u) {
                diff.push(format!(
                    "H-relation: {} weight {} in X, {} in S·X",
                    m,
                    format_rational(u),
                    ix.get(m).map(format_rational).unwrap_or_else(|| "0".into())
                ));
            }
        }
    }
    let two = BigInt::from(2);
    let odd = |x: &BigInt| x.mod_floor(&two).is_one();
    let mut mod2 = true;
    for (_, m) in fam.terms() {
        if !(odd(&m.a) && !odd(&m.b) && !odd(&m.c) && odd(&m.d)) {
            mod2 = false;
            diff.push(format!("mod 2: {m} is not congruent to the identity"));
        }
    }
    ThetaReport {
        m: fam.det().to_string(),
        commutes_with_c: commutes,
        h_relation: h_rel,
        identity_mod_2: mod2,
        pass: commutes && h_rel && mod2,
        diff,
    }
}

/// Parse a θ family: one term per line, `weight a b c d`; blank lines and `#` comments skipped.
pub fn parse_theta(text: &str) -> Result<HeckeFamily, HeckeError> {
    let mut terms = Vec::new();
    let mut det: Option<BigInt> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| HeckeError::Parse { line: i + 1, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        let w = parse_rational(fields[0]).map_err(|e| err(e.to_string()))?;
        let mut e = Vec::with_capacity(4);
        for f in &fields[1..] {
            e.push(f.parse::<BigInt>().map_err(|_| err(format!("bad integer {f:?}")))?);
        }
        let m = IntMat2 { a: e[0].clone(), b: e[1].clone(), c: e[2].clone(), d: e[3].clone() };
        let dm = m.det();
        match &det {
            None if dm.is_positive() => det = Some(dm),
            None => return Err(err(format!("determinant {dm} is not positive"))),
            Some(d0) if *d0 != dm => {
                return Err(HeckeError::Determinant {
                    matrix: m.to_string(),
                    expected: d0.to_string(),
                    found: dm.to_string(),
                })
            }
            _ => {}
        }
        terms.push((w, m));
    }
    HeckeFamily::new(det.ok_or(HeckeError::Empty)?, terms)
}

pub fn load_theta(path: &Path) -> Result<HeckeFamily, crate::Error> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_theta(&text)?)
}

/// Render a family in the θ file format.
pub fn format_theta(fam: &HeckeFamily) -> String {
    fam.terms().iter().map(|(u, m)| format!("{} {} {} {} {}\n", format_rational(u), m.a, m.b, m.c, m.d)).collect()
}

/// Point P mapped by an integer matrix, reduced mod N.
pub fn act_point(m: &IntMat2, p: PointN, n: u32) -> PointN {
    let t = col_act_mod(m, (p.u as i64, p.v as i64), n);
    PointN::new(t.0, t.1, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    #[test]
    fn heilbronn_small() {
        let f2 = heilbronn_family(2).unwrap();
        let mut got: Vec<IntMat2> = f2.terms().iter().map(|(_, m)| m.clone()).collect();
        got.sort();
        let mut want = vec![
            IntMat2::new(1, 0, 0, 2),
            IntMat2::new(2, 0, 0, 1),
            IntMat2::new(2, 1, 0, 1),
            IntMat2::new(1, 0, 1, 2),
        ];
        want.sort();
        assert_eq!(got, want);
        let f3 = heilbronn_family(3).unwrap();
        assert_eq!(f3.len(), 7);
        assert!(f3.terms().iter().any(|(_, m)| *m == IntMat2::new(2, 1, 1, 2)));
    }

    #[test]
    fn heilbronn_sizes_and_cm() {
        for (l, size) in [(2, 4), (3, 7), (5, 15), (7, 25), (11, 49), (13, 63)] {
            let f = heilbronn_family(l).unwrap();
            assert_eq!(f.len(), size);
            let r = verify_cm(&f);
            assert!(r.pass, "{:?}", r.failures);
            assert_eq!(r.classes as u64, l + 1);
        }
    }

    #[test]
    fn non_prime_rejected() {
        assert!(matches!(heilbronn_family(9), Err(HeckeError::NotPrime(9))));
    }

    #[test]
    fn cm_identity_family() {
        let r = verify_cm(&HeckeFamily::identity());
        assert!(r.pass);
        assert_eq!(r.classes, 1);
    }

    #[test]
    fn cm_detects_missing_class() {
        let f = HeckeFamily::new(BigInt::from(3), vec![(int(1), IntMat2::new(1, 0, 0, 3))]).unwrap();
        assert!(!verify_cm(&f).pass);
    }

    #[test]
    fn hnf_is_coset_invariant() {
        let m = IntMat2::new(2, 1, 1, 2);
        let t = IntMat2::new(1, 1, 0, 1);
        let s = IntMat2::new(0, -1, 1, 0);
        let h = m.column_hnf();
        assert_eq!(m.mul(&t).column_hnf(), h);
        assert_eq!(m.mul(&s).column_hnf(), h);
        assert_eq!(m.mul(&t).mul(&s).mul(&t).column_hnf(), h);
        assert_ne!(IntMat2::new(3, 0, 0, 1).column_hnf(), IntMat2::new(1, 0, 0, 3).column_hnf());
    }

    #[test]
    fn symmetrization() {
        for l in [3, 5, 7] {
            let f = heilbronn_family(l).unwrap();
            let s = symmetrize_c(&f).unwrap();
            assert!(s.commutes_with_c());
            assert!(verify_cm(&s).pass);
            assert_eq!(symmetrize_c(&s).unwrap().multiset(), s.multiset());
        }
    }

    #[test]
    fn hecke_act_identity_and_counts() {
        let ctx = LevelContext::new(3).unwrap();
        let ch = ManinChain::generator(3, ctx.identity(), int(1));
        assert_eq!(hecke_act(&HeckeFamily::identity(), &ch, &ctx).unwrap(), ch);
        let f7 = heilbronn_family(7).unwrap();
        let out = hecke_act(&f7, &ch, &ctx).unwrap();
        let total: Rational = out.terms().values().map(|c| c.abs()).sum();
        assert!(total <= int(25));
        let f5 = heilbronn_family(5).unwrap();
        assert!(matches!(hecke_act(&f5, &ch, &ctx), Err(HeckeError::NotOneModN(..))));
    }

    #[test]
    fn theta_relations_identity() {
        let r = check_theta_relations(&HeckeFamily::identity());
        assert!(r.pass, "{:?}", r.diff);
    }

    #[test]
    fn theta_parse_round_trip() {
        let text = "# theta\n1 1 0 0 3\n-1/2 3 0 0 1\n\n";
        let f = parse_theta(text).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(parse_theta(&format_theta(&f)).unwrap(), f);
        assert!(matches!(parse_theta("1 1 0 0 3\n1 1 0 0 5\n"), Err(HeckeError::Determinant { .. })));
        assert!(matches!(parse_theta("1 1 0 0\n"), Err(HeckeError::Parse { line: 1, .. })));
        assert!(matches!(parse_theta("# nothing\n"), Err(HeckeError::Empty)));
    }

    #[test]
    fn f_identity_failure_counts() {
        // counts cross-checked with an independent rational evaluation
        let f5 = symmetrize_c(&heilbronn_family(5).unwrap()).unwrap();
        let r = check_function_identity_f(&f5, 3);
        assert_eq!((r.failures.len(), r.failures_off_jump_set), (16, 0));
        let f3 = symmetrize_c(&heilbronn_family(3).unwrap()).unwrap();
        let r = check_function_identity_f(&f3, 5);
        assert_eq!((r.failures.len(), r.failures_off_jump_set), (64, 24));
        assert!(!r.failures.iter().any(|x| x.s == ("0".to_string(), "0".to_string())));
        let ctx = LevelContext::new(3).unwrap();
        assert_eq!(check_function_identity_fhat(&f5, &ctx).failures.len(), 4);
    }
}
