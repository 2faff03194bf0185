use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hp::HpComplex;
use super::poly::{cyclotomic_poly, euler_phi, qinv_mod};
use super::rational::{format_rational, Rational};
use crate::error::ExactError;

/// The field Q(ζ_K) presented as Q[x]/Φ_K(x), x ↦ e(1/K).
#[derive(Debug)]
pub struct CycloContext {
    order: u32,
    /// Φ_K, monic, low degree first.
    phi: Vec<BigInt>,
    /// `powers[k]` is x^k mod Φ_K for 0 ≤ k < K.
    powers: Vec<Vec<BigInt>>,
}

static CONTEXTS: OnceLock<Mutex<HashMap<u32, Arc<CycloContext>>>> = OnceLock::new();

impl CycloContext {
    /// Shared context for order `k`; contexts are built once per process.
    pub fn get(k: u32) -> Arc<CycloContext> {
        let map = CONTEXTS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = map.lock().expect("cyclotomic context cache poisoned");
        map.entry(k).or_insert_with(|| Arc::new(CycloContext::build(k))).clone()
    }

    fn build(k: u32) -> Self {
        let phi = cyclotomic_poly(k);
        let deg = phi.len() - 1;
        assert_eq!(deg as u64, euler_phi(k as u64));
        let mut powers = Vec::with_capacity(k as usize);
        let mut cur = vec![BigInt::zero(); deg];
        cur[0] = BigInt::one();
        for _ in 0..k {
            powers.push(cur.clone());
            // multiply by x and reduce the overflow coefficient with Φ_K
            let top = cur.pop().unwrap_or_default();
            cur.insert(0, BigInt::zero());
            if !top.is_zero() {
                for (j, c) in phi.iter().take(deg).enumerate() {
                    cur[j] -= &top * c;
                }
            }
        }
        CycloContext { order: k, phi, powers }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn phi(&self) -> &[BigInt] {
        &self.phi
    }

    fn reduce(&self, mut coeffs: Vec<Rational>) -> Vec<Rational> {
        let deg = self.degree();
        while coeffs.len() > deg {
            let top = coeffs.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = coeffs.len() - deg;
            for (j, c) in self.phi.iter().take(deg).enumerate() {
                coeffs[shift + j] -= &top * Rational::from_integer(c.clone());
            }
        }
        coeffs.resize(deg, Rational::zero());
        coeffs
    }
}

/// An exact element of Q(ζ_K).
#[derive(Clone)]
pub struct CycloElem {
    ctx: Arc<CycloContext>,
    coeffs: Vec<Rational>,
}

impl PartialEq for CycloElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.order == other.ctx.order && self.coeffs == other.coeffs
    }
}

impl Eq for CycloElem {}

impl CycloElem {
    pub fn zero(ctx: &Arc<CycloContext>) -> Self {
        CycloElem { ctx: ctx.clone(), coeffs: vec![Rational::zero(); ctx.degree()] }
    }

    pub fn one(ctx: &Arc<CycloContext>) -> Self {
        Self::from_rational(ctx, Rational::one())
    }

    pub fn from_rational(ctx: &Arc<CycloContext>, q: Rational) -> Self {
        let mut e = Self::zero(ctx);
        e.coeffs[0] = q;
        e
    }

    /// Builds an element from its coefficient vector in the power basis, reducing mod Φ_K.
    pub fn from_coeffs(ctx: &Arc<CycloContext>, coeffs: Vec<Rational>) -> Self {
        CycloElem { ctx: ctx.clone(), coeffs: ctx.reduce(coeffs) }
    }

    /// ζ_K^a with `a` taken mod K.
    pub fn root_of_unity(ctx: &Arc<CycloContext>, a: i64) -> Self {
        let k = a.rem_euclid(ctx.order as i64) as usize;
        CycloElem { ctx: ctx.clone(), coeffs: ctx.powers[k].iter().cloned().map(Rational::from_integer).collect() }
    }

    /// Σ_k weights[k] ζ_K^k for a dense table of K rational weights indexed by exponent.
    pub fn from_exponent_table(ctx: &Arc<CycloContext>, weights: &[Rational]) -> Self {
        assert_eq!(weights.len(), ctx.order as usize);
        let mut acc = vec![Rational::zero(); ctx.degree()];
        for (k, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (slot, p) in acc.iter_mut().zip(&ctx.powers[k]) {
                if !p.is_zero() {
                    *slot += w * Rational::from_integer(p.clone());
                }
            }
        }
        CycloElem { ctx: ctx.clone(), coeffs: acc }
    }

    pub fn context(&self) -> &Arc<CycloContext> {
        &self.ctx
    }

    pub fn order(&self) -> u32 {
        self.ctx.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CycloElem { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.ctx.order, other.ctx.order,
            "mixed cyclotomic orders; embed both operands into a common field first"
        );
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        self.check_same(other);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check_same(other);
        let deg = self.ctx.degree();
        if deg == 1 {
            return Self::from_rational(&self.ctx, &self.coeffs[0] * &other.coeffs[0]);
        }
        let mut prod = vec![Rational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(&self.ctx, prod)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_K.
    pub fn invert(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let modulus: Vec<Rational> = self.ctx.phi.iter().cloned().map(Rational::from_integer).collect();
        let inv = qinv_mod(&self.coeffs, &modulus).ok_or(ExactError::DivisionByZero)?;
        Ok(Self::from_coeffs(&self.ctx, inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(self.mul_ref(&other.invert()?))
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            n >>= 1;
        }
        acc
    }

    /// Image under the automorphism ζ ↦ ζ^t, for t coprime to K.
    pub fn galois(&self, t: i64) -> Self {
        let k = self.ctx.order as i64;
        assert_eq!(t.gcd(&k), 1, "galois exponent must be a unit mod K");
        let mut table = vec![Rational::zero(); k as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            table[(i as i64 * t).rem_euclid(k) as usize] += c;
        }
        Self::from_exponent_table(&self.ctx, &table)
    }

    /// Complex conjugation, ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// The same number viewed in Q(ζ_L) for a multiple L of K, using ζ_K = ζ_L^{L/K}.
    pub fn embed(&self, target: u32) -> Result<Self, ExactError> {
        let k = self.ctx.order;
        if !target.is_multiple_of(k) {
            return Err(ExactError::OrderMismatch(k, target));
        }
        if target == k {
            return Ok(self.clone());
        }
        let step = (target / k) as usize;
        let ctx = CycloContext::get(target);
        let mut table = vec![Rational::zero(); target as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            table[i * step] += c;
        }
        Ok(Self::from_exponent_table(&ctx, &table))
    }

    /// Evaluates the representative polynomial at e(1/K) with `digits` correct decimals.
    ///
    /// Each power ζ^i is evaluated directly as cos + i·sin at working precision p bits, so
    /// the result carries at most `deg · max|c_i| · 2^{4-p}` absolute error. The working
    /// precision adds the bit length of the coefficient sum plus 64 guard bits on top of the
    /// requested digits, which keeps the error below 10^(-digits).
    pub fn embed_complex(&self, digits: u32) -> HpComplex {
        let mag: BigInt = self.coeffs.iter().map(|c| c.abs().ceil().to_integer()).fold(BigInt::one(), |a, b| a + b);
        let bits = HpComplex::bits_for_digits(digits) + mag.bits() as usize + 64;
        let mut acc = HpComplex::zero(bits);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = HpComplex::root_of_unity(i as i64, self.ctx.order as i64, bits);
            acc = acc.add(&z.scale_rational(c));
        }
        acc
    }
}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{}", format_rational(&q));
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "({})z", format_rational(c))?,
                _ => write!(f, "({})z^{}", format_rational(c), i)?,
            }
        }
        write!(f, " [z = ζ_{}]", self.ctx.order)
    }
}

impl Add for &CycloElem {
    type Output = CycloElem;
    fn add(self, rhs: &CycloElem) -> CycloElem {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &CycloElem {
    type Output = CycloElem;
    fn sub(self, rhs: &CycloElem) -> CycloElem {
        self + &(-rhs)
    }
}

impl Mul for &CycloElem {
    type Output = CycloElem;
    fn mul(self, rhs: &CycloElem) -> CycloElem {
        self.mul_ref(rhs)
    }
}

impl Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem { ctx: self.ctx.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// cos(πa/N) = (ζ_{2N}^a + ζ_{2N}^{-a}) / 2 in Q(ζ_{2N}).
pub fn cos_pi(ctx: &Arc<CycloContext>, a: i64, n: u32) -> CycloElem {
    assert_eq!(ctx.order, 2 * n, "cos_pi needs the context of order 2N");
    let s = &CycloElem::root_of_unity(ctx, a) + &CycloElem::root_of_unity(ctx, -a);
    s.scale(&Rational::new(BigInt::one(), BigInt::from(2)))
}

#[derive(Serialize, Deserialize)]
struct CycloWire {
    order: u32,
    #[serde(with = "super::rational::serde_vec")]
    coeffs: Vec<Rational>,
}

impl Serialize for CycloElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycloWire { order: self.ctx.order, coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = CycloWire::deserialize(d)?;
        if w.order == 0 {
            return Err(serde::de::Error::custom("cyclotomic order must be positive"));
        }
        let ctx = CycloContext::get(w.order);
        if w.coeffs.len() != ctx.degree() {
            return Err(serde::de::Error::custom(format!(
                "expected {} coefficients for order {}, found {}",
                ctx.degree(),
                w.order,
                w.coeffs.len()
            )));
        }
        Ok(CycloElem { ctx, coeffs: w.coeffs })
    }
}
