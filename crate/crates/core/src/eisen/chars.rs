//! Dirichlet characters modulo odd N and the values L(χ), exactly and by series.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::ExactError;
use crate::exactnum::hp::{HpComplex, HpReal};
use crate::exactnum::rational::int;
use crate::exactnum::{cos_pi, euler_phi, rat, CycloContext, CycloElem, Rational};
use crate::modgroup::{prime_factors, units};

/// One cyclic factor of (Z/NZ)*: the residue of a generator and its order.
#[derive(Clone, Debug)]
struct Factor {
    gen: u32,
    order: u32,
}

/// The unit group of Z/NZ as a product of cyclic groups, with discrete logs.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    n: u32,
    factors: Vec<Factor>,
    exponent: u32,
    // logs[a] = exponent vector of a in the chosen generators, None for non-units
    logs: Vec<Option<Vec<u32>>>,
}

fn primitive_root_prime_power(p: u64, k: u32) -> u64 {
    let pk = p.pow(k);
    let phi = pk / p * (p - 1);
    let qs = prime_factors(phi);
    (2..pk).find(|&g| g % p != 0 && qs.iter().all(|q| mod_pow(g, phi / q, pk) != 1)).unwrap_or(1)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl UnitGroup {
    pub fn new(n: u32) -> Self {
        let n64 = n as u64;
        let mut factors = Vec::new();
        for p in prime_factors(n64) {
            let mut k = 0;
            let mut m = n64;
            while m.is_multiple_of(p) {
                m /= p;
                k += 1;
            }
            let pk = p.pow(k);
            let g = primitive_root_prime_power(p, k);
            // lift to Z/NZ: g mod p^k, 1 mod N/p^k
            let rest = n64 / pk;
            let gen = (0..n64).find(|x| x % pk == g % pk && x % rest == 1 % rest).unwrap();
            factors.push(Factor { gen: gen as u32, order: (pk / p * (p - 1)) as u32 });
        }
        let exponent = factors.iter().fold(1u32, |acc, f| acc.lcm(&f.order));
        let mut logs = vec![None; n as usize];
        let mut vec = vec![0u32; factors.len()];
        loop {
            let mut a = 1u64;
            for (f, e) in factors.iter().zip(&vec) {
                a = a * mod_pow(f.gen as u64, *e as u64, n64) % n64;
            }
            logs[a as usize] = Some(vec.clone());
            let mut i = 0;
            while i < vec.len() {
                vec[i] += 1;
                if vec[i] < factors[i].order {
                    break;
                }
                vec[i] = 0;
                i += 1;
            }
            if i == vec.len() {
                break;
            }
        }
        UnitGroup { n, factors, exponent, logs }
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    /// Exponent of the group; character values lie in μ_e.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn generators(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.gen).collect()
    }

    fn log(&self, a: i64) -> Option<&Vec<u32>> {
        self.logs[a.rem_euclid(self.n as i64) as usize].as_ref()
    }
}

/// A Dirichlet character mod N, stored as χ(g_i) = ζ_e^{k_i} on the chosen generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletChar {
    modulus: u32,
    exponent: u32,
    images: Vec<u32>,
    // value exponents of ζ_e by residue
    table: Vec<Option<u32>>,
}

impl DirichletChar {
    fn from_images(g: &UnitGroup, images: Vec<u32>) -> Self {
        let e = g.exponent;
        let table = (0..g.n as i64)
            .map(|a| {
                g.log(a).map(|lv| {
                    let mut s = 0u64;
                    for ((f, k), l) in g.factors.iter().zip(&images).zip(lv) {
                        s += (*k as u64) * (*l as u64) * (e / f.order) as u64;
                    }
                    (s % e as u64) as u32
                })
            })
            .collect();
        DirichletChar { modulus: g.n, exponent: e, images, table }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Exponents k_i with χ(g_i) = ζ_e^{k_i·e/ord(g_i)}.
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// χ(a) as an exponent of ζ_e, or None when gcd(a, N) > 1.
    pub fn value_exp(&self, a: i64) -> Option<u32> {
        self.table[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn is_even(&self) -> bool {
        self.value_exp(-1) == Some(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().flatten().all(|&k| k == 0)
    }

    pub fn order(&self) -> u32 {
        self.table.iter().flatten().fold(1u32, |acc, &k| acc.lcm(&(self.exponent / self.exponent.gcd(&k))))
    }

    pub fn conj(&self) -> Self {
        let e = self.exponent;
        DirichletChar {
            modulus: self.modulus,
            exponent: e,
            images: self.images.clone(),
            table: self.table.iter().map(|v| v.map(|k| (e - k) % e)).collect(),
        }
        .with_images_from_table()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = self.exponent;
        DirichletChar {
            modulus: self.modulus,
            exponent: e,
            images: self.images.clone(),
            table: self
                .table
                .iter()
                .zip(&o.table)
                .map(|(a, b)| match (a, b) {
                    (Some(x), Some(y)) => Some((x + y) % e),
                    _ => None,
                })
                .collect(),
        }
        .with_images_from_table()
    }

    fn with_images_from_table(mut self) -> Self {
        let g = UnitGroup::new(self.modulus);
        self.images = g
            .factors
            .iter()
            .map(|f| {
                let k = self.value_exp(f.gen as i64).unwrap();
                k / (self.exponent / f.order)
            })
            .collect();
        self
    }

    /// χ(a) in Q(ζ_K) for any K divisible by e; zero off the units.
    pub fn value(&self, a: i64, ctx: &Arc<CycloContext>) -> CycloElem {
        assert_eq!(ctx.order() % self.exponent, 0);
        match self.value_exp(a) {
            Some(k) => CycloElem::root_of_unity(ctx, k as i64 * (ctx.order() / self.exponent) as i64),
            None => CycloElem::zero(ctx),
        }
    }

    pub fn value_complex(&self, a: i64, bits: usize) -> HpComplex {
        match self.value_exp(a) {
            Some(k) => HpComplex::root_of_unity(k as i64, self.exponent as i64, bits),
            None => HpComplex::zero(bits),
        }
    }

    /// Short label: exponents of the generator images.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.images.iter().map(|k| k.to_string()).collect();
        format!("chi[{}]", parts.join(","))
    }
}

pub fn enumerate_chars(n: u32) -> Vec<DirichletChar> {
    let g = UnitGroup::new(n);
    let mut out = Vec::new();
    let mut images = vec![0u32; g.factors.len()];
    loop {
        out.push(DirichletChar::from_images(&g, images.clone()));
        let mut i = 0;
        while i < images.len() {
            images[i] += 1;
            if images[i] < g.factors[i].order {
                break;
            }
            images[i] = 0;
            i += 1;
        }
        if i == images.len() {
            break;
        }
    }
    out
}

/// The even characters D_N⁺; exactly φ(N)/2 of them.
pub fn enumerate_even_chars(n: u32) -> Vec<DirichletChar> {
    enumerate_chars(n).into_iter().filter(|c| c.is_even()).collect()
}

/// Order of the field holding L(χ) for every χ mod N: lcm(2N, e).
pub fn l_value_order(n: u32) -> u32 {
    (2 * n).lcm(&UnitGroup::new(n).exponent())
}

/// μ⁰: the odd representative of μ mod 2N; μ ∈ [1, N], plus N when even.
pub fn odd_rep(mu: u32, n: u32) -> i64 {
    let m = mu % n;
    let m = if m == 0 { n } else { m } as i64;
    if m % 2 == 0 {
        m + n as i64
    } else {
        m
    }
}

/// 1/(1 − cos(πμ⁰/N)) for every unit μ, in Q(ζ_2N).
pub fn l_weights(n: u32) -> Vec<(u32, CycloElem)> {
    let cyc = CycloContext::get(2 * n);
    let one = CycloElem::one(&cyc);
    units(n)
        .into_iter()
        .map(|mu| {
            let c = cos_pi(&cyc, odd_rep(mu, n), n);
            let w = (&one - &c).invert().expect("cos(πμ⁰/N) ≠ 1 for a unit μ");
            (mu, w)
        })
        .collect()
}

/// L(χ) = ½ Σ_μ χ(μ)/(1 − cos(πμ⁰/N)), exact in Q(ζ_lcm(2N, e)).
pub fn l_chi_exact(chi: &DirichletChar) -> CycloElem {
    let n = chi.modulus();
    let big = CycloContext::get(l_value_order(n));
    let mut acc = CycloElem::zero(&big);
    for (mu, w) in l_weights(n) {
        let term = chi.value(mu as i64, &big).mul_ref(&w.embed(big.order()).expect("2N divides the order"));
        acc.add_assign_ref(&term);
    }
    acc.scale(&rat(1, 2))
}

fn bernoulli_even(count: usize) -> Vec<Rational> {
    // B_0..B_{2·count} by the standard recurrence Σ_{j<m+1} C(m+1, j) B_j = 0
    let top = 2 * count;
    let mut b: Vec<Rational> = vec![Rational::zero(); top + 1];
    b[0] = int(1);
    for m in 1..=top {
        let mut s = Rational::zero();
        let mut binom = Rational::from_integer(1.into());
        for (j, bj) in b.iter().enumerate().take(m) {
            if j > 0 {
                binom = binom * int((m + 1 - j + 1) as i64) / int(j as i64);
            }
            s += &binom * bj;
        }
        b[m] = -s / int((m + 1) as i64);
    }
    (1..=count).map(|k| b[2 * k].clone()).collect()
}

/// Hurwitz ζ(2, a) = Σ_{n ≥ 0} (n + a)⁻² for rational a ∈ (0, 1], to `digits` decimals.
///
/// Direct sum up to M, then the Euler–Maclaurin tail
/// 1/(M+a) + 1/(2(M+a)²) + Σ_k B_{2k}/(M+a)^{2k+1}; the remainder is bounded by the first
/// omitted term, and the sum is cut once that term is below the target.
pub fn hurwitz_zeta2(a: &Rational, digits: u32, bits: usize) -> Result<HpReal, ExactError> {
    let m = (digits as i64) + 10;
    let a_hp = HpReal::from_rational(a, bits);
    let one = HpReal::from_i64(1, bits);
    let mut s = HpReal::zero(bits);
    for k in 0..m {
        let x = a_hp.add(&HpReal::from_i64(k, bits));
        s = s.add(&one.div(&x.mul(&x)));
    }
    let x = a_hp.add(&HpReal::from_i64(m, bits));
    s = s.add(&one.div(&x));
    s = s.add(&one.div(&x.mul(&x).mul(&HpReal::from_i64(2, bits))));
    let eps = HpReal::ten_pow_neg(digits + 5, bits);
    let x2 = x.mul(&x);
    let mut pow = x.clone();
    let max_terms = 60;
    for b in bernoulli_even(max_terms) {
        pow = pow.mul(&x2);
        let term = HpReal::from_rational(&b, bits).div(&pow);
        if term.abs().lt(&eps) {
            return Ok(s);
        }
        s = s.add(&term);
    }
    Err(ExactError::PrecisionNotAchieved(format!("Euler-Maclaurin tail for zeta(2, {a}) did not reach 1e-{digits}")))
}

/// (2N²/π²)·L(χ₂, 2) with L(χ₂, 2) = (2N)⁻² Σ_r χ₂(r) ζ(2, r/2N).
pub fn l_chi_series(chi: &DirichletChar, digits: u32) -> Result<HpComplex, ExactError> {
    let n = chi.modulus() as i64;
    let bits = HpComplex::bits_for_digits(digits) + 64;
    let mut acc = HpComplex::zero(bits);
    for r in (1..2 * n).step_by(2) {
        if r.gcd(&n) != 1 {
            continue;
        }
        let z = hurwitz_zeta2(&rat(r, 2 * n), digits, bits)?;
        acc = acc.add(&chi.value_complex(r, bits).scale(&z));
    }
    // (2N²/π²)·(2N)⁻² = 1/(2π²)
    let pi = HpReal::pi(bits);
    let k = HpReal::from_i64(1, bits).div(&pi.mul(&pi).mul(&HpReal::from_i64(2, bits)));
    Ok(acc.scale(&k))
}

/// Euler's φ as used for normalizations.
pub fn phi(n: u32) -> u64 {
    euler_phi(n as u64)
}
