//! Dense univariate polynomials, coefficients stored low degree first.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::Rational;

fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Exact quotient of `num` by the monic `den`; panics if the division leaves a remainder.
fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    debug_assert!(den[dn].is_one());
    let mut rem = num.to_vec();
    if rem.len() < den.len() {
        assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
        return vec![];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// The K-th cyclotomic polynomial, obtained by dividing `x^K - 1` by `Φ_d` for every
/// proper divisor `d` of `K`.
pub fn cyclotomic_poly(k: u32) -> Vec<BigInt> {
    assert!(k >= 1, "cyclotomic order must be positive");
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); k as usize + 1];
    acc[0] = BigInt::from(-1);
    acc[k as usize] = BigInt::one();
    for d in 1..k {
        if k.is_multiple_of(d) {
            acc = div_exact_monic(&acc, &cyclotomic_poly(d));
        }
    }
    acc
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub(crate) type QPoly = Vec<Rational>;

fn qsub(a: &[Rational], b: &[Rational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

fn qmul(a: &[Rational], b: &[Rational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn qdivrem(a: &[Rational], b: &[Rational]) -> (QPoly, QPoly) {
    let mut rem: QPoly = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead_inv = Rational::one() / &b[db];
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = &c * y;
            rem[i + j] -= t;
        }
        quot[i] = c;
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

/// Inverse of `a` modulo `m` over Q via the extended Euclidean algorithm, or `None`
/// when the two are not coprime.
pub(crate) fn qinv_mod(a: &[Rational], m: &[Rational]) -> Option<QPoly> {
    let mut r0: QPoly = m.to_vec();
    let mut r1: QPoly = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut t0: QPoly = vec![];
    let mut t1: QPoly = vec![Rational::one()];
    while !r1.is_empty() {
        let (q, r) = qdivrem(&r0, &r1);
        let t2 = qsub(&t0, &qmul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t2);
    }
    // r0 is the gcd; invertible iff it is a nonzero constant.
    if r0.len() != 1 {
        return None;
    }
    let c = Rational::one() / &r0[0];
    let (_, inv) = qdivrem(&t0.iter().map(|x| x * &c).collect::<Vec<_>>(), m);
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(9), ints(&[1, 0, 0, 1, 0, 0, 1]));
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_poly(105).iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn degree_is_totient() {
        for k in 1..=60u32 {
            assert_eq!(cyclotomic_poly(k).len() as u64 - 1, euler_phi(k as u64), "K={k}");
        }
    }

    #[test]
    fn inverse_mod_polynomial() {
        use crate::exactnum::rational::int;
        // (x + 1)^{-1} mod x^2 + 1 = (1 - x)/2
        let m = vec![int(1), int(0), int(1)];
        let a = vec![int(1), int(1)];
        let inv = qinv_mod(&a, &m).unwrap();
        let prod = qdivrem(&qmul(&a, &inv), &m).1;
        assert_eq!(prod, vec![int(1)]);
        assert!(qinv_mod(&m, &m).is_none());
    }
}
