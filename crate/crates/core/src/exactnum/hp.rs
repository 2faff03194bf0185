//! Arbitrary-precision real and complex numbers for numeric cross-checks.
//!
//! Exact code paths never touch these types; they exist so that exact cyclotomic values
//! can be compared against analytic series.

use std::cell::RefCell;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_traits::Signed;

use super::rational::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// A real number carried at a fixed binary working precision.
#[derive(Clone)]
pub struct HpReal {
    v: BigFloat,
    bits: usize,
}

impl HpReal {
    pub fn zero(bits: usize) -> Self {
        HpReal { v: BigFloat::from_i64(0, bits), bits }
    }

    pub fn from_i64(n: i64, bits: usize) -> Self {
        HpReal { v: BigFloat::from_i64(n, bits), bits }
    }

    pub fn from_bigint(n: &BigInt, bits: usize) -> Self {
        let v = with_consts(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, bits, RM, cc));
        HpReal { v, bits }
    }

    pub fn from_rational(q: &Rational, bits: usize) -> Self {
        Self::from_bigint(q.numer(), bits).div(&Self::from_bigint(q.denom(), bits))
    }

    /// 10^(-k)
    pub fn ten_pow_neg(k: u32, bits: usize) -> Self {
        let v = with_consts(|cc| BigFloat::parse(&format!("1e-{k}"), Radix::Dec, bits, RM, cc));
        HpReal { v, bits }
    }

    pub fn pi(bits: usize) -> Self {
        HpReal { v: with_consts(|cc| cc.pi(bits, RM)), bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn add(&self, o: &Self) -> Self {
        HpReal { v: self.v.add(&o.v, self.bits, RM), bits: self.bits }
    }

    pub fn sub(&self, o: &Self) -> Self {
        HpReal { v: self.v.sub(&o.v, self.bits, RM), bits: self.bits }
    }

    pub fn mul(&self, o: &Self) -> Self {
        HpReal { v: self.v.mul(&o.v, self.bits, RM), bits: self.bits }
    }

    pub fn div(&self, o: &Self) -> Self {
        HpReal { v: self.v.div(&o.v, self.bits, RM), bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        HpReal { v: self.v.neg(), bits: self.bits }
    }

    pub fn abs(&self) -> Self {
        HpReal { v: self.v.abs(), bits: self.bits }
    }

    pub fn sqrt(&self) -> Self {
        HpReal { v: self.v.sqrt(self.bits, RM), bits: self.bits }
    }

    pub fn cos(&self) -> Self {
        HpReal { v: with_consts(|cc| self.v.cos(self.bits, RM, cc)), bits: self.bits }
    }

    pub fn sin(&self) -> Self {
        HpReal { v: with_consts(|cc| self.v.sin(self.bits, RM, cc)), bits: self.bits }
    }

    pub fn powi(&self, n: usize) -> Self {
        HpReal { v: self.v.powi(n, self.bits, RM), bits: self.bits }
    }

    pub fn lt(&self, o: &Self) -> bool {
        self.v.cmp(&o.v).is_some_and(|c| c < 0)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    /// Decimal rendering with `digits` significant digits: positional when the exponent is
    /// in [-5, digits), scientific otherwise.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        let bits = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 16;
        let mut v = self.v.clone();
        let _ = v.set_precision(bits.max(64), RM);
        let raw = with_consts(|cc| v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into());
        normalize_decimal(&raw, digits).unwrap_or(raw)
    }

    pub fn to_f64(&self) -> f64 {
        let raw = with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_default();
        raw.parse().unwrap_or(f64::NAN)
    }
}

/// Rewrite "-d.ddd e±X" to exactly `digits` significant digits (round half up).
fn normalize_decimal(raw: &str, digits: usize) -> Option<String> {
    let (neg, body) = match raw.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, raw),
    };
    let (mant, exp) = body.split_once('e').unwrap_or((body, "0"));
    let mut exp: i64 = exp.parse().ok()?;
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let mut ds: Vec<u8> = ip.bytes().chain(fp.bytes()).map(|b| b.wrapping_sub(b'0')).collect();
    if ds.iter().any(|&d| d > 9) {
        return None;
    }
    exp += ip.len() as i64 - 1;
    let lead = ds.iter().position(|&d| d != 0);
    let Some(lead) = lead else {
        return Some(format!("0.{}", "0".repeat(digits - 1)));
    };
    ds.drain(..lead);
    exp -= lead as i64;
    if ds.len() > digits {
        let up = ds[digits] >= 5;
        ds.truncate(digits);
        if up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    ds.resize(digits, 0);
    let s: String = ds.iter().map(|d| (b'0' + d) as char).collect();
    let sign = if neg { "-" } else { "" };
    Some(if (-5..digits as i64).contains(&exp) {
        if exp < 0 {
            format!("{sign}0.{}{s}", "0".repeat((-exp - 1) as usize))
        } else {
            let (a, b) = s.split_at(exp as usize + 1);
            if b.is_empty() {
                format!("{sign}{a}")
            } else {
                format!("{sign}{a}.{b}")
            }
        }
    } else {
        let (a, b) = s.split_at(1);
        format!("{sign}{a}.{b}e{exp}")
    })
}

impl fmt::Debug for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

/// A complex number with both parts at the same working precision.
#[derive(Clone, Debug)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

impl HpComplex {
    /// Binary precision sufficient for `digits` decimal digits.
    pub fn bits_for_digits(digits: u32) -> usize {
        (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
    }

    pub fn zero(bits: usize) -> Self {
        HpComplex { re: HpReal::zero(bits), im: HpReal::zero(bits) }
    }

    pub fn from_real(re: HpReal) -> Self {
        let bits = re.bits();
        HpComplex { re, im: HpReal::zero(bits) }
    }

    /// e(a/k) = cos(2πa/k) + i sin(2πa/k).
    pub fn root_of_unity(a: i64, k: i64, bits: usize) -> Self {
        let a = a.rem_euclid(k);
        let angle = HpReal::pi(bits).mul(&HpReal::from_i64(2 * a, bits)).div(&HpReal::from_i64(k, bits));
        HpComplex { re: angle.cos(), im: angle.sin() }
    }

    pub fn bits(&self) -> usize {
        self.re.bits()
    }

    pub fn add(&self, o: &Self) -> Self {
        HpComplex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        HpComplex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        HpComplex { re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)), im: self.re.mul(&o.im).add(&self.im.mul(&o.re)) }
    }

    pub fn scale(&self, r: &HpReal) -> Self {
        HpComplex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        if q.denom() == &BigInt::from(1) && q.numer().abs() == BigInt::from(1) {
            return if q.is_negative() { self.neg() } else { self.clone() };
        }
        self.scale(&HpReal::from_rational(q, self.bits()))
    }

    pub fn neg(&self) -> Self {
        HpComplex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn abs(&self) -> HpReal {
        self.re.mul(&self.re).add(&self.im.mul(&self.im)).sqrt()
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        format!("{} + {}i", self.re.to_decimal(digits), self.im.to_decimal(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn decimal_normalization() {
        assert_eq!(normalize_decimal("2.e+0", 5).unwrap(), "2.0000");
        assert_eq!(normalize_decimal("-1.2345e-3", 3).unwrap(), "-0.00123");
        assert_eq!(normalize_decimal("9.996e+2", 3).unwrap(), "1.00e3");
        assert_eq!(normalize_decimal("5.7795e-37", 3).unwrap(), "5.78e-37");
        assert_eq!(normalize_decimal("0.0", 3).unwrap(), "0.00");
        let pi = HpReal::pi(200);
        assert_eq!(pi.to_decimal(20), "3.1415926535897932385");
    }

    #[test]
    fn quarter_turn_is_i() {
        let bits = HpComplex::bits_for_digits(40) + 32;
        let z = HpComplex::root_of_unity(1, 4, bits);
        let eps = HpReal::ten_pow_neg(38, bits);
        assert!(z.re.abs().lt(&eps));
        assert!(z.im.sub(&HpReal::from_i64(1, bits)).abs().lt(&eps));
    }

    #[test]
    fn rational_conversion() {
        let bits = 200;
        let x = HpReal::from_rational(&rat(1, 3), bits).mul(&HpReal::from_i64(3, bits));
        assert!(x.sub(&HpReal::from_i64(1, bits)).abs().lt(&HpReal::ten_pow_neg(50, bits)));
        assert!((HpReal::from_rational(&rat(-5, 4), bits).to_f64() + 1.25).abs() < 1e-15);
    }
}
