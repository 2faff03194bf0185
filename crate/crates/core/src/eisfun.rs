//! The Bernoulli function B̄₁, the product f(x,y) = B̄₁(x)B̄₁(y), its finite Fourier
//! transform f̂ on (Z/2NZ)², and the function F in closed and Fourier form.
//!
//! F(P) = −¼ (cos(πx/N) + cos(πy/N)) / (cos(πx/N) − cos(πy/N)) for representatives
//! with x − y odd. Shifting both x and y by N flips the sign of both cosines, and shifting
//! only one of them changes the parity of x − y, so every admissible choice gives the same
//! value; we take x, y ∈ [0, N) and add N to y when x − y is even.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactnum::rational::frac;
use crate::exactnum::{cos_pi, rat, CycloContext, CycloElem, Rational};
use crate::modgroup::{enumerate_point_classes, lift0, LevelContext, Lift0, PointClass, PointN};

/// B̄₁(q): frac(q) − ½ off the integers, 0 on them.
pub fn bern1(q: &Rational) -> Rational {
    if q.is_integer() {
        Rational::zero()
    } else {
        frac(q) - rat(1, 2)
    }
}

/// f(x, y) = B̄₁(x)·B̄₁(y).
pub fn f2(x: &Rational, y: &Rational) -> Rational {
    bern1(x) * bern1(y)
}

fn half_grid(n: u32) -> Vec<Rational> {
    let k = 2 * n as i64;
    (0..k).map(|s| bern1(&rat(s, k))).collect()
}

/// F(P) from the cosine closed form, exact in Q(ζ_{2N}).
pub fn f_closed(p: PointN, ctx: &LevelContext) -> CycloElem {
    let n = ctx.level();
    let x = (p.u % n) as i64;
    let mut y = (p.v % n) as i64;
    if (x - y).rem_euclid(2) == 0 {
        y += n as i64;
    }
    let cyc = ctx.cyclo();
    let cx = cos_pi(cyc, x, n);
    let cy = cos_pi(cyc, y, n);
    let num = &cx + &cy;
    let den = &cx - &cy;
    let q = num.div(&den).expect("cos(πx/N) = cos(πy/N) is impossible when x - y is odd");
    q.scale(&rat(-1, 4))
}

/// f̂(P) = Σ_{s ∈ (Z/2NZ)²} e(s·P / 2N) f(s / 2N) for P ∈ (Z/2NZ)².
pub fn fhat(p: (i64, i64), n: u32, cyc: &Arc<CycloContext>) -> CycloElem {
    assert_eq!(cyc.order(), 2 * n);
    let k = 2 * n as i64;
    let b = half_grid(n);
    let mut table = vec![Rational::zero(); k as usize];
    for s1 in 0..k {
        if b[s1 as usize].is_zero() {
            continue;
        }
        for s2 in 0..k {
            if b[s2 as usize].is_zero() {
                continue;
            }
            let e = (s1 * p.0 + s2 * p.1).rem_euclid(k) as usize;
            table[e] += &b[s1 as usize] * &b[s2 as usize];
        }
    }
    CycloElem::from_exponent_table(cyc, &table)
}

pub fn fhat_lift(l: Lift0, n: u32, cyc: &Arc<CycloContext>) -> CycloElem {
    fhat((l.u as i64, l.v as i64), n, cyc)
}

/// H = (1 1; −1 1)
pub fn apply_h(p: PointN, n: u32) -> PointN {
    let (u, v) = (p.u as i64, p.v as i64);
    PointN::new(u + v, -u + v, n)
}

/// F(P) via the Fourier expression f̂((HP)⁰).
pub fn f_fourier(p: PointN, ctx: &LevelContext) -> CycloElem {
    let n = ctx.level();
    fhat_lift(lift0(apply_h(p, n), n), n, ctx.cyclo())
}

/// Σ_{k=0}^{2d−1} β^k B̄₁(x + k/2d) with β = ζ_{2d}^j, evaluated term by term in Q(ζ_{2d}).
pub fn twisted_sum_direct(d: u32, j: i64, x: &Rational) -> CycloElem {
    let k = 2 * d as i64;
    let ctx = CycloContext::get(2 * d);
    let mut table = vec![Rational::zero(); k as usize];
    for t in 0..k {
        let arg = x + rat(t, k);
        table[(j * t).rem_euclid(k) as usize] += bern1(&arg);
    }
    CycloElem::from_exponent_table(&ctx, &table)
}

/// Closed form of the twisted Bernoulli sum: β^{−l}/(β−1) on the open interval
/// (l/2d, (l+1)/2d) and β^{−l}(1+β)/(2(β−1)) at the jump x = l/2d.
pub fn twisted_sum_closed(d: u32, j: i64, x: &Rational) -> CycloElem {
    let k = 2 * d as i64;
    let ctx = CycloContext::get(2 * d);
    let beta = CycloElem::root_of_unity(&ctx, j);
    let one = CycloElem::one(&ctx);
    let inv_bm1 = (&beta - &one).invert().expect("β ≠ 1 for primitive β");
    let scaled = frac(x) * Rational::from_integer(BigInt::from(k));
    let l = scaled.floor().to_integer();
    let l: i64 = l.try_into().expect("small index");
    let beta_neg_l = CycloElem::root_of_unity(&ctx, -j * l);
    if scaled.is_integer() {
        let num = &beta_neg_l * &(&one + &beta);
        num.mul_ref(&inv_bm1).scale(&rat(1, 2))
    } else {
        beta_neg_l.mul_ref(&inv_bm1)
    }
}

/// F evaluated once per ±-class of (Z/NZ)².
#[derive(Debug, Clone)]
pub struct FTable {
    n: u32,
    values: HashMap<PointClass, CycloElem>,
}

impl FTable {
    pub fn new(ctx: &LevelContext) -> Self {
        use rayon::prelude::*;
        let classes = enumerate_point_classes(ctx.level());
        let values = classes.par_iter().map(|c| (*c, f_closed(c.rep(), ctx))).collect();
        FTable { n: ctx.level(), values }
    }

    pub fn get(&self, p: PointClass) -> &CycloElem {
        &self.values[&p]
    }

    pub fn at(&self, p: PointN) -> &CycloElem {
        self.get(p.class(self.n))
    }
}

/// Whether `q` is one of the jump points of B̄₁ (an integer).
pub fn is_jump(q: &Rational) -> bool {
    q.denom().is_one()
}
