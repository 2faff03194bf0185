//! The retraction R(x) = x − E(δx) of relative onto interior homology, where
//! E(γ) = c Σ_α Σ_χ χ(α)/L(χ) (E_{αγP∞} − E_{αγP₀}).
//!
//! The constant c is not assumed: for every generator it is solved from
//! δ(E(γ)) = δ(ξ(γ)) and must come out the same. Independently, R is also built by
//! solving Σ_P x_P δ(E_P) = δ(ξ(γ)) directly, and the two constructions are compared in V_N.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use super::chars::{enumerate_even_chars, l_chi_exact, l_value_order, phi};
use super::{all_cycles, Report};
use crate::eisfun::FTable;
use crate::exactnum::rational::{format_rational, int};
use crate::exactnum::{rat, CycloContext, CycloElem, Rational, Scalar};
use crate::linalg::{axpy, Echelon, SparseVec};
use crate::modgroup::{units, Column, GroupElem, LevelContext, PointClass};
use crate::msym::{boundary, boundary_kernel, CuspDivisor, ManinChain, RelationBasis};

/// Per-level data shared by the closed-form retraction.
pub struct RetractionData {
    pub level: u32,
    pub field: Arc<CycloContext>,
    /// w(α) = Σ_χ χ(α)/L(χ)
    pub weights: Vec<(u32, CycloElem)>,
    cycles: HashMap<PointClass, ManinChain<CycloElem>>,
    /// δ(Σ_α w(α) E_{αQ}) per cusp Q
    phi_boundary: HashMap<PointClass, CuspDivisor<CycloElem>>,
}

fn embed_chain(c: &ManinChain<CycloElem>, field: &Arc<CycloContext>) -> ManinChain<CycloElem> {
    let mut out = ManinChain::new(c.level());
    for (g, x) in c.terms() {
        out.add_term(*g, &x.embed(field.order()).expect("order divides the compositum"));
    }
    out
}

fn embed_div(d: &CuspDivisor<CycloElem>, field: &Arc<CycloContext>) -> CuspDivisor<CycloElem> {
    let mut out = CuspDivisor::new(d.level());
    for (q, x) in d.terms() {
        out.add_term(*q, &x.embed(field.order()).expect("order divides the compositum"));
    }
    out
}

fn embed_vec(v: &SparseVec<CycloElem>, field: &Arc<CycloContext>) -> SparseVec<CycloElem> {
    v.iter().map(|(j, x)| (*j, x.embed(field.order()).expect("order divides the compositum"))).collect()
}

impl RetractionData {
    pub fn new(ctx: &LevelContext, table: &FTable) -> Self {
        let n = ctx.level();
        let field = CycloContext::get(l_value_order(n));
        let chars = enumerate_even_chars(n);
        let inv_l: Vec<CycloElem> =
            chars.par_iter().map(|chi| l_chi_exact(chi).invert().expect("L(chi) is nonzero")).collect();
        let weights = units(n)
            .into_iter()
            .map(|a| {
                let mut w = CycloElem::zero(&field);
                for (chi, il) in chars.iter().zip(&inv_l) {
                    w.add_assign_ref(&chi.value(a as i64, &field).mul_ref(il));
                }
                (a, w)
            })
            .collect::<Vec<_>>();
        let cycles: HashMap<PointClass, ManinChain<CycloElem>> =
            all_cycles(ctx, table).into_iter().map(|c| (c.point, c.chain)).collect();
        let deltas: HashMap<PointClass, CuspDivisor<CycloElem>> =
            cycles.par_iter().map(|(p, c)| (*p, embed_div(&boundary(c), &field))).collect();
        let phi_boundary = ctx
            .cusps()
            .par_iter()
            .map(|q| {
                let mut acc = CuspDivisor::new(n);
                for (a, w) in &weights {
                    let aq = q.rep().scale(*a as i64, n).class(n);
                    for (r, x) in deltas[&aq].terms() {
                        acc.add_term(*r, &x.mul_ref(w));
                    }
                }
                (*q, acc)
            })
            .collect();
        RetractionData { level: n, field, weights, cycles, phi_boundary }
    }

    /// Σ_α w(α) E_{αQ}, coefficients in the compositum field.
    pub fn phi_chain(&self, q: PointClass) -> ManinChain<CycloElem> {
        let n = self.level;
        let mut acc = ManinChain::new(n);
        for (a, w) in &self.weights {
            let aq = q.rep().scale(*a as i64, n).class(n);
            acc.add_chain(&embed_chain(&self.cycles[&aq], &self.field).scaled(w));
        }
        acc
    }

    /// δ(E(γ)) with normalization 1.
    pub fn boundary_unnormalized(&self, g: &GroupElem) -> CuspDivisor<CycloElem> {
        let n = self.level;
        let q1 = g.cusp_of_column(Column::First, n);
        let q2 = g.cusp_of_column(Column::Second, n);
        self.phi_boundary[&q1].sub(&self.phi_boundary[&q2])
    }
}

/// E(γ) with the given normalization in place of the constant c.
pub fn retraction_closed(
    g: &GroupElem,
    ctx: &LevelContext,
    normalization: &Rational,
    data: &RetractionData,
) -> ManinChain<CycloElem> {
    let n = ctx.level();
    let mut out = data.phi_chain(g.cusp_of_column(Column::First, n));
    let second = data.phi_chain(g.cusp_of_column(Column::Second, n));
    for (h, x) in second.terms() {
        out.add_term(*h, &x.neg());
    }
    out.scaled_rational(normalization)
}

fn generator_boundary(g: &GroupElem, field: &Arc<CycloContext>, n: u32) -> CuspDivisor<CycloElem> {
    let mut d = CuspDivisor::new(n);
    crate::msym::boundary_generator(g, &CycloElem::one(field), n, &mut d);
    d
}

/// The constant c with c·δ(E(γ)|_{c=1}) = δ(ξ(γ)), if one exists.
pub fn solve_normalization(g: &GroupElem, data: &RetractionData) -> Option<Rational> {
    let n = data.level;
    let target = generator_boundary(g, &data.field, n);
    let d = data.boundary_unnormalized(g);
    let q1 = g.cusp_of_column(Column::First, n);
    let c = d.coeff(&q1)?.as_rational()?.recip();
    (d.scaled_rational(&c) == target).then_some(c)
}

fn reduce_embedded(
    basis: &RelationBasis,
    ctx: &LevelContext,
    chain: &ManinChain<CycloElem>,
    field: &Arc<CycloContext>,
) -> Result<SparseVec<CycloElem>, crate::Error> {
    Ok(embed_vec(&basis.reduce(chain, ctx)?, field))
}

/// Solve Σ_P x_P δ(E_P) = [Q] − [Q₀] for every cusp Q, Q₀ the first cusp. Returns, per Q,
/// the coefficients x_P in cusp order, or None when the system is inconsistent.
fn solve_boundary_preimages(ctx: &LevelContext, deltas: &[CuspDivisor<CycloElem>]) -> Option<Vec<Vec<CycloElem>>> {
    let c = ctx.cusps().len();
    let cyc = ctx.cyclo();
    // one equation per cusp R: Σ_P x_P δ(E_P)[R] = rhs_Q[R], all right sides at once
    let mut ech: Echelon<CycloElem> = Echelon::new(2 * c);
    for (r, cusp) in ctx.cusps().iter().enumerate() {
        let mut row = SparseVec::new();
        for (p, d) in deltas.iter().enumerate() {
            if let Some(x) = d.coeff(cusp) {
                row.insert(p, x.clone());
            }
        }
        // rhs for Q = column c + q: +1 if R = Q, −1 if R = Q₀ (Q ≠ Q₀)
        for q in 1..c {
            let v = i64::from(r == q) - i64::from(r == 0);
            if v != 0 {
                row.insert(c + q, CycloElem::from_rational(cyc, int(v)));
            }
        }
        ech.insert(row);
    }
    ech.make_reduced();
    if ech.pivots().any(|p| p >= c) {
        return None;
    }
    let zero = CycloElem::zero(cyc);
    let mut out = vec![vec![zero.clone(); c]; c];
    for p in ech.pivots().collect::<Vec<_>>() {
        let row = ech.row(p).unwrap();
        for (q, col) in out.iter_mut().enumerate().skip(1) {
            if let Some(x) = row.get(&(c + q)) {
                col[p] = x.clone();
            }
        }
    }
    Some(out)
}

/// Determine the normalization, check δ∘R = 0, R|ker δ = id, and agreement with the
/// operational retraction obtained by solving for boundary preimages.
pub fn verify_retraction(
    ctx: &LevelContext,
    basis: &RelationBasis,
    table: &FTable,
) -> Result<(Vec<Report>, Option<Rational>), crate::Error> {
    let n = ctx.level();
    let data = RetractionData::new(ctx, table);
    let field = data.field.clone();
    let half_reading = rat(1, 2 * n as i64 * phi(n) as i64);

    let per_g: Vec<Option<Rational>> = ctx.group().par_iter().map(|g| solve_normalization(g, &data)).collect();
    let mut distinct: Vec<Rational> = Vec::new();
    let mut unsolvable = 0usize;
    for c in &per_g {
        match c {
            Some(c) if !distinct.contains(c) => distinct.push(c.clone()),
            Some(_) => {}
            None => unsolvable += 1,
        }
    }
    let c = (unsolvable == 0 && distinct.len() == 1).then(|| distinct[0].clone());
    let mut reports = Vec::new();
    let mut norm = Report::new(
        n,
        "retraction.normalization",
        c.is_some(),
        json!({
            "generators": per_g.len(),
            "unsolvable_generators": unsolvable,
            "distinct_constants": distinct.iter().map(format_rational).collect::<Vec<_>>(),
            "reference_1/(2N phi(N))": format_rational(&half_reading),
            "ratio_to_1/(2N phi(N))": c.as_ref().map(|c| format_rational(&(c / &half_reading))),
            "equals_1/(N phi(N))": c.as_ref().map(|c| *c == &half_reading * int(2)),
        }),
    );
    norm.normalization = c.as_ref().map(format_rational);
    reports.push(norm);
    let Some(c) = c else { return Ok((reports, None)) };

    // δ(R ξ(g)) = δξ(g) − c·δE(g)
    let bad_boundary = ctx
        .group()
        .par_iter()
        .filter(|g| {
            let d = generator_boundary(g, &field, n).sub(&data.boundary_unnormalized(g).scaled_rational(&c));
            !d.is_zero()
        })
        .count();
    let mut r = Report::new(n, "retraction.boundary_vanishes", bad_boundary == 0, json!({"failures": bad_boundary}));
    r.normalization = Some(format_rational(&c));
    reports.push(r);

    // Work in V_N coordinates from here on.
    let cusps = ctx.cusps();
    let red_e: HashMap<PointClass, SparseVec<CycloElem>> = data
        .cycles
        .par_iter()
        .map(|(p, ch)| Ok((*p, reduce_embedded(basis, ctx, ch, &field)?)))
        .collect::<Result<_, crate::Error>>()?;
    let red_phi: HashMap<PointClass, SparseVec<CycloElem>> = cusps
        .iter()
        .map(|q| {
            let mut acc = SparseVec::new();
            for (a, w) in &data.weights {
                let aq = q.rep().scale(*a as i64, n).class(n);
                axpy(&mut acc, w, &red_e[&aq]);
            }
            (*q, acc)
        })
        .collect();
    let one = CycloElem::one(&field);
    let neg_c = CycloElem::from_rational(&field, -c.clone());
    let pos_c = CycloElem::from_rational(&field, c.clone());
    let closed_r = |g: &GroupElem| -> SparseVec<CycloElem> {
        let mut v: SparseVec<CycloElem> = basis.coords_of(g, ctx).iter().map(|(j, x)| (*j, one.scale(x))).collect();
        axpy(&mut v, &neg_c, &red_phi[&g.cusp_of_column(Column::First, n)]);
        axpy(&mut v, &pos_c, &red_phi[&g.cusp_of_column(Column::Second, n)]);
        v
    };

    // R fixes ker δ
    let kernel = boundary_kernel(ctx, basis);
    let mut kernel_fail = 0usize;
    for x in &kernel {
        let mut rx = SparseVec::new();
        let mut xx = SparseVec::new();
        for (j, a) in x {
            let g = basis.basis()[*j];
            axpy(&mut rx, &one.scale(a), &closed_r(&g));
            xx.insert(*j, one.scale(a));
        }
        if rx != xx {
            kernel_fail += 1;
        }
    }
    reports.push(Report::new(
        n,
        "retraction.fixes_kernel",
        kernel_fail == 0,
        json!({"kernel_dim": kernel.len(), "failures": kernel_fail}),
    ));

    // operational R by solving boundary preimages in span{E_P}
    let deltas: Vec<CuspDivisor<CycloElem>> = cusps.iter().map(|p| boundary(&data.cycles[p])).collect();
    let agree = match solve_boundary_preimages(ctx, &deltas) {
        None => None,
        Some(pre) => {
            let idx = |q: &PointClass| ctx.cusp_index(q).unwrap();
            let bad = ctx
                .group()
                .par_iter()
                .filter(|g| {
                    let (i1, i2) =
                        (idx(&g.cusp_of_column(Column::First, n)), idx(&g.cusp_of_column(Column::Second, n)));
                    let mut v: SparseVec<CycloElem> =
                        basis.coords_of(g, ctx).iter().map(|(j, x)| (*j, one.scale(x))).collect();
                    for (p, cusp) in cusps.iter().enumerate() {
                        // x_P for [Q1] − [Q2] = ([Q1] − [Q₀]) − ([Q2] − [Q₀])
                        let mut xp = pre[i1][p].clone();
                        xp.add_assign_ref(&pre[i2][p].neg());
                        if xp.is_zero() {
                            continue;
                        }
                        let xp = xp.embed(field.order()).unwrap().neg();
                        axpy(&mut v, &xp, &red_e[cusp]);
                    }
                    v != closed_r(g)
                })
                .count();
            Some(bad)
        }
    };
    reports.push(Report::new(
        n,
        "retraction.matches_operational",
        agree == Some(0),
        json!({"solvable": agree.is_some(), "disagreements": agree}),
    ));
    Ok((reports, Some(c)))
}
