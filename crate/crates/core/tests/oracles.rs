use std::path::PathBuf;

use eiscycles::eisen::chars::{enumerate_even_chars, l_chi_exact, l_chi_series};
use eiscycles::eisen::{
    all_cycles, boundary_eisenstein_direct, eisenstein_cycle, verify_hecke_eigen_with, verify_retraction,
};
use eiscycles::eisfun::FTable;
use eiscycles::exactnum::{rat, HpReal};
use eiscycles::hecke::{check_f_identity, check_theta_relations, load_theta, verify_cm, HeckeFamily};
use eiscycles::modgroup::LevelContext;
use eiscycles::msym::build_quotient;

fn theta(m: u32) -> HeckeFamily {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", &format!("theta_{m}.txt")].iter().collect();
    load_theta(&p).unwrap()
}

const THETA_M: [u32; 6] = [3, 5, 7, 11, 13, 29];

#[test]
fn theta_fixtures_pass_relations_and_cm() {
    for m in THETA_M {
        let fam = theta(m);
        assert_eq!(fam.det(), &m.into());
        let r = check_theta_relations(&fam);
        assert!(r.pass, "m={m}: {:?}", r.diff);
        let c = verify_cm(&fam);
        assert!(c.pass && c.classes as u32 == m + 1, "m={m}");
    }
}

#[test]
fn theta_fixtures_satisfy_f_identity() {
    for n in [3u32, 5, 7] {
        let ctx = LevelContext::new(n).unwrap();
        let table = FTable::new(&ctx);
        for m in THETA_M.into_iter().filter(|m| m % n != 0) {
            let r = check_f_identity(&theta(m), &ctx, &table);
            assert!(r.pass, "N={n} m={m}: {} failures", r.failures.len());
        }
    }
}

#[test]
fn theta_family_gives_hecke_eigenvalue() {
    for (n, m) in [(3u32, 7u32), (3, 13), (5, 11), (7, 29)] {
        let ctx = LevelContext::new(n).unwrap();
        let basis = build_quotient(&ctx);
        let table = FTable::new(&ctx);
        let r = verify_hecke_eigen_with(&theta(m), &ctx, &basis, &table).unwrap();
        assert!(r.status.is_pass(), "N={n} m={m}: {}", r.witness);
        assert_eq!(r.witness["eigenvalue"], (m + 1).to_string());
    }
}

#[test]
fn retraction_constant_is_one_over_n_phi() {
    for (n, c) in [(5u32, rat(1, 20)), (7, rat(1, 42))] {
        let ctx = LevelContext::new(n).unwrap();
        let basis = build_quotient(&ctx);
        let table = FTable::new(&ctx);
        let (reports, norm) = verify_retraction(&ctx, &basis, &table).unwrap();
        assert!(reports.iter().all(|r| r.status.is_pass()));
        assert_eq!(norm, Some(c));
    }
}

#[test]
fn l_values_level_5_at_50_digits() {
    let chars = enumerate_even_chars(5);
    assert_eq!(chars.len(), 2);
    for chi in &chars {
        let exact = l_chi_exact(chi).embed_complex(50);
        let series = l_chi_series(chi, 50).unwrap();
        let tol = HpReal::ten_pow_neg(45, series.bits());
        assert!(exact.sub(&series).abs().lt(&tol), "{}", chi.label());
    }
}

#[test]
fn cycles_depend_only_on_the_class_and_boundaries_are_equivariant() {
    let ctx = LevelContext::new(5).unwrap();
    let table = FTable::new(&ctx);
    for (u, v) in [(1, 0), (2, 3), (0, 4)] {
        let a = eisenstein_cycle(ctx.class(u, v), &ctx, &table, false).unwrap();
        let b = eisenstein_cycle(ctx.class(-u, -v), &ctx, &table, false).unwrap();
        assert_eq!(a, b);
    }
    let ctx = LevelContext::new(7).unwrap();
    let table = FTable::new(&ctx);
    let cycles = all_cycles(&ctx, &table);
    let g = ctx.mul(&ctx.s(), &ctx.t());
    for c in cycles.iter().take(6) {
        let d = boundary_eisenstein_direct(c, &ctx, &table).unwrap();
        assert!(d.has_degree_zero());
        let moved = eisenstein_cycle(ctx.act(&g, c.point), &ctx, &table, false).unwrap();
        let dm = boundary_eisenstein_direct(&moved, &ctx, &table).unwrap();
        assert_eq!(dm, d.translate(&g, &ctx));
    }
}
