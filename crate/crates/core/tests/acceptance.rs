//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 3, 6 and 10 do not hold as stated. They are evaluated in full and printed as
//! FAIL, with the measured outcome pinned (`KNOWN_*`). The process exits nonzero on any
//! other failure, or when a known failure deviates from its record.

use std::process::ExitCode;
use std::time::Instant;

use eiscycles::eisen::{
    boundary_eisenstein_direct, eisenstein_cycle, span_checks, verify_boundary, verify_hecke_eigen, verify_retraction,
    MuDomain, Report,
};
use eiscycles::eisfun::FTable;
use eiscycles::exactnum::{rat, CycloElem};
use eiscycles::modgroup::{cusp_count, genus, LevelContext};
use eiscycles::msym::{build_quotient, expected_dim};
use eiscycles::verify::{self, all_pass};

struct Outcome {
    ok: bool,
    detail: String,
    /// For criteria with a recorded known failure: whether the failure matched the record.
    recorded: Option<bool>,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into(), recorded: None }
}

fn failed_checks(reports: &[Report]) -> String {
    let bad: Vec<String> =
        reports.iter().filter(|r| !r.status.is_pass()).map(|r| format!("{}@N={}", r.check, r.level)).collect();
    if bad.is_empty() {
        "all checks pass".into()
    } else {
        format!("failing: {}", bad.join(", "))
    }
}

fn ctx(n: u32) -> LevelContext {
    LevelContext::new(n).expect("valid level")
}

fn c1() -> Outcome {
    let mut reports = Vec::new();
    for n in [3, 5, 7, 9] {
        reports.extend(verify::f_consistency(&ctx(n)));
    }
    outcome(all_pass(&reports), failed_checks(&reports))
}

fn c2() -> Outcome {
    let mut reports = Vec::new();
    for (n, l) in [(3, 7), (3, 13), (5, 11), (7, 29)] {
        let c = ctx(n);
        let basis = build_quotient(&c);
        let table = FTable::new(&c);
        match verify_hecke_eigen(l, &c, &basis, &table) {
            Ok(r) => reports.push(r),
            Err(e) => return outcome(false, format!("(N={n}, l={l}): {e}")),
        }
    }
    outcome(all_pass(&reports), failed_checks(&reports))
}

/// Levels at which the closed form, as printed with the half μ-range, differs from the
/// direct boundary. The μ⁻¹ pairing is expected to match everywhere.
const KNOWN_C3_HALF_FAILURES: [u32; 1] = [7];

fn c3() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut as_recorded = true;
    for n in [3, 5, 7] {
        let c = ctx(n);
        let table = FTable::new(&c);
        let reports = verify_boundary(&c, &table, &[MuDomain::Half, MuDomain::Full]);
        for r in &reports {
            match r.check.as_str() {
                "boundary.theorem.half" => {
                    if !r.status.is_pass() {
                        ok = false;
                        notes.push(format!(
                            "printed half form differs from direct boundary at N={n} ({} of {} cusps; mu^-1 pairing matches)",
                            r.witness["mismatched_points"],
                            c.cusps().len()
                        ));
                    }
                    as_recorded &= r.status.is_pass() != KNOWN_C3_HALF_FAILURES.contains(&n);
                }
                "boundary.direct" | "boundary.theorem.half.inverse" => {
                    if !r.status.is_pass() {
                        ok = false;
                        as_recorded = false;
                        notes.push(format!("{} fails at N={n}", r.check));
                    }
                }
                "boundary.theorem.full" => {
                    let bad_degree = r.witness["points_with_nonzero_degree"].as_u64().unwrap_or(0);
                    if bad_degree == 0 {
                        ok = false;
                        as_recorded = false;
                        notes.push(format!("full mu range unexpectedly passes degree check at N={n}"));
                    }
                }
                _ => {}
            }
        }
    }
    let c = ctx(3);
    let table = FTable::new(&c);
    let cyc = eisenstein_cycle(c.class(1, 0), &c, &table, false).unwrap();
    let d = boundary_eisenstein_direct(&cyc, &c, &table).unwrap();
    for q in c.cusps() {
        let want = if *q == c.class(1, 0) { rat(9, 2) } else { rat(-3, 2) };
        let got = d.coeff(q).cloned().unwrap_or_else(|| CycloElem::zero(c.cyclo()));
        if got.as_rational() != Some(want.clone()) {
            ok = false;
            as_recorded = false;
            notes.push(format!("N=3 oracle at {q}: got {got}, want {want}"));
        }
    }
    notes.push("full mu range fails the degree check at 3, 5, 7; N=3 oracle 9/2, -3/2 holds".into());
    Outcome { ok, detail: notes.join("; "), recorded: Some(as_recorded) }
}

fn c4() -> Outcome {
    let r = verify::twisted_bernoulli(&[1, 2, 3, 5]);
    outcome(r.status.is_pass(), format!("{} cases", r.witness["cases"]))
}

fn c5() -> Outcome {
    let reports = verify::cm(&[2, 3, 5, 7, 11, 13, 29, 31]);
    outcome(all_pass(&reports), failed_checks(&reports))
}

/// (N, l, total f failures, f failures off the jump set, f̂ failures) as measured.
const KNOWN_C6: [(u32, u64, usize, usize, usize); 3] = [(3, 5, 16, 0, 4), (5, 3, 64, 24, 8), (3, 7, 16, 0, 4)];

fn c6() -> Outcome {
    let mut ok = true;
    let mut matches_record = true;
    let mut notes = Vec::new();
    for (n, l, k_total, k_off, k_hat) in KNOWN_C6 {
        let reports = match verify::function_identities(&ctx(n), l) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("(N={n}, l={l}): {e}")),
        };
        let f = &reports[0].witness;
        let total = f["failures"].as_u64().unwrap() as usize;
        let off = f["failures_off_jump_set"].as_array().unwrap().len();
        let hat = reports[1].witness["failures"].as_array().unwrap().len();
        ok &= all_pass(&reports);
        matches_record &= (total, off, hat) == (k_total, k_off, k_hat);
        notes.push(format!("(N={n},l={l}) f: {total} fail, {off} off jump set; fhat: {hat} fail"));
    }
    Outcome { ok, detail: notes.join("; "), recorded: Some(matches_record) }
}

fn c7() -> Outcome {
    let mut reports = Vec::new();
    for n in [3, 5, 7] {
        match verify::lvalues(n, 40, 25) {
            Ok(r) => reports.extend(r),
            Err(e) => return outcome(false, format!("N={n}: {e}")),
        }
    }
    let has_triv = reports.iter().any(|r| r.check == "lvalues.trivial_mod_3");
    outcome(all_pass(&reports) && has_triv, failed_checks(&reports))
}

fn c8() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [3, 5, 7] {
        let c = ctx(n);
        let basis = build_quotient(&c);
        let table = FTable::new(&c);
        let (reports, norm) = match verify_retraction(&c, &basis, &table) {
            Ok(x) => x,
            Err(e) => return outcome(false, format!("N={n}: {e}")),
        };
        ok &= all_pass(&reports);
        match norm {
            Some(cn) => {
                let phi = eiscycles::eisen::chars::phi(n) as i64;
                let base = rat(1, 2 * n as i64 * phi);
                notes.push(format!("N={n}: c = {cn} = {} x 1/(2N phi(N))", &cn / &base));
                if n == 3 && cn != rat(1, 6) {
                    ok = false;
                }
            }
            None => {
                ok = false;
                notes.push(format!("N={n}: no consistent c"));
            }
        }
        if !all_pass(&reports) {
            notes.push(failed_checks(&reports));
        }
    }
    outcome(ok, notes.join("; "))
}

fn c9() -> Outcome {
    let mut reports = Vec::new();
    for n in [3, 5, 7] {
        let c = ctx(n);
        let basis = build_quotient(&c);
        let table = FTable::new(&c);
        match span_checks(&c, &basis, &table) {
            Ok(r) => reports.extend(r),
            Err(e) => return outcome(false, format!("N={n}: {e}")),
        }
    }
    outcome(all_pass(&reports), failed_checks(&reports))
}

/// Stated (N, dim V_N). The N = 11 value counts 120 cusps; the cusp formula gives 60.
const STATED_DIMS: [(u32, usize); 4] = [(3, 3), (5, 11), (7, 29), (11, 171)];
const KNOWN_C10_DIM_11: usize = 111;

fn c10() -> Outcome {
    let mut reports = Vec::new();
    let mut ok = true;
    let mut as_recorded = true;
    let mut notes = Vec::new();
    for (n, want) in STATED_DIMS {
        let c = ctx(n);
        let basis = build_quotient(&c);
        let classical = (2 * genus(n) + cusp_count(n) - 1) as usize;
        let dim = basis.dim();
        if dim != classical || expected_dim(n) as usize != classical {
            as_recorded = false;
        }
        if dim != want {
            ok = false;
            as_recorded &= n == 11 && dim == KNOWN_C10_DIM_11;
            notes.push(format!("N={n}: dim {dim} = 2g+c-1 with g={}, c={}, stated {want}", genus(n), cusp_count(n)));
        } else {
            notes.push(format!("N={n}: dim {dim}"));
        }
        reports.extend(verify::structure(&c, &basis));
    }
    ok &= all_pass(&reports);
    as_recorded &= all_pass(&reports);
    notes.push(failed_checks(&reports));
    Outcome { ok, detail: notes.join("; "), recorded: Some(as_recorded) }
}

fn main() -> ExitCode {
    type Crit = (u32, &'static str, fn() -> Outcome);
    let crits: [Crit; 10] = [
        (1, "F consistency", c1),
        (2, "Hecke eigenvector", c2),
        (3, "boundary formula", c3),
        (4, "twisted Bernoulli sums", c4),
        (5, "condition C_l", c5),
        (6, "function-level Hecke identities", c6),
        (7, "L-values", c7),
        (8, "retraction", c8),
        (9, "span and kernel", c9),
        (10, "structural dimensions", c10),
    ];
    let mut unexpected = 0;
    for (k, name, f) in crits {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let tag = match (o.ok, o.recorded) {
            (true, _) => "",
            (false, Some(true)) => " [known failure, matches record]",
            (false, Some(false)) => " [deviates from record]",
            (false, None) => "",
        };
        if !o.ok && o.recorded != Some(true) {
            unexpected += 1;
        }
        println!("criterion {k:>2} {} {name} ({secs:.1}s): {}{tag}", pf(o.ok), o.detail);
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn pf(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
