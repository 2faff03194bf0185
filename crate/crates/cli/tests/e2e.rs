use std::path::Path;
use std::process::{Command, Output};

use eiscycles::exactnum::{parse_rational, Rational};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eiscycles"))
        .args(args)
        .env_remove("EISCYCLES_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name).display().to_string()
}

fn report<'a>(doc: &'a Value, check: &str) -> &'a Value {
    doc["reports"].as_array().unwrap().iter().find(|r| r["check"] == check).unwrap_or_else(|| panic!("{check} missing"))
}

/// Coefficient in the base rational field, or None if it has irrational part.
fn rational_coeff(c: &Value) -> Option<Rational> {
    let cs = c["coeffs"].as_array().unwrap();
    if cs[1..].iter().any(|x| x != "0") {
        return None;
    }
    Some(parse_rational(cs[0].as_str().unwrap()).unwrap())
}

#[test]
fn group_listing() {
    let out = run(&["group", "--level", "3"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(
        (v["group"].as_u64(), v["cusps"].as_u64(), v["genus"].as_u64(), v["dim"].as_u64()),
        (Some(12), Some(4), Some(0), Some(3))
    );
    let v = json_of(&run(&["group", "--level", "7"]));
    assert_eq!(
        (v["group"].as_u64(), v["cusps"].as_u64(), v["genus"].as_u64(), v["dim"].as_u64()),
        (Some(168), Some(24), Some(3), Some(29))
    );
}

#[test]
fn bad_levels_are_usage_errors() {
    let out = run(&["group", "--level", "4"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("level must be odd"));
    assert_eq!(code(&run(&["group", "--level", "1"])), 2);
    assert_eq!(code(&run(&["verify", "boundary", "--level", "8"])), 2);
    assert_eq!(code(&run(&["group"])), 2);
    assert_eq!(code(&run(&["eis", "--level", "3", "--point", "1;0"])), 2);
}

#[test]
fn eis_level_3() {
    let out = run(&["eis", "--level", "3", "--point", "1,0"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["chain"].as_array().unwrap().len(), 12);
    let b = v["boundary"].as_array().unwrap();
    assert_eq!(b.len(), 4);
    for t in b {
        let want = if t["cusp"] == serde_json::json!([1, 0]) { parse_rational("9/2") } else { parse_rational("-3/2") };
        assert_eq!(rational_coeff(&t["coeff"]), Some(want.unwrap()));
    }
    let again = run(&["eis", "--level", "3", "--point", "2,0"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn eis_level_5_has_degree_zero_boundary() {
    let v = json_of(&run(&["eis", "--level", "5", "--point", "1,0"]));
    assert_eq!(v["chain"].as_array().unwrap().len(), 60);
    let mut total = vec![Rational::from_integer(0.into()); 4];
    for t in v["boundary"].as_array().unwrap() {
        for (i, c) in t["coeff"]["coeffs"].as_array().unwrap().iter().enumerate() {
            total[i] += parse_rational(c.as_str().unwrap()).unwrap();
        }
    }
    assert!(total.iter().all(|x| *x == Rational::from_integer(0.into())));
}

#[test]
fn eis_low_order_needs_flag() {
    let out = run(&["eis", "--level", "9", "--point", "3,0"]);
    assert_eq!(code(&out), 2);
    let out = run(&["eis", "--level", "9", "--point", "3,0", "--allow-low-order", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("section,key,coeff\n"));
}

#[test]
fn verify_hecke() {
    let out = run(&["verify", "hecke", "--level", "3", "--prime", "7"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(report(&v, "hecke.eigen")["witness"]["eigenvalue"], "8");
    assert!(v["timing_ms"]["total"].is_u64());
    // default prime for N = 5 is 11
    let v = json_of(&run(&["verify", "hecke", "--level", "5"]));
    assert_eq!(report(&v, "hecke.eigen")["witness"]["prime"], "11");
    assert_eq!(code(&run(&["verify", "hecke", "--level", "3", "--prime", "11"])), 2);
    assert_eq!(code(&run(&["verify", "hecke", "--level", "3", "--prime", "25"])), 2);
}

#[test]
fn verify_hecke_with_theta_file() {
    let out = run(&["verify", "hecke", "--level", "3", "--theta-file", &data("theta_7.txt")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    for c in ["theta.relations", "theta.cm", "theta.f_identity", "hecke.eigen"] {
        assert_eq!(report(&v, c)["status"], "pass", "{c}");
    }
    assert_eq!(code(&run(&["verify", "hecke", "--level", "3", "--theta-file", "/nonexistent/theta.txt"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 1 0 0\n").unwrap();
    assert_eq!(code(&run(&["verify", "hecke", "--level", "3", "--theta-file", bad.to_str().unwrap()])), 2);
}

#[test]
fn verify_boundary_records_full_reading() {
    let out = run(&["verify", "boundary", "--level", "3", "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS  boundary.theorem.half\n") || text.contains("PASS  boundary.theorem.half "));
    assert!(text.contains("FAIL  boundary.theorem.full  (alternative reading"));
}

#[test]
fn verify_lvalues() {
    let out = run(&["verify", "lvalues", "--level", "3", "--prec", "30"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let ch = &report(&v, "lvalues")["witness"]["characters"][0];
    assert!(ch["series"].as_str().unwrap().starts_with("2.0000000000"));
    assert_eq!(rational_coeff(&ch["exact"]), parse_rational("2").ok());
    assert_eq!(report(&v, "lvalues.trivial_mod_3")["status"], "pass");
    assert_eq!(code(&run(&["verify", "lvalues", "--level", "3", "--prec", "10"])), 2);
}

#[test]
fn verify_retraction_reports_normalization() {
    let out = run(&["verify", "retraction", "--level", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["normalization"], "1/6");
}

#[test]
fn verify_cm_and_failing_identity() {
    assert_eq!(code(&run(&["verify", "cm", "--level", "3"])), 0);
    let out = run(&["verify", "identities", "--level", "5", "--prime", "3", "--format", "csv"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("5,hecke.function_identity_f,fail"));
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn cache_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["verify", "all", "--level", "5", "--cache-dir", d];
    let first = run(&args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stdout));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let hit = run(&args);
    std::fs::remove_dir_all(dir.path()).unwrap();
    let rebuilt = run(&args);
    let a = strip_timing(json_of(&first));
    assert_eq!(a, strip_timing(json_of(&hit)));
    assert_eq!(a, strip_timing(json_of(&rebuilt)));
    assert_eq!(a["normalization"], "1/20");
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_eiscycles"))
        .args(["group", "--level", "5"])
        .env("EISCYCLES_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert_eq!(names.len(), 1);
    assert!(names[0].starts_with("basis-N5-"));
}
