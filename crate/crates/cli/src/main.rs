mod cache;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use eiscycles::eisen::{
    boundary_eisenstein_direct, eisenstein_cycle, span_checks, verify_boundary, verify_hecke_eigen,
    verify_hecke_eigen_with, verify_retraction, MuDomain, Report,
};
use eiscycles::eisfun::FTable;
use eiscycles::error::{HeckeError, LevelError};
use eiscycles::exactnum::CycloElem;
use eiscycles::hecke::{default_hecke_prime, is_prime, load_theta};
use eiscycles::modgroup::{cusp_count, genus, group_order, LevelContext};
use eiscycles::msym::{expected_dim, RelationBasis};
use eiscycles::verify;

use output::Format;

#[derive(Parser)]
#[command(name = "eiscycles", version, about = "Eisenstein cycles on X(N): construction and verification")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Directory for cached reduction bases.
    #[arg(long, env = "EISCYCLES_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Group order, cusp count, genus and dim V_N.
    Group {
        #[arg(long)]
        level: u32,
    },
    /// The cycle E_P and its boundary.
    Eis {
        #[arg(long)]
        level: u32,
        /// Point as u,v.
        #[arg(long, value_parser = parse_point)]
        point: (i64, i64),
        #[arg(long)]
        allow_low_order: bool,
    },
    /// Run verifiers; exit status 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        which: Which,
        #[command(flatten)]
        opts: VerifyOpts,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Hecke,
    Boundary,
    Retraction,
    Cm,
    Lvalues,
    /// Function-level Hecke identities for the c-symmetrized default family.
    Identities,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MuArg {
    Full,
    Half,
    Both,
}

#[derive(Args)]
struct VerifyOpts {
    #[arg(long)]
    level: u32,
    /// Hecke prime; default is the smallest prime ≡ 1 mod N.
    #[arg(long)]
    prime: Option<u64>,
    /// Decimal digits for numeric checks.
    #[arg(long, default_value_t = 30)]
    prec: u32,
    /// Weighted matrix family (one `weight a b c d` per line) used in place of the default.
    #[arg(long)]
    theta_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MuArg::Both)]
    mu_domain: MuArg,
}

fn parse_point(s: &str) -> Result<(i64, i64), String> {
    let (u, v) = s.split_once(',').ok_or_else(|| format!("expected u,v, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(u)?, p(v)?))
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<eiscycles::Error> for Failure {
    fn from(e: eiscycles::Error) -> Self {
        use eiscycles::Error as E;
        match e {
            E::Level(_) | E::Io(_) => Failure::Usage(e.to_string()),
            E::Hecke(
                HeckeError::NotPrime(_)
                | HeckeError::NotOddPrime(_)
                | HeckeError::NotOneModN(..)
                | HeckeError::Parse { .. }
                | HeckeError::Determinant { .. }
                | HeckeError::Empty,
            ) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<LevelError> for Failure {
    fn from(e: LevelError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, ok)) => {
            print!("{}", output::render(&doc, cli.format));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(Value, bool), Failure> {
    let cache = cli.cache_dir.as_deref();
    match &cli.cmd {
        Cmd::Group { level } => {
            let ctx = LevelContext::new(*level)?;
            let basis = cache::load_or_build(&ctx, cache)?;
            let n = *level;
            if basis.dim() as u64 != expected_dim(n) || ctx.group().len() as u64 != group_order(n) {
                return Err(Failure::Internal(format!("structure mismatch at level {n}")));
            }
            Ok((
                json!({"level": n, "group": group_order(n), "cusps": cusp_count(n), "genus": genus(n), "dim": basis.dim()}),
                true,
            ))
        }
        Cmd::Eis { level, point, allow_low_order } => {
            let ctx = LevelContext::new(*level)?;
            let table = FTable::new(&ctx);
            let p = ctx.class(point.0, point.1);
            let cyc = eisenstein_cycle(p, &ctx, &table, *allow_low_order)?;
            let d = boundary_eisenstein_direct(&cyc, &ctx, &table)?;
            // every generator, zeros included, in canonical order
            let zero = CycloElem::zero(ctx.cyclo());
            let mut gens = ctx.group().to_vec();
            gens.sort();
            let chain: Vec<Value> =
                gens.iter().map(|g| json!({"g": g, "coeff": cyc.chain.terms().get(g).unwrap_or(&zero)})).collect();
            Ok((json!({"level": level, "point": p, "chain": chain, "boundary": d.to_json()}), true))
        }
        Cmd::Verify { which, opts } => verify_cmd(*which, opts, cache),
    }
}

struct Timer(Map<String, Value>);

impl Timer {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.insert(name.to_string(), json!(t.elapsed().as_millis() as u64));
        out
    }
}

fn hecke_prime(n: u32, prime: Option<u64>) -> Result<u64, Failure> {
    let l = prime.unwrap_or_else(|| default_hecke_prime(n));
    if l.is_multiple_of(2) || !is_prime(l) {
        return Err(Failure::Usage(format!("{l} is not an odd prime")));
    }
    if l % n as u64 != 1 {
        return Err(Failure::Usage(format!("{l} is not congruent to 1 modulo {n}")));
    }
    Ok(l)
}

const CM_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 29, 31];

fn verify_cmd(which: Which, opts: &VerifyOpts, cache: Option<&std::path::Path>) -> Result<(Value, bool), Failure> {
    let n = opts.level;
    let ctx = LevelContext::new(n)?;
    let wants = |w: Which| which == w || which == Which::All;
    if wants(Which::Lvalues) && opts.prec < 20 {
        return Err(Failure::Usage(format!("--prec must be at least 20, got {}", opts.prec)));
    }
    let hecke_l =
        if wants(Which::Hecke) && opts.theta_file.is_none() { Some(hecke_prime(n, opts.prime)?) } else { None };
    let theta = opts.theta_file.as_deref().map(load_theta).transpose()?;

    let total = Instant::now();
    let mut timer = Timer(Map::new());
    let mut reports: Vec<Report> = Vec::new();
    let mut normalization = None;

    let needs_table = which != Which::Cm && which != Which::Lvalues && which != Which::Identities;
    let table = needs_table.then(|| timer.time("f_table", || FTable::new(&ctx)));
    let needs_basis = matches!(which, Which::Hecke | Which::Retraction | Which::All);
    let basis: Option<RelationBasis> =
        if needs_basis { Some(timer.time("basis", || cache::load_or_build(&ctx, cache))?) } else { None };

    if which == Which::All {
        let t = table.as_ref().unwrap();
        let b = basis.as_ref().unwrap();
        reports.extend(timer.time("structure", || verify::structure(&ctx, b)));
        reports.extend(timer.time("f_consistency", || verify::f_consistency(&ctx)));
        reports.extend(timer.time("span", || span_checks(&ctx, b, t))?);
    }
    if wants(Which::Hecke) {
        let (t, b) = (table.as_ref().unwrap(), basis.as_ref().unwrap());
        match &theta {
            Some(fam) => {
                let rs = timer.time("theta", || verify::theta(fam, &ctx, t));
                let related = eiscycles::verify::all_pass(&rs);
                reports.extend(rs);
                let one_mod_n = fam.det() % n == 1u32.into();
                if related && one_mod_n {
                    reports.push(timer.time("hecke", || verify_hecke_eigen_with(fam, &ctx, b, t))?);
                }
            }
            None => {
                let l = hecke_l.unwrap();
                reports.push(timer.time("hecke", || verify_hecke_eigen(l, &ctx, b, t))?);
            }
        }
    }
    if wants(Which::Boundary) {
        let modes: &[MuDomain] = match opts.mu_domain {
            MuArg::Full => &[MuDomain::Full],
            MuArg::Half => &[MuDomain::Half],
            MuArg::Both => &[MuDomain::Half, MuDomain::Full],
        };
        let t = table.as_ref().unwrap();
        reports.extend(timer.time("boundary", || verify_boundary(&ctx, t, modes)));
    }
    if wants(Which::Cm) {
        match (&theta, opts.prime) {
            (Some(fam), _) if which == Which::Cm => {
                let r = eiscycles::hecke::verify_cm(fam);
                reports.push(Report::new(n, "theta.cm", r.pass, serde_json::to_value(&r).unwrap()));
            }
            (_, Some(l)) => reports.extend(timer.time("cm", || verify::cm(&[l]))),
            _ => reports.extend(timer.time("cm", || verify::cm(&CM_PRIMES))),
        }
    }
    if wants(Which::Lvalues) {
        reports.extend(timer.time("lvalues", || verify::lvalues(n, opts.prec, opts.prec - 5))?);
    }
    if which == Which::Identities {
        let l = opts.prime.unwrap_or_else(|| default_hecke_prime(n));
        reports.extend(timer.time("identities", || verify::function_identities(&ctx, l))?);
    }
    if wants(Which::Retraction) {
        let (t, b) = (table.as_ref().unwrap(), basis.as_ref().unwrap());
        let (rs, c) = timer.time("retraction", || verify_retraction(&ctx, b, t))?;
        reports.extend(rs);
        normalization = c.map(|c| eiscycles::exactnum::format_rational(&c));
    }

    timer.0.insert("total".into(), json!(total.elapsed().as_millis() as u64));
    let ok = verify::all_pass(&reports);
    let doc = json!({
        "level": n,
        "command": format!("verify {}", which.to_possible_value().unwrap().get_name()),
        "status": if ok { "pass" } else { "fail" },
        "normalization": normalization,
        "reports": reports,
        "timing_ms": Value::Object(timer.0),
    });
    Ok((doc, ok))
}
