//! Subcommands and their dispatch.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nchopf::algebra::{Element, Presentation};
use nchopf::chern::{
    asd_residual, chern, index, normalization, perturbed_projection, two_paths, ASD_CONTROL_FLOOR, ChernPath,
};
use nchopf::classical::classical_limit;
use nchopf::fibration::{
    connection_structure, gauge_identities, grassmann_connection, projection, projection_s7, su2_valuedness_check,
};
use nchopf::forms::{Calculus, ElementMatrix};
use nchopf::hopf::{
    compare_with_grassmannian, ell_cache_entries, galois_bijectivity_on_component, galois_witnesses,
    matrix_coinvariant, preload_ell, strong_connection_axioms_with, Lift, Tensor, GALOIS_CAP, STRONG_CAP,
};
use nchopf::scalars::Scalar;
use nchopf::split::GENERIC_THETA;
use nchopf::Error;

use crate::expr::{parse, parse_value, Value as ExprValue};
use crate::report::{measured, Report, Status};
use crate::suite;

/// Environment variable naming the directory that persists the memo of the
/// recursive lift between runs.
pub const CACHE_ENV: &str = "NCHOPF_CACHE_DIR";
const CACHE_FILE: &str = "ell-recursive-v1.txt";

#[derive(Parser, Debug)]
#[command(name = "nchopf", version, about = "Exact checks on the theta-deformed Hopf fibration S7 -> S4")]
pub struct Cli {
    /// Record wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GaloisCheck {
    Surjectivity,
    Bijectivity,
    StrongConnection,
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LiftArg {
    Recursive,
    PeterWeyl,
}

impl From<LiftArg> for Lift {
    fn from(l: LiftArg) -> Lift {
        match l {
            LiftArg::Recursive => Lift::Recursive,
            LiftArg::PeterWeyl => Lift::PeterWeyl,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form of an expression.
    Nf {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        expr: String,
    },
    /// Projection laws of p_(n).
    Projection {
        #[arg(long)]
        n: usize,
        /// Certify idempotency by multiplication instead of the Gram certificate.
        #[arg(long)]
        direct: bool,
        /// Include the matrix entries in the report.
        #[arg(long)]
        matrix: bool,
    },
    /// Grassmannian connection of p_(n) and its gauge form.
    Connection {
        #[arg(long)]
        n: usize,
    },
    /// Chern character ch_k(p_(n)).
    Chern {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Multiply by (-1)^k (2k)!/k!.
        #[arg(long)]
        normalized: bool,
    },
    /// Index of the twisted Dirac operator.
    Index {
        #[arg(long)]
        n: usize,
    },
    /// Anti-selfduality of the curvature of p_(n).
    Asd {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = GENERIC_THETA)]
        theta: f64,
    },
    /// Hopf-Galois and strong-connection checks.
    HopfGalois {
        #[arg(long, value_enum)]
        check: GaloisCheck,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = LiftArg::Recursive)]
        lift: LiftArg,
    },
    /// Regressions at mu = 1.
    ClassicalLimit {
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
    },
    /// The full acceptance suite.
    Selftest {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn usage(report: &mut Report, message: String) {
    report.error = Some(message);
}

fn matrix_strings(m: &ElementMatrix) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j).to_string()).collect()).collect()
}

/// Round trip of a rendered value through the parser.
pub fn round_trips(value: &ExprValue, pres: nchopf::algebra::Pres) -> bool {
    let text = value.to_string();
    match (value, parse_value(&text, pres)) {
        (ExprValue::Scalar(a), Ok(ExprValue::Scalar(b))) => *a == b,
        (ExprValue::Scalar(a), Ok(ExprValue::Element(b))) => Element::scalar(pres, a.clone()) == b,
        (ExprValue::Element(a), Ok(ExprValue::Element(b))) => *a == b,
        (ExprValue::Element(a), Ok(ExprValue::Scalar(b))) => *a == Element::scalar(pres, b),
        (ExprValue::Form(a), Ok(ExprValue::Form(b))) => *a == b,
        (ExprValue::Form(a), Ok(ExprValue::Scalar(b))) => a.is_zero() && b.is_zero(),
        (ExprValue::Tensor(a), Ok(ExprValue::Tensor(b))) => *a == b,
        _ => false,
    }
}

fn nf(report: &mut Report, preset: &str, text: &str) -> Result<(), Error> {
    report.preset = Some(preset.to_string());
    let pres = Presentation::preset(preset)?;
    if let Err(e) = parse(text, pres) {
        usage(report, format!("{}:{}: {}", e.line, e.column, e.message));
        return Ok(());
    }
    let value = match parse_value(text, pres) {
        Ok(v) => v,
        Err(e) => {
            usage(report, e.to_string());
            return Ok(());
        }
    };
    let kind = match &value {
        ExprValue::Scalar(_) => "scalar",
        ExprValue::Element(_) => "element",
        ExprValue::Form(_) => "form",
        ExprValue::Tensor(_) => "tensor",
    };
    report.result("input", json!(text)).result("kind", json!(kind)).result("normal_form", json!(value.to_string()));
    if let ExprValue::Form(f) = &value {
        report.result("calculus", json!(format!("{:?}", f.calc)));
        report.result("zero_mod_sphere", json!(f.is_zero_mod_sphere()?));
    }
    report.check("render round-trips", round_trips(&value, pres), Value::Null);
    Ok(())
}

fn projection_cmd(report: &mut Report, n: usize, direct: bool, with_matrix: bool) -> Result<(), Error> {
    let p = projection(n)?;
    let r = p.verify(direct)?;
    let want = Element::scalar(Presentation::s4(), Scalar::int(n as i64 + 1));
    report
        .result("n", json!(n))
        .result("size", json!(r.size))
        .result("trace", json!(r.trace.to_string()))
        .result("method", json!(r.method));
    if with_matrix {
        report.result("matrix", json!(matrix_strings(&p.matrix)));
    }
    report.check("idempotent", r.idempotent, Value::Null);
    report.check("selfadjoint", r.selfadjoint, Value::Null);
    report.check("matches kets", r.matches_kets, Value::Null);
    report.check("trace = n + 1", r.trace == want, Value::Null);
    if n <= 3 {
        report.check("coinvariant", matrix_coinvariant(&projection_s7(n)?)?, Value::Null);
    }
    if n == 1 {
        report.check("matches the explicit matrix", p.matrix == nchopf::fibration::explicit_p1(), Value::Null);
    }
    Ok(())
}

fn connection_cmd(report: &mut Report, n: usize) -> Result<(), Error> {
    let a = grassmann_connection(n, Calculus::Exterior)?;
    let s = connection_structure(&a, n)?;
    let entries: Vec<Vec<String>> = (0..a.rows).map(|i| (0..a.cols).map(|j| a.get(i, j).to_string()).collect()).collect();
    report.result("n", json!(n)).result("connection", json!(entries));
    report.check("anti-hermitian", s.anti_hermitian, Value::Null);
    report.check("tridiagonal", s.tridiagonal, Value::Null);
    let su2 = su2_valuedness_check(n)?;
    report.check("su(2)-valued", su2.pass(), Value::Null);
    let g = gauge_identities(n)?;
    report.check(
        "gauge identities",
        g.verified,
        json!({ "diagonal": g.diagonal, "off_diagonal_squares": g.off_diagonal_squares }),
    );
    Ok(())
}

fn chern_cmd(report: &mut Report, k: usize, n: usize, normalized: bool) -> Result<(), Error> {
    let mut c = chern(k, n)?;
    if normalized {
        c = c.normalize();
    }
    let path = match c.path {
        ChernPath::Direct => "direct",
        ChernPath::Factorized => "factorized",
    };
    report
        .result("k", json!(k))
        .result("n", json!(n))
        .result("path", json!(path))
        .result("normalized", json!(normalized))
        .result("normalization", json!(normalization(k).to_string()))
        .result("terms", json!(c.form.terms.len()))
        .result("form", json!(c.form.to_string()));
    let zero = c.is_zero()?;
    report.result("zero", json!(zero));
    match k {
        0 => {
            report.check("ch_0 = n + 1", c.scalar() == Some(Scalar::int(n as i64 + 1)), Value::Null);
        }
        1 => {
            report.check("ch_1 vanishes", zero, Value::Null);
        }
        _ => {
            report.check("ch_2 is nonzero", !zero, Value::Null);
            if n <= 2 {
                let t = two_paths(k, n)?;
                report.check("direct and factorized traces agree", t.pass, json!({ "method": t.method }));
            }
        }
    }
    Ok(())
}

fn index_cmd(report: &mut Report, n: usize) -> Result<(), Error> {
    let r = index(n)?;
    report
        .result("n", json!(n))
        .result("index", json!(r.index.to_string()))
        .result("c_n", json!(r.c_n.to_string()))
        .result("certified", json!(r.certified))
        .result("expected", json!(r.expected));
    report.check("index = n(n+1)(n+2)/6", r.pass(), Value::Null);
    Ok(())
}

fn asd_cmd(report: &mut Report, n: usize, samples: usize, seed: u64, tol: f64, theta: f64) -> Result<(), Error> {
    if n != 1 {
        usage(report, "the anti-selfduality check is defined for n = 1".into());
        return Ok(());
    }
    let p = projection(1)?.matrix;
    let residual = asd_residual(&p, samples, seed, theta)?;
    let control = asd_residual(&perturbed_projection(Scalar::frac(1, 10))?, samples.min(10), seed, theta)?;
    report
        .result("n", json!(n))
        .result("samples", json!(samples))
        .result("seed", json!(seed))
        .result("theta", json!(theta))
        .result("max_residual", measured(residual, tol))
        .result("control_residual", measured(control, ASD_CONTROL_FLOOR));
    report.check("|*F + F| <= tol", residual <= tol, Value::Null);
    report.check("perturbed control exceeds the floor", control > ASD_CONTROL_FLOOR, Value::Null);
    Ok(())
}

/// Load the stored recursive lift from `dir`. Returns the number of
/// entries accepted and rejected.
pub fn load_ell_cache(dir: &Path) -> (usize, usize) {
    let Ok(text) = std::fs::read_to_string(dir.join(CACHE_FILE)) else {
        return (0, 0);
    };
    let s7 = Presentation::s7();
    let (mut ok, mut bad) = (0, 0);
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let accepted = (|| {
            let (key, body) = line.split_once('\t')?;
            let idx: Vec<i64> = key.split(' ').map(|v| v.parse().ok()).collect::<Option<_>>()?;
            let [k, m, n] = idx[..] else { return None };
            let t = match parse_value(body, s7).ok()? {
                ExprValue::Tensor(t) => t,
                _ => return None,
            };
            preload_ell(k as i32, m as u32, n as u32, t).ok()
        })();
        if accepted == Some(true) {
            ok += 1;
        } else {
            bad += 1;
        }
    }
    (ok, bad)
}

/// Write the memo of the recursive lift into `dir`.
pub fn store_ell_cache(dir: &Path) -> std::io::Result<usize> {
    let entries: Vec<((i32, u32, u32), Tensor)> = ell_cache_entries();
    let text: String = entries.iter().map(|((k, m, n), t)| format!("{k} {m} {n}\t{t}\n")).collect();
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(CACHE_FILE), text)?;
    Ok(entries.len())
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn hopf_galois_cmd(report: &mut Report, check: GaloisCheck, max_degree: usize, lift: LiftArg) -> Result<(), Error> {
    let lift: Lift = lift.into();
    let dir = cache_dir();
    if let Some(d) = &dir {
        let (ok, bad) = load_ell_cache(d);
        report.result("cache", json!({ "loaded": ok, "rejected": bad }));
    }
    report.result("lift", json!(format!("{lift:?}"))).result("max_degree", json!(max_degree));
    match check {
        GaloisCheck::Surjectivity => {
            let mut rows = Vec::new();
            let mut pass = true;
            for (name, got, want) in galois_witnesses()? {
                pass &= got == want;
                rows.push(json!({ "witness": name, "value": got.to_string(), "expected": want.to_string() }));
            }
            report.result("witnesses", json!(rows));
            report.check("witnesses reproduce 1 (x) h", pass, Value::Null);
        }
        GaloisCheck::Bijectivity => {
            report.bound("filtered degree", max_degree, GALOIS_CAP);
            let g = galois_bijectivity_on_component(max_degree)?;
            report.result(
                "component",
                json!({ "source_dim": g.source_dim, "relation_rank": g.relation_rank, "kernel_dim": g.kernel_dim, "image_rank": g.image_rank, "target_dim": g.target_dim }),
            );
            report.check("relations lie in the kernel", g.relations_in_kernel, Value::Null);
            report.check("kernel is spanned by the relations", g.kernel_dim == g.relation_rank, Value::Null);
            report.check("target lies in the image", g.target_in_image, Value::Null);
        }
        GaloisCheck::StrongConnection => {
            report.bound("degree", max_degree, STRONG_CAP);
            let r = strong_connection_axioms_with(lift, max_degree)?;
            report.result("basis_elements", json!(r.basis_elements)).result("monomials", json!(r.monomials));
            report.result("failures", json!(r.failures.iter().take(16).collect::<Vec<_>>()));
            report.check("l(1) = 1 (x) 1", r.ell_one, Value::Null);
            report.check("base cases", r.base_cases, Value::Null);
            report.check("canonical map inverts l", r.fundamental_vector_field, Value::Null);
            report.check("right colinear", r.right_colinear, Value::Null);
            report.check("left colinear", r.left_colinear, Value::Null);
            report.check("unital", r.unital, Value::Null);
            report.check("strong (right)", r.strong_right, Value::Null);
            report.check("strong (left)", r.strong_left, Value::Null);
            report.undecided = r.undecided > 0;
        }
        GaloisCheck::Compare => {
            for n in 1..=max_degree.clamp(1, 2) {
                report.check(&format!("omega matches the Grassmannian connection, n = {n}"), compare_with_grassmannian(lift, n)?, Value::Null);
            }
        }
    }
    if let Some(d) = &dir {
        if lift == Lift::Recursive {
            if let Err(e) = store_ell_cache(d) {
                report.result("cache_error", json!(e.to_string()));
            }
        }
    }
    Ok(())
}

fn classical_cmd(report: &mut Report, points: usize, seed: u64, max_n: usize) -> Result<(), Error> {
    let r = classical_limit(points, seed, max_n)?;
    let tol = nchopf::classical::CLASSICAL_TOLERANCE;
    report
        .result("points", json!(points))
        .result("seed", json!(seed))
        .result("max_n", json!(max_n))
        .result("hopf_on_sphere", measured(r.hopf_on_sphere, tol))
        .result("invariants", measured(r.invariants, tol))
        .result("basic_projection", measured(r.basic_projection, tol))
        .result("projection_defects", measured(r.projection_defects, tol));
    report.check("Hopf map lands on the sphere", r.hopf_on_sphere <= tol, Value::Null);
    report.check("invariants match the Hopf map", r.invariants <= tol, Value::Null);
    report.check("p_(1) matches |psi><psi|", r.basic_projection <= tol, Value::Null);
    report.check("projection laws pointwise", r.projection_defects <= tol, Value::Null);
    report.check("p = p~", r.p_equals_p_tilde, Value::Null);
    report.check("ch_1 vanishes", r.ch1_zero, Value::Null);
    report.check("exterior ch_2 proportional", r.exterior_proportional, Value::Null);
    report.check(
        "anti-selfdual at theta = 0",
        r.asd.pass(),
        json!({ "max_residual": r.asd.max_residual, "control_residual": r.asd.control_residual }),
    );
    Ok(())
}

fn selftest_cmd(report: &mut Report, only: &[usize]) {
    let ids: Vec<usize> = if only.is_empty() { (1..=13).collect() } else { only.to_vec() };
    for id in ids {
        let r = suite::criterion(id);
        report.timing(&format!("criterion {id}"), r.seconds);
        report.undecided |= r.undecided;
        report.check(&format!("criterion {id}: {}", r.title), r.pass, r.detail);
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Nf { .. } => "nf",
        Command::Projection { .. } => "projection",
        Command::Connection { .. } => "connection",
        Command::Chern { .. } => "chern",
        Command::Index { .. } => "index",
        Command::Asd { .. } => "asd",
        Command::HopfGalois { .. } => "hopf-galois",
        Command::ClassicalLimit { .. } => "classical-limit",
        Command::Selftest { .. } => "selftest",
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::BoundOverflow(..) | Error::Invalid(_) | Error::UnknownGenerator(..) | Error::UnknownPresentation(_) | Error::Unsupported(_)
    )
}

/// Execute a parsed command. `args` is echoed into the report.
pub fn run(command: &Command, args: &[String]) -> (Report, Status) {
    let mut report = Report::new(command_name(command), args);
    let start = Instant::now();
    let outcome = match command {
        Command::Nf { preset, expr } => nf(&mut report, preset, expr),
        Command::Projection { n, direct, matrix } => projection_cmd(&mut report, *n, *direct, *matrix),
        Command::Connection { n } => connection_cmd(&mut report, *n),
        Command::Chern { k, n, normalized } => chern_cmd(&mut report, *k, *n, *normalized),
        Command::Index { n } => index_cmd(&mut report, *n),
        Command::Asd { n, samples, seed, tol, theta } => asd_cmd(&mut report, *n, *samples, *seed, *tol, *theta),
        Command::HopfGalois { check, max_degree, lift } => hopf_galois_cmd(&mut report, *check, *max_degree, *lift),
        Command::ClassicalLimit { points, seed, max_n } => classical_cmd(&mut report, *points, *seed, *max_n),
        Command::Selftest { only } => {
            selftest_cmd(&mut report, only);
            Ok(())
        }
    };
    report.timing("total", start.elapsed().as_secs_f64());
    let status = match outcome {
        Ok(()) if report.error.is_some() => Status::Usage,
        Ok(()) => report.status(),
        Err(Error::Undecided(b)) => {
            report.undecided = true;
            report.error = Some(format!("undecided at bound {b}"));
            Status::Undecided
        }
        Err(e) => {
            let s = if is_usage(&e) { Status::Usage } else { Status::Fail };
            report.error = Some(e.to_string());
            s
        }
    };
    (report, status)
}

/// Parse `argv` (including the program name), run it and return the exit
/// code with the text to print.
pub fn main_with(argv: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Status::Usage.code() } else { 0 };
            return (code, e.to_string());
        }
    };
    let (report, status) = run(&cli.command, &argv[1..]);
    let mut v = report.to_value(cli.timings);
    if let Value::Object(m) = &mut v {
        m.insert("status".into(), json!(status.label()));
        m.insert("pass".into(), json!(status == Status::Pass));
    }
    (status.code(), serde_json::to_string_pretty(&v).expect("reports serialize"))
}
