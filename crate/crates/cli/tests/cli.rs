use std::process::Command;

use proptest::prelude::*;

use nchopf::algebra::{Pres, Presentation};
use nchopf::forms::{Calculus, Form};
use nchopf::hopf::Tensor;
use nchopf::props::random_element;
use nchopf::rng::seeded;
use nchopf_cli::commands::{round_trips, CACHE_ENV};
use nchopf_cli::expr::{parse, parse_value, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nchopf"))
}

fn run(args: &[&str]) -> (i32, serde_json::Value) {
    let out = bin().args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(serde_json::Value::Null);
    (out.status.code().unwrap(), json)
}

fn presentation(which: u8) -> Pres {
    match which % 3 {
        0 => Presentation::s7(),
        1 => Presentation::s4(),
        _ => Presentation::su2(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn elements_round_trip(seed in any::<u64>(), which in any::<u8>()) {
        let p = presentation(which);
        let mut rng = seeded(seed, 1);
        let e = Value::Element(random_element(&mut rng, p, 4, 4));
        prop_assert!(round_trips(&e, p), "{}", e);
    }

    #[test]
    fn forms_round_trip(seed in any::<u64>(), which in any::<u8>(), exterior in any::<bool>()) {
        let p = presentation(which % 2);
        let calc = if exterior { Calculus::Exterior } else { Calculus::FirstOrder };
        let mut rng = seeded(seed, 2);
        let (a, b) = (random_element(&mut rng, p, 3, 2), random_element(&mut rng, p, 3, 2));
        let f = Value::Form(Form::d(&a, calc).rmul(&b));
        prop_assert!(round_trips(&f, p), "{}", f);
    }

    #[test]
    fn tensors_round_trip(seed in any::<u64>()) {
        let p = Presentation::s7();
        let mut rng = seeded(seed, 3);
        let t = Tensor::pure(&[random_element(&mut rng, p, 2, 2), random_element(&mut rng, p, 2, 2)]);
        let u = Tensor::pure(&[random_element(&mut rng, p, 2, 2), random_element(&mut rng, p, 2, 2)]);
        let v = Value::Tensor(t.add(&u));
        prop_assert!(round_trips(&v, p), "{}", v);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let p = Presentation::s4();
    let e = parse("a +\n  z1", p).unwrap_err();
    assert_eq!((e.line, e.column), (2, 3));
    assert!(parse("(a + b", p).is_err());
    assert!(parse("a ^ x", p).is_err());
    assert!(parse("a / 0", p).is_err());
}

#[test]
fn differential_of_x_is_not_a_tensor() {
    match parse_value("d(x)*x", Presentation::s4()).unwrap() {
        Value::Form(f) => assert_eq!(f.degree(), Some(1)),
        v => panic!("{v}"),
    }
    match parse_value("x (x) x", Presentation::s4()).unwrap() {
        Value::Tensor(t) => assert_eq!(t.legs.len(), 2),
        v => panic!("{v}"),
    }
}

#[test]
fn nf_reports_normal_form_and_exit_codes() {
    let (code, r) = run(&["nf", "--preset", "s7", "--expr", "z3*z1 - mu^-1*z1*z3"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["normal_form"], "0");
    assert_eq!(r["schema"], "nchopf-report/1");
    let (code, r) = run(&["nf", "--preset", "s7", "--expr", "z5"]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("z5"));
    let (code, _) = run(&["nf", "--preset", "s9", "--expr", "1"]);
    assert_eq!(code, 2);
    let (code, r) = run(&["nf", "--preset", "s4", "--expr", "d(a)*ab + a*d(ab) + d(b)*bb + b*d(bb) + 2*x*d(x)"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["zero_mod_sphere"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["index"]).0, 2);
    assert_eq!(run(&["chern", "--k", "2", "--n", "4"]).0, 2);
    assert_eq!(run(&["asd", "--n", "2"]).0, 2);
}

#[test]
fn index_and_projection_commands() {
    let (code, r) = run(&["index", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["index"], "4");
    assert_eq!(r["results"]["c_n"], "4");
    let (code, r) = run(&["projection", "--n", "1", "--matrix"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["trace"], "(2)");
    assert_eq!(r["results"]["matrix"].as_array().unwrap().len(), 4);
}

#[test]
fn asd_command_passes_and_is_deterministic() {
    let args = ["asd", "--n", "1", "--samples", "20", "--seed", "7", "--tol", "1e-9"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["results"]["seed"], 7);
    assert_eq!(r["results"]["max_residual"]["tolerance"], 1e-9);
}

#[test]
fn strong_connection_depends_on_the_lift() {
    let (code, r) = run(&["hopf-galois", "--check", "strong-connection", "--max-degree", "2", "--lift", "recursive"]);
    assert_eq!(code, 1, "{r}");
    let (code, r) = run(&["hopf-galois", "--check", "strong-connection", "--max-degree", "2", "--lift", "peter-weyl"]);
    assert_eq!(code, 0, "{r}");
    let (code, _) = run(&["hopf-galois", "--check", "surjectivity"]);
    assert_eq!(code, 0);
}

#[test]
fn lift_cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["hopf-galois", "--check", "compare", "--max-degree", "1"];
    let first = bin().args(args).env(CACHE_ENV, dir.path()).output().unwrap();
    let r1: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(r1["results"]["cache"]["loaded"], 0);
    let stored = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(stored, 1);
    let second = bin().args(args).env(CACHE_ENV, dir.path()).output().unwrap();
    let r2: serde_json::Value = serde_json::from_slice(&second.stdout).unwrap();
    assert!(r2["results"]["cache"]["loaded"].as_u64().unwrap() > 0);
    assert_eq!(r2["results"]["cache"]["rejected"], 0);
    assert_eq!(r1["checks"], r2["checks"]);
    assert_eq!(first.status.code(), second.status.code());
}

#[test]
fn tampered_cache_entries_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ell-recursive-v1.txt"), "1 0 0\t(1) z1 (x) z2\n0 0 0\tnot a tensor\n").unwrap();
    let out = bin().args(["hopf-galois", "--check", "compare", "--max-degree", "1"]).env(CACHE_ENV, dir.path()).output().unwrap();
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["results"]["cache"]["rejected"], 2);
    assert_eq!(out.status.code(), Some(0));
}
