use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use proptest::prelude::*;

use super::*;
use crate::coeffring::Coefficient;
use crate::exterior::{Chart, DiffForm, MultiVector};
use crate::fieldtheory::{build_canonical, PhaseSpaceSpec};
use crate::random::Sampler;

fn eval(chart: &Chart, text: &str) -> (Value, Vec<String>) {
    let empty = BTreeMap::new();
    let mut env = Env::new(chart, None, &empty);
    let v = env.elaborate(&parse(text).unwrap()).unwrap();
    (v, env.warnings)
}

fn form(chart: &Chart, text: &str) -> DiffForm {
    match eval(chart, text).0 {
        Value::Form(t) => t,
        other => panic!("expected a form, got {other}"),
    }
}

fn plane() -> Chart {
    Chart::new(&["x0", "x1", "s0"], &[]).unwrap()
}

#[test]
fn parses_contraction_of_wedge() {
    let c = plane();
    let t = form(&c, "d(s0)^i_(e_x0, dx0^dx1)");
    assert_eq!(t, c.d("s0").unwrap().wedge(&c.d("x1").unwrap()).unwrap());
}

#[test]
fn precedence_and_powers() {
    let c = plane();
    let half = Coefficient::constant(crate::coeffring::ratio(1, 2));
    let t = form(&c, "1/2*x0^2 - -x1");
    let expected = &(&half * &Coefficient::var("x0").pow(2)) + &Coefficient::var("x1");
    assert_eq!(t.as_scalar().unwrap(), expected);
    assert_eq!(form(&c, "x0*dx1 + x1^dx0"), form(&c, "(dx1^x0) + dx0*x1"));
    assert_eq!(form(&c, "d(x0*x1)"), form(&c, "x1*dx0 + x0*dx1"));
}

#[test]
fn vanishing_wedge_warns() {
    let c = plane();
    let (v, warnings) = eval(&c, "dx0^dx0");
    assert_eq!(v, Value::Form(DiffForm::zero(&c, 2)));
    assert_eq!(warnings.len(), 1);
}

#[test]
fn errors_carry_positions_and_degrees() {
    let c = plane();
    match parse("dx0 +\n  (x1 * )") {
        Err(CliError::Syntax { pos, .. }) => assert_eq!((pos.line, pos.column), (2, 9)),
        other => panic!("{other:?}"),
    }
    let empty = BTreeMap::new();
    let mut env = Env::new(&c, None, &empty);
    let err = env.elaborate(&parse("dx0 + dx0^dx1").unwrap()).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("degree 1") && text.contains("degree 2"), "{text}");
    assert_eq!(err.exit_code(), 2);
    let err = env.elaborate(&parse("jb(alpha, beta)").unwrap()).unwrap_err();
    assert!(matches!(err, CliError::Resolution { ref name, .. } if name == "alpha"));
}

#[test]
fn canonical_theta_round_trips() {
    let c = build_canonical(PhaseSpaceSpec::new(2, 1).unwrap()).unwrap();
    let theta = c.structure().theta();
    let text = theta.to_string();
    assert_eq!(text, "-p*dx0^dx1 - p1*dx0^dy + dx0^ds1 + p0*dx1^dy - dx1^ds0");
    assert_eq!(&form(c.chart(), &text), theta);
    let zero = DiffForm::zero(c.chart(), 2);
    assert_eq!(zero.to_string(), "0");
}

#[test]
fn negative_powers_round_trip() {
    let c = Chart::new(&["q", "z"], &["z"]).unwrap();
    let t = form(&c, "z^-2*q*dq - 3/4*z^-1*dz");
    assert_eq!(form(&c, &t.to_string()), t);
    let empty = BTreeMap::new();
    let mut env = Env::new(&c, None, &empty);
    assert!(env.elaborate(&parse("q^-1").unwrap()).is_err());
}

fn round_trip_case(seed: u64) {
    let mut rng = Sampler::new(seed);
    let names = ["a", "b", "c", "d"];
    let chart = Chart::new(&names, &[]).unwrap();
    let vars = ["a", "b", "c", "d", "k"];
    let empty = BTreeMap::new();
    for degree in 0..=3 {
        let t: DiffForm = rng.graded(&chart, degree, &vars, 3, 3);
        let mut env = Env::new(&chart, None, &empty);
        // zero renders as `0`, which carries no degree
        if !t.is_zero() {
            assert_eq!(env.elaborate(&parse(&t.to_string()).unwrap()).unwrap(), Value::Form(t.clone()));
        }
        assert_eq!(DiffForm::from_json_str(&t.to_json_string(), None).unwrap(), t);
        let u: MultiVector = rng.graded(&chart, degree + 1, &vars, 3, 3);
        if !u.is_zero() {
            assert_eq!(env.elaborate(&parse(&u.to_string()).unwrap()).unwrap(), Value::Vector(u.clone()));
        }
        assert_eq!(MultiVector::from_json_str(&u.to_json_string(), None).unwrap(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn plain_rendering_parses_back(seed in any::<u64>()) {
        round_trip_case(seed);
    }
}

fn temp_session(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gj-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join("session.json")
}

fn gj(session: &Path, args: &[&str]) -> i32 {
    let mut all = vec!["gj".to_string(), "--session".into(), session.display().to_string()];
    all.extend(args.iter().map(|s| s.to_string()));
    main_with_args(all)
}

#[test]
fn exit_codes() {
    let path = temp_session("exit");
    assert_eq!(gj(&path, &["chart", "new", "--coords", "x,y"]), 0);
    assert_eq!(gj(&path, &["theta", "set", "dx"]), 0);
    assert_eq!(gj(&path, &["check", "multicontact"]), 1);
    assert_eq!(gj(&path, &["render", "dx +"]), 2);
    assert_eq!(gj(&path, &["bracket", "alpha", "beta"]), 2);
    assert_eq!(gj(&path, &["no-such-command"]), 2);
    assert_eq!(gj(&path, &["tables", "--n", "2", "--m", "1"]), 0);
}

#[test]
fn session_round_trip_and_schema_guard() {
    let path = temp_session("session");
    let theta = "ds0^dx1 - ds1^dx0 - p*dx0^dx1 - p0*dy^dx1 + p1*dy^dx0";
    assert_eq!(gj(&path, &["chart", "new", "--coords", "x0,x1,y,p,p0,p1,s0,s1"]), 0);
    assert_eq!(gj(&path, &["theta", "set", theta]), 0);
    assert_eq!(gj(&path, &["check", "multicontact"]), 0);
    assert_eq!(gj(&path, &["conformal", "make", "a", "--x", "e_y"]), 0);
    assert_eq!(gj(&path, &["conformal", "make", "b", "--x", "-e_s0"]), 0);
    assert_eq!(gj(&path, &["let", "w", "dx0^dx1"]), 0);
    assert_eq!(gj(&path, &["bracket", "a", "b"]), 0);
    assert_eq!(gj(&path, &["psi-check", "a", "b"]), 0);
    assert_eq!(gj(&path, &["render", "jb(a, b) + b"]), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let session = Session::from_json(&text).unwrap();
    assert_eq!(session.bindings().len(), 3);
    assert!(matches!(session.bindings()["a"], Value::Conformal(_)));
    let future = text.replace(SCHEMA, "gj-session/99");
    assert!(matches!(Session::from_json(&future), Err(CliError::Session(_))));
    let mut raw: serde_json::Value = serde_json::from_str(&text).unwrap();
    raw["objects"]["a"]["alpha"]["terms"][0]["coeff"] = serde_json::json!("2*p0");
    let broken = serde_json::to_string(&raw).unwrap();
    assert!(matches!(Session::from_json(&broken), Err(CliError::Session(_))));
}

#[test]
fn canonical_commands_run() {
    let path = temp_session("canonical");
    let h = "1/2*p0^2+1/2*p1^2+g*s0";
    assert_eq!(gj(&path, &["hdw", "--n", "2", "--m", "1", "--H", h, "--format", "latex"]), 0);
    assert_eq!(gj(&path, &["sigma", "--H", h]), 0);
    assert_eq!(gj(&path, &["dissipated", "--H", "1/2*p0^2", "--elementary", "momentum:0"]), 0);
    assert_eq!(gj(&path, &["dissipated", "--H", "y^2", "--elementary", "momentum:0"]), 1);
    assert_eq!(gj(&path, &["distortion", "--n", "2"]), 0);
}

#[test]
fn cli_matches_library_output() {
    let c = build_canonical(PhaseSpaceSpec::new(2, 1).unwrap()).unwrap();
    let cli = <Cli as clap::Parser>::try_parse_from(["gj", "sigma", "--H", "g*s0 + s1*x0"]).unwrap();
    let out = run(&cli).unwrap();
    let Item::Form(sigma) = &out.report.entries[0].1 else { panic!() };
    let expected = c.chart().d("x0").unwrap().scale(&Coefficient::var("g"))
        .add(&c.chart().d("x1").unwrap().scale(&Coefficient::var("x0"))).unwrap();
    assert_eq!(sigma, &expected);
    assert_eq!(out.warnings.len(), 1);
}
