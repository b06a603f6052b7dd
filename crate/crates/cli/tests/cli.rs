use std::fs;
use std::process::{Command, Output};

use fdrelay::alpha::{optimal_alpha, AlphaCoefficients};
use fdrelay::model::draw_channel;
use fdrelay::{RngStream, Scheme, SystemConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdrelay")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from\n{report}"))
        .parse()
        .unwrap()
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    assert_eq!(run(&["outage"]).status.code(), Some(2));
    assert_eq!(run(&["sweep"]).status.code(), Some(2));
    assert_eq!(run(&["alpha", "--scheme", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--family", "delay-vs-alpha", "--grid", "0.5,0.2"]).status.code(), Some(2));
}

#[test]
fn empty_scheme_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    let o = run(&["sweep", "--family", "outage-vs-ps", "--scheme", "", "--out", out.to_str().unwrap()]);
    stdout(&o);
    assert_eq!(fs::read_to_string(out).unwrap(), "axis,scheme,engine,value,ci95\n");
}

#[test]
fn sweeps_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["a.csv", "b.csv"].iter().map(|n| dir.path().join(n)).collect();
    for p in &paths {
        let o = run(&[
            "sweep", "--family", "delay-vs-alpha", "--grid", "0.2:0.8:0.2", "--engine", "both",
            "--trials", "3000", "--seed", "11", "--out", p.to_str().unwrap(),
        ]);
        stdout(&o);
    }
    let a = fs::read(&paths[0]).unwrap();
    assert_eq!(a, fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    // opt and 3x3 mrc have no closed form: simulated rows only.
    assert_eq!(text.lines().count(), 1 + 4 * (2 + 2 + 1 + 1));
}

#[test]
fn infeasible_schemes_are_dropped_with_a_warning() {
    let o = run(&["sweep", "--family", "delay-vs-alpha", "--grid", "0.5", "--m-r", "1", "--m-t", "3", "--scheme", "rzf,tzf"]);
    let text = stdout(&o);
    assert_eq!(text, format!("axis,scheme,engine,value,ci95\n0.5,tzf,analytic,{}\n", text.lines().nth(1).unwrap().splitn(4, ',').nth(3).unwrap()));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rzf is infeasible"));
}

#[test]
fn alpha_verb_matches_library() {
    let o = run(&["alpha", "--scheme", "tzf", "--seed", "5", "--m-r", "2", "--li-dbm", "-60", "--p_s_dbm", "15"]);
    let text = stdout(&o);
    let cfg = SystemConfig { m_r: 2, sigma2_rr: 10.0, p_s: 10f64.powf(1.5) * 1e-3, ..SystemConfig::default() };
    let ch = draw_channel(&cfg, &mut RngStream::new(5, 0));
    let lib = optimal_alpha(&AlphaCoefficients::for_scheme(Scheme::Tzf, &ch, &cfg).unwrap());
    assert_eq!(value(&text, "alpha_star.closed_form"), lib.alpha_star);
    assert_eq!(value(&text, "rate.closed_form"), lib.rate_at_star);
}

#[test]
fn zero_threshold_means_no_outage() {
    let text = stdout(&run(&["outage", "--scheme", "tzf", "--gamma-th", "0", "--engine", "both", "--trials", "1000"]));
    assert_eq!(value(&text, "outage.exact"), 0.0);
    assert_eq!(value(&text, "outage.mc"), 0.0);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    fs::write(&cfg, "# small relay\nm_r = 1\nm_t = 2\np_s_dbm = 20\n").unwrap();
    let base = stdout(&run(&["outage", "--scheme", "tzf", "--config", cfg.to_str().unwrap()]));
    let over = stdout(&run(&["outage", "--scheme", "tzf", "--config", cfg.to_str().unwrap(), "--p-s-dbm", "30"]));
    assert!(value(&over, "outage.exact") < value(&base, "outage.exact"));
    fs::write(&cfg, "m_r 1\n").unwrap();
    assert_eq!(run(&["outage", "--scheme", "tzf", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn analytic_and_simulated_rows_agree() {
    let text = stdout(&run(&[
        "sweep", "--family", "outage-vs-ps", "--grid", "0:10:5", "--scheme", "tzf,rzf",
        "--engine", "both", "--trials", "20000", "--seed", "2",
    ]));
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    for pair in rows.chunks(2) {
        let (a, m) = (&pair[0], &pair[1]);
        assert_eq!((a[2], m[2]), ("analytic", "mc"));
        let (va, vm, ci): (f64, f64, f64) = (a[3].parse().unwrap(), m[3].parse().unwrap(), m[4].parse().unwrap());
        // A run with no outage events has a zero-width interval; fall back to
        // the binomial interval implied by the analytic value.
        let ci = ci.max(1.96 * (va * (1.0 - va) / 20_000.0).sqrt());
        assert!((va - vm).abs() <= 3.0 * ci, "{a:?} vs {m:?}");
    }
}
