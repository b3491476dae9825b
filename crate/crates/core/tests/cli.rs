use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_odesat");
const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/problems");

fn odesat(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    format!("{FIXTURES}/{name}")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_reports_verdict_and_exit_code() {
    let sat = odesat(&["solve", &fixture("sqrt2.prob"), "--stats"]);
    assert_eq!(sat.status.code(), Some(0));
    let out = stdout(&sat);
    assert!(out.starts_with("delta-sat\n"), "{out}");
    assert!(out.contains("branches=") && out.contains("time_ms="), "{out}");

    let unsat = odesat(&["solve", &fixture("decay_unreachable.prob")]);
    assert_eq!(unsat.status.code(), Some(1));
    assert_eq!(stdout(&unsat).trim(), "unsat");
}

#[test]
fn delta_flag_overrides_file() {
    // sqrt2 is delta-sat at any precision; a malformed delta is rejected.
    let o = odesat(&["solve", &fixture("sqrt2.prob"), "--delta", "1/100000"]);
    assert_eq!(o.status.code(), Some(0));
    for bad in ["0", "-1", "abc"] {
        assert_eq!(odesat(&["solve", &fixture("sqrt2.prob"), "--delta", bad]).status.code(), Some(2), "{bad}");
    }
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.prob");
    std::fs::write(&broken, "(declare x [0 1])\n(assert (>= y 0))\n").unwrap();
    let o = odesat(&["solve", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:"), "{:?}", o);

    assert_eq!(odesat(&["solve", "/nonexistent.prob"]).status.code(), Some(2));
    assert_eq!(odesat(&["bmc", &fixture("ball.hyb")]).status.code(), Some(2));
    assert_eq!(odesat(&["solve", &fixture("sqrt2.prob"), "--eps", "-1"]).status.code(), Some(2));
}

#[test]
fn bmc_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("ball.csv");
    let o = odesat(&["bmc", &fixture("ball.hyb"), "--depth", "1", "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,mode,t_lo,t_hi,x_lo,x_hi,v_lo,v_hi"));
    let modes: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(modes.into_iter().collect::<Vec<_>>(), ["falling", "rising"]);

    // No trace for an unsat answer.
    let high = dir.path().join("high.csv");
    let o = odesat(&["bmc", &fixture("ball_high.hyb"), "--depth", "10", "--trace", high.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "unsat");
    assert!(!high.exists());
}
