use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heat-trace")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Column header and data rows, skipping `#` comment lines.
fn table(text: &str) -> (String, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

const SMALL: &[&str] = &["--box", "8", "--grid-n", "256"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn trace_of_zero_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let args = with(&["trace", "--potential", "zero", "--t-points", "4", "--samples", "2000"], SMALL);
    let o = run(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, "t,method,value,stderr,tail_bound");
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = with(&["trace", "--potential", "bump:A=0.5,a=1", "--t-points", "3", "--samples", "5000", "--seed", "7"], SMALL);
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args.clone();
    let seed = other.iter().position(|s| *s == "7").unwrap();
    other[seed] = "8";
    assert_ne!(run(dir.path(), &other).stdout, a.stdout);
}

#[test]
fn header_echoes_the_effective_config_and_out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "potential = well:V0=1,a=1\nt-points = 2\nmethods = oracle\n# comment\n").unwrap();
    let args = with(&["trace", "--config", "run.cfg", "--t-points", "3", "--out", "trace.csv"], SMALL);
    let o = run(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(text.contains("# t-points = 3\n"));
    assert!(text.contains("# methods = oracle\n"));
    let (_, rows) = table(&text);
    assert_eq!(rows.len(), 3);
    // Full precision: every value parses back to itself when reprinted.
    for r in &rows {
        let v: f64 = r[2].parse().unwrap();
        assert_eq!(format!("{v:.16e}").parse::<f64>().unwrap(), v);
        assert!(v > 0.0);
    }
}

#[test]
fn bk_verify_on_the_well() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["bk-verify", "--potential", "well:V0=1,a=1", "--t-min", "0.5", "--t-points", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, "t,lhs,rhs,m_selected,residual");
    assert_eq!(rows.len(), 1);
    let lhs: f64 = rows[0][1].parse().unwrap();
    let residual: f64 = rows[0][4].parse().unwrap();
    assert!(residual <= 0.01 * lhs.abs(), "{rows:?}");
    assert_eq!(rows[0][3], "0");
}

#[test]
fn resonances_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &with(&["resonances", "--potential", "well:V0=1,a=1", "--region", "0,3,-2.5,0"], SMALL));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, "re,im,multiplicity,class,residual");
    assert_eq!(rows.len(), 3, "{rows:?}");
    assert!(rows.iter().any(|r| r[3] == "imaginary"));
    let o = run(dir.path(), &with(&["resonances", "--potential", "zero"], SMALL));
    assert_eq!(table(&stdout(&o)).1.len(), 0);
}

#[test]
fn expand_and_classify_headers() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &with(&["expand", "--t-points", "30", "--t-max", "0.3", "--p-max", "2"], SMALL));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, "power,coefficient,stderr");
    assert_eq!(rows.len(), 3);
    let c1: f64 = rows[0][1].parse().unwrap();
    assert!((c1 - 2.0).abs() < 0.05, "{c1}");

    // No window given: classify falls back to its own small-t window.
    let o = run(dir.path(), &["classify", "--potential", "bump:A=1,a=1", "--box", "4", "--grid-n", "4096", "--m-max", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("# t-min = 1e-4\n") && text.contains("# max_passing = 3\n"), "{text}");
    let (header, rows) = table(&text);
    assert_eq!(header, "m,verdict,divergence_exponent");
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[1] == "bounded"), "{rows:?}");
}

#[test]
fn gnm_table_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gnm-check", "--potential", "bump:A=1,a=1", "--box", "8", "--grid-n", "2048"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, "k,m,alpha,lhs,rhs,ratio");
    for r in &rows {
        let ratio: f64 = r[5].parse().unwrap();
        assert!(ratio.is_finite() && ratio <= 1.0, "{r:?}");
    }
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["trace", "--grid-n", "255"],
        vec!["trace", "--t-min", "-1"],
        vec!["trace", "--potential", "teapot"],
        vec!["trace", "--potential", "well:V0=1,a=13"],
        vec!["resonances", "--region", "0,8,-4"],
        vec!["trace", "--config", "missing.cfg"],
        vec!["trace", "--no-such-flag"],
    ] {
        let o = run(dir.path(), &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    std::fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    assert_eq!(run(dir.path(), &["trace", "--config", "bad.cfg"]).status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_with_two_and_leaves_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let args = with(&["expand", "--t-points", "80", "--t-max", "0.3", "--p-max", "12", "--out", "fit.csv"], SMALL);
    let o = run(dir.path(), &args);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("fit.csv").exists());
    let diag = std::fs::read_to_string(dir.path().join("fit.diag")).unwrap();
    assert!(diag.starts_with("# heat-trace expand\n") && diag.contains("# error:"));
}

#[test]
fn input_files_are_left_alone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "potential = bump:A=0.5,a=1\nmethods = oracle\n";
    std::fs::write(dir.path().join("run.cfg"), cfg).unwrap();
    let o = run(dir.path(), &with(&["trace", "--config", "run.cfg", "--t-points", "2"], SMALL));
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("run.cfg")).unwrap(), cfg);
}
