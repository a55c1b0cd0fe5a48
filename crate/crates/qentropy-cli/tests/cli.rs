//! End-to-end subcommand tests against the built binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qentropy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qentropy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn critical_prints_the_reference_values() {
    let out = run(&["critical"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let grab = |prefix: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with(prefix))
            .unwrap_or_else(|| panic!("missing line `{prefix}` in {text}"))
            .split('=')
            .next_back()
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    assert!((grab("chi1/2") - 6.532952).abs() <= 1e-5);
    assert!((grab("chi2/2") - 6.75).abs() <= 1e-12);
    assert!((grab("eta1") - 7.258835).abs() <= 1e-5);
    assert!((grab("eta2") - 7.5).abs() <= 1e-9);
}

#[test]
fn calibrate_prints_five_ninths() {
    let out = run(&["calibrate"]);
    assert!(out.status.success());
    // golden nine-significant-digit output
    assert_eq!(stdout(&out).trim(), "0.555555556");
}

#[test]
fn eval_isotropic_golden_value() {
    let dir = tempdir();
    let path = dir.join("zero.tensor");
    std::fs::write(&path, "2; (2,0,0)=0; (0,2,0)=0; (0,0,2)=0\n").unwrap();
    let out = run(&[
        "eval",
        "--group",
        "dinf",
        "--params-file",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    // 9 ln 3 at nine significant digits
    assert_eq!(stdout(&out).trim(), "9.88751060");
}

#[test]
fn eval_out_of_domain_is_reported_not_an_error() {
    let dir = tempdir();
    let path = dir.join("far.tensor");
    std::fs::write(&path, "2; (2,0,0)=-0.4; (0,2,0)=0.2; (0,0,2)=0.2\n").unwrap();
    let out = run(&[
        "eval",
        "--group",
        "dinf",
        "--params-file",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "out-of-domain");
}

#[test]
fn census_lists_the_three_stationary_points() {
    let out = run(&["census", "--chi", "13.3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("local minimum").count(), 2);
    assert_eq!(text.matches("local maximum").count(), 1);
    assert!(text.contains("regime 3"));
}

#[test]
fn counterexample_reports_and_rejects() {
    let out = run(&["counterexample", "--a", "0.3333333333333333", "--c", "0.2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("r^2 = 0.0300000000"));
    assert!(text.contains("commutator norm"));

    let bad = run(&["counterexample", "--a", "0.2", "--c", "0.1"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr).into_owned();
    assert!(err.starts_with("ERROR:"), "stderr was: {err}");
    assert!(err.contains("1/4 < a < 1/2"));
}

#[test]
fn grad_check_passes_for_analytic_groups() {
    let out = run(&[
        "grad-check",
        "--group",
        "d2",
        "--samples",
        "5",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
}

#[test]
fn oracle_check_single_group() {
    let out = run(&["oracle-check", "--group", "dinf", "--samples", "10"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn minimize_rod_is_deterministic_given_seed() {
    let args = [
        "minimize",
        "--model",
        "rod",
        "--n-starts",
        "6",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("minimizer"));
}

#[test]
fn sweep_writes_csv_and_plot_script() {
    let dir = tempdir();
    let spec = dir.join("sweep.spec");
    std::fs::write(
        &spec,
        "family = to-reduced\naxis1 = mu1_bar, 0, 40, 3\naxis2 = mu2_bar, 0, 30, 3\nn_starts = 6\nseed = 4\n",
    )
    .unwrap();
    let out_prefix = dir.join("map");
    let out = run(&[
        "sweep",
        "--spec-file",
        spec.to_str().unwrap(),
        "--out",
        out_prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("map.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10); // header + 9 nodes
    assert!(csv.starts_with("axis1,axis2,label,energy,flag"));
    let gp = std::fs::read_to_string(dir.join("map.gp")).unwrap();
    assert!(gp.contains("$DATA << EOD"));
}

#[test]
fn shipped_sample_configs_work() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let coeffs = root.join("configs/bentcore_sample.toml");
    let out = run(&[
        "minimize",
        "--model",
        "d2",
        "--coeffs-file",
        coeffs.to_str().unwrap(),
        "--n-starts",
        "6",
        "--seed",
        "3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("energy"));

    // the sweep sample parses and one node of it minimizes
    let spec_text = std::fs::read_to_string(root.join("configs/to_sweep_sample.spec")).unwrap();
    assert!(spec_text.contains("family = to-reduced"));
    let rod = std::fs::read_to_string(root.join("configs/rod_sweep_sample.spec")).unwrap();
    assert!(rod.contains("family = rod"));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "--group", "dinf"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_input_files_exit_with_one_and_error_prefix() {
    let dir = tempdir();
    let path = dir.join("bad.tensor");
    std::fs::write(&path, "2; (9,0,0)=1\n").unwrap();
    let out = run(&[
        "eval",
        "--group",
        "dinf",
        "--params-file",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("ERROR:"));
}
