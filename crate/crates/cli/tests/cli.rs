use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracrbf::solvers::{gl_fd_solve, InitialProfile, MOLProblem};
use fracrbf::rbf::RBFFamily;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracrbf"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fracrbf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn value_line(o: &Output) -> f64 {
    stdout(o).lines().find_map(|l| l.strip_prefix("value ")).unwrap().parse().unwrap()
}

#[test]
fn eval_power_integral() {
    let o = run(&[
        "eval", "--op", "rl-int-left", "--alpha", "0.5", "--a", "0", "--family", "powers", "--param", "1",
        "--center", "0", "--scale", "1", "--x", "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((value_line(&o) - 0.7522527781).abs() < 1e-10);
    assert!(stdout(&o).contains("terms_used"));
    assert!(stdout(&o).contains("imag_residual 0"));
}

#[test]
fn eval_at_base_is_zero() {
    let o = run(&["eval", "--op", "rl-int-left", "--alpha", "0.5", "--a", "0", "--family", "powers", "--param", "1", "--x", "0"]);
    assert!(o.status.success());
    assert_eq!(value_line(&o), 0.0);
}

#[test]
fn integer_order_rejected() {
    let o = run(&["eval", "--op", "rl-int-left", "--alpha", "2.0", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("order must be non-integer"));
}

#[test]
fn validation_names_the_field() {
    let o = run(&["eval", "--op", "rl-int-sideways", "--alpha", "0.5", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--op"));
    let o = run(&["eval", "--op", "rl-int-left", "--alpha", "0.5", "--grid", "0:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--grid"));
    let o = run(&["eval", "--op", "rl-int-right", "--alpha", "0.5", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--b"));
}

#[test]
fn domain_error_exit_code() {
    let o = run(&["eval", "--op", "rl-der-left", "--alpha", "0.5", "--a", "1", "--x", "0.5"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn eval_grid_writes_csv() {
    let out = scratch("grid.csv", "");
    let o = run(&[
        "eval", "--op", "rl-int-left", "--alpha", "0.5", "--family", "gaussian", "--grid", "0:2:5", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("x,value\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], vec![0.0, 0.0]);
}

#[test]
fn oracle_check_gaussian_config() {
    let cfg = configs().join("eval_gaussian_rl.json");
    let o = run(&["oracle-check", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("rel_err"));
}

#[test]
fn grid_flag_overrides_config_point() {
    let cfg = configs().join("eval_gaussian_rl.json");
    let o = run(&["oracle-check", "--config", cfg.to_str().unwrap(), "--grid", "0.1:1:4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn oracle_check_divergent_multiquadric() {
    let o = run(&[
        "oracle-check", "--op", "rl-int-left", "--alpha", "0.5", "--a", "0", "--family", "multiquadric", "--param", "1",
        "--x", "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_from_base() {
    let out = scratch("sweep.csv", "");
    let o = run(&[
        "sweep", "--op", "rl-int-left", "--alpha", "0.5", "--a", "0", "--family", "powers", "--param", "3", "--center",
        "0.4", "--grid", "0:1:6", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&std::fs::read_to_string(out).unwrap());
    assert_eq!(rows.len(), 6);
    assert_eq!((rows[0][1], rows[0][2]), (0.0, 0.0));
    assert!(rows.iter().all(|r| r[4] <= 1e-6));
}

#[test]
fn ode_step_response() {
    let cfg = configs().join("ode_one.json");
    let o = run(&["solve-ode", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("t,u\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 201);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 50.0);
    assert!((last[1] - 1.0).abs() <= 0.05);
    assert!(rows[0][1].abs() <= 1e-6);
}

#[test]
fn ode_zero_forcing() {
    let cfg = scratch(
        "ode_zero.json",
        r#"{"alpha": 1.5, "forcing": "zero", "T": 10, "n": 21, "family": "powers", "param": 3, "scale": 0.0001}"#,
    );
    let o = run(&["solve-ode", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(csv_rows(&stdout(&o)).iter().all(|r| r[1] == 0.0));
}

#[test]
fn ode_decaying_forcing_bounded() {
    let cfg = configs().join("ode_texp.json");
    let o = run(&["solve-ode", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let peak = rows.iter().map(|r| r[1].abs()).fold(0.0, f64::max);
    assert!(peak.is_finite() && peak < 1.0);
    assert!(rows.last().unwrap()[1].abs() < 0.05);
}

#[test]
fn ode_schema_errors() {
    let cfg = scratch("bad.json", r#"{"alpha": 1.5, "forcing": "one", "T": 10, "n": 21, "family": "powers", "param": 3, "scale": 1, "extra": 1}"#);
    let o = run(&["solve-ode", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("extra"));
    let cfg = scratch("bad2.json", r#"{"alpha": 1.5, "forcing": "sinh", "T": 10, "n": 21, "family": "powers", "param": 3, "scale": 1}"#);
    let o = run(&["solve-ode", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("forcing"));
}

#[test]
fn pde_small_basis_matches_fd() {
    let cfg = configs().join("pde_alpha18_n11.json");
    let o = run(&["solve-pde", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("x,t,u\n"));
    let rows = csv_rows(&text);
    let p = MOLProblem {
        alpha: 1.8,
        dispersion: 0.25,
        length: std::f64::consts::PI,
        u0: InitialProfile::PolyHump,
        amplitude: 1.0,
        horizon: 0.4,
        node_count: 11,
        family: RBFFamily::gaussian(),
        scale: 1.0,
        out_times: vec![0.4],
    };
    let fd = gl_fd_solve(&p, 100, 400).unwrap();
    let final_rows: Vec<&Vec<f64>> = rows.iter().filter(|r| r[1] == 0.4).collect();
    assert_eq!(final_rows.len(), 11);
    assert_eq!(final_rows[0][2], 0.0);
    assert_eq!(final_rows[10][2], 0.0);
    let d = final_rows.iter().map(|r| (r[2] - fd.sample(0, r[0])).abs()).fold(0.0, f64::max);
    assert!(d <= 5e-2, "{d}");
}

#[test]
fn pde_zero_initial_data() {
    let cfg = scratch(
        "pde_zero.json",
        r#"{"alpha": 1.8, "K": 0.25, "L": 3.141592653589793, "T": 0.4, "n": 11, "u0": "zero", "family": "gaussian", "param": 0, "scale": 1, "out_times": [0.2, 0.4]}"#,
    );
    let o = run(&["solve-pde", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(csv_rows(&stdout(&o)).iter().all(|r| r[2] == 0.0));
}

#[test]
fn pde_negative_dispersion_reports_growth() {
    let cfg = configs().join("pde_negative_dispersion_n21.json");
    let o = run(&["solve-pde", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let line = stderr(&o).lines().find(|l| l.contains("growth factor")).unwrap().to_string();
    let g: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    // exp(0.25 · 4^1.5 · 0.5) = e for a pure Fourier mode
    assert!((g - std::f64::consts::E).abs() < 0.1, "{g}");
}

#[test]
fn output_is_deterministic() {
    let cfg = configs().join("pde_alpha18_n11.json");
    let a = run(&["solve-pde", "--config", cfg.to_str().unwrap()]);
    let b = run(&["solve-pde", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn shipped_configs_run() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let cmd = if name.starts_with("ode_") {
            "solve-ode"
        } else if name.starts_with("pde_") {
            "solve-pde"
        } else {
            "oracle-check"
        };
        let o = run(&[cmd, "--config", path.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
    }
}
