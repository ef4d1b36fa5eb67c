//! End-to-end checks of the `pdmdirac` binary and the in-process runner.

use std::path::Path;
use std::process::Command;

use pdm_dirac::cli::{self, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pdmdirac"));
    c.env_remove(cli::OUT_DIR_ENV);
    c
}

fn run_in_process(args: &[&str], out: &Path) -> (i32, String, String) {
    let mut argv = vec!["pdmdirac"];
    argv.extend_from_slice(args);
    let mut so = Vec::new();
    let mut se = Vec::new();
    let code = cli::run(argv, Some(out), &mut so, &mut se);
    (code, String::from_utf8(so).unwrap(), String::from_utf8(se).unwrap())
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn spectrum_reports_sqrt3_ground_level() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run_in_process(&["spectrum", "--profile", "linear", "--mu", "1", "--k", "4"], dir.path());
    assert_eq!(code, EXIT_OK, "{err}");
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], 1.0);
    assert_eq!(rows[0][1], 3f64.sqrt());
    assert!((rows[0][2] - 3f64.sqrt()).abs() < 1e-4);
    assert!(dir.path().join("spectrum.csv").exists());
    assert!(dir.path().join("spectrum_modes.svg").exists());
}

#[test]
fn profile_csv_peaks_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in_process(&["profile", "--kind", "hyperbolic", "--m0", "1", "--a", "1"], dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("x[length],m[mass],"));
    let rows = csv_rows(&out);
    let origin = rows.iter().find(|r| r[0] == 0.0).expect("x = 0 row");
    assert_eq!(origin[1], 1.0);
    assert_eq!(std::fs::read_to_string(dir.path().join("profile.csv")).unwrap(), out);
}

#[test]
fn pt_check_json_has_zero_delta() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in_process(&["pt-check", "--profile", "hyperbolic", "--n", "200"], dir.path());
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["delta"], 0.0);
    for key in ["n_real", "n_conjugate_pairs", "max_im_eig"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["config"]["subcommand"], "pt-check");
    assert_eq!(v["decoupled"]["delta"], 0.0);
}

#[test]
fn linear_pt_check_uses_sigma3() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in_process(&["pt-check", "--profile", "linear", "--n", "200", "--xhi", "6"], dir.path());
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["involution"], "sigma3");
    assert_eq!(v["delta"], 0.0);
    assert!(v["alternative_involution"]["delta"].as_f64().unwrap() > 1.0);
}

#[test]
fn fw_check_emits_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) =
        run_in_process(&["fw-check", "--profile", "hyperbolic", "--m0", "5", "--window", "-2", "2"], dir.path());
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["c1_deviation"].as_f64().unwrap() < 1e-2);
    assert!(v["c2_deviation"].as_f64().unwrap() < 1e-2);
    assert_eq!(v["mass_scale_sweep"].as_array().unwrap().len(), 4);
}

#[test]
fn scatter_and_heun_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in_process(&["scatter", "--emin", "0.5", "--emax", "2", "--steps", "4"], dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("E[energy],T[1],R[1],flux_defect[1]\n"));
    for r in csv_rows(&out) {
        assert!(r[3].abs() < 1e-6);
    }
    let (code, out, _) = run_in_process(&["heun", "--order", "30", "--xi", "1.2"], dir.path());
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["branches"].as_array().unwrap().len(), 2);
    assert!(v["wronskian_abs"].as_f64().unwrap() > 0.1);
}

#[test]
fn config_file_overrides_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"subcommand":"profile","m0":2.0,"n":5}"#).unwrap();
    let (code, out, _) =
        run_in_process(&["profile", "--m0", "1", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv_rows(&out).len(), 5);
    assert_eq!(csv_rows(&out)[2][1], 2.0);

    std::fs::write(&cfg, r#"{"m0":2.0,"colour":"red"}"#).unwrap();
    let (code, out, err) = run_in_process(&["profile", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, EXIT_CONFIG);
    assert!(out.is_empty());
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["error"]["code"], 2);
    assert!(e["error"]["message"].as_str().unwrap().contains("colour"));
}

#[test]
fn echoed_config_reproduces_run_and_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let (code, first, _) = run_in_process(&["heun", "--energy", "2", "--order", "12"], dir.path());
    assert_eq!(code, EXIT_OK);
    let echo = serde_json::from_str::<Value>(&first).unwrap()["config"].clone();

    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run_config.schema.json")).unwrap(),
    )
    .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    assert!(validator.is_valid(&echo));
    let mut bad = echo.clone();
    bad["extra"] = Value::from(1);
    assert!(!validator.is_valid(&bad));

    let cfg = dir.path().join("echo.json");
    std::fs::write(&cfg, echo.to_string()).unwrap();
    let (code, second, _) = run_in_process(&["heun", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, EXIT_OK);
    assert_eq!(first, second);
}

#[test]
fn binary_exit_codes_and_env_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args(["profile", "--n", "11"])
        .env(cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(EXIT_OK));
    assert!(dir.path().join("profile.csv").exists());

    let st = bin().args(["heun", "--xi", "2.5", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_CONFIG));
    let e: Value = serde_json::from_slice(&st.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "parameter");

    // A barrier this tall is too stiff for the integrator.
    let st = bin()
        .args(["scatter", "--m0", "1e4", "--emin", "0.2", "--emax", "0.3", "--steps", "2", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(EXIT_NUMERIC));
    let e: Value = serde_json::from_slice(&st.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "numerical");

    let st = bin().arg("no-such-command").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_CONFIG));
    assert!(serde_json::from_slice::<Value>(&st.stderr).is_ok());

    let st = bin().arg("--help").output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_OK));
}

#[test]
fn singular_grid_reports_nodes() {
    let dir = tempfile::tempdir().unwrap();
    // sech(100)^(1/2) is below the singularity guard; sech(50)^(1/2) is not.
    let args = ["potential", "--profile", "hyperbolic", "--a", "10", "--xlo", "-10", "--xhi", "10", "--n", "5"];
    let (code, _, err) = run_in_process(&args, dir.path());
    assert_eq!(code, EXIT_CONFIG, "{err}");
    let e: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(e["error"]["kind"], "parameter");
    assert_eq!(e["error"]["singular_nodes"], serde_json::json!([[0, -10.0], [4, 10.0]]));
}

#[test]
fn figures_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["figures", "--samples", "101"];
    let (ca, oa, _) = run_in_process(&args, a.path());
    let (cb, ob, _) = run_in_process(&args, b.path());
    assert_eq!((ca, cb), (EXIT_OK, EXIT_OK));
    let files: Vec<String> = serde_json::from_str::<Value>(&oa).unwrap()["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap().to_string())
        .collect();
    assert_eq!(files.len(), 20);
    for f in &files {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    // Only the echoed output directory differs between the two manifests.
    assert_eq!(oa.replace(a.path().to_str().unwrap(), ""), ob.replace(b.path().to_str().unwrap(), ""));
}
