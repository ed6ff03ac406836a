//! End-to-end tests of the `gradedlie` binary: exit codes, JSON shape,
//! determinism, and the aut spec formats.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradedlie"))
        .args(args)
        .env_remove("GRADEDLIE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn jacobi_clean_point_exits_zero() {
    let out = run(&["jacobi", "--lambda", "3", "--mu", "1/3", "--window", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("OK"));
}

#[test]
fn jacobi_excluded_points_exit_two() {
    let out = run(&["jacobi", "--lambda", "0", "--mu", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("excluded"));
    assert!(stderr(&out).contains("lambda = mu = 0"));

    let out = run(&["jacobi", "--lambda", "1", "--mu", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("1/2"));
}

#[test]
fn classify_json_report() {
    let out = run(&[
        "classify", "--lambda", "3", "--mu", "1/3", "--window", "6", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["dim_deg0"], 4);
    assert_eq!(v["dim_inner_deg0"], 3);
    assert_eq!(v["outer_basis_names"][0], "D");
    assert_eq!(v["matches_theorem"], true);
    // every numeric parameter is an exact rational string
    assert_eq!(v["params"]["mu"], "1/3");
}

#[test]
fn classify_json_is_deterministic() {
    let args = [
        "classify", "--lambda", "-1", "--mu", "0", "--window", "6", "--format", "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn report_default_grid_all_match() {
    let out = run(&["report", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row["matches_theorem"], true, "row: {row}");
        assert_eq!(row["group_laws_pass"], true);
    }
}

#[test]
fn report_grid_with_excluded_point() {
    let dir = std::env::temp_dir().join("gradedlie-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let grid = dir.join("grid.txt");
    std::fs::write(&grid, "# test grid\n1 1/2\n3 1/3\n").unwrap();
    let out = run(&[
        "report",
        "--grid",
        grid.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rows[0]["excluded"].as_str().unwrap().contains("1/2"));
    assert_eq!(rows[1]["matches_theorem"], true);
}

#[test]
fn aut_factor_inline_expr() {
    let out = run(&[
        "aut",
        "--lambda",
        "1",
        "--mu",
        "0",
        "factor",
        "--expr",
        "scale 2 3; shear 5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("eps=1 alpha=2 beta=3 e=5 round-trip OK"),
        "got: {text}"
    );
}

#[test]
fn aut_factor_json_fields() {
    let out = run(&[
        "aut",
        "--lambda",
        "-2",
        "--mu",
        "0",
        "factor",
        "--expr",
        "diagonal 3; flip -1; unipotent 7",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["epsilon"], -1);
    assert_eq!(v["alpha"], "3");
    assert_eq!(v["unipotent_b"], "7");
    assert_eq!(v["residual_is_identity"], true);
}

#[test]
fn aut_verify_identity_passes() {
    let out = run(&[
        "aut", "--lambda", "3", "--mu", "1/3", "verify", "--expr", "flip 1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("OK"));
}

#[test]
fn aut_verify_mutated_spec_fails_with_pair() {
    let dir = std::env::temp_dir().join("gradedlie-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("mutant.aut");
    // Unipotent with the wrong exponent for lambda = -2 (n^2 instead of n^3).
    let mut spec = String::from("images\n");
    for n in -8..=8i64 {
        spec.push_str(&format!("L{n} = L{n} + {}*M{n}\n", n * n));
    }
    std::fs::write(&spec_path, spec).unwrap();
    let out = run(&[
        "aut",
        "--lambda",
        "-2",
        "--mu",
        "0",
        "verify",
        "--spec",
        spec_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("hom defect"), "got: {}", stdout(&out));
}

#[test]
fn aut_invalid_params_exit_two() {
    let out = run(&[
        "aut", "--lambda", "2", "--mu", "3", "verify", "--expr", "flip 1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_env_var_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_gradedlie"))
        .args([
            "aut", "--lambda", "1", "--mu", "0", "verify", "--expr", "flip 1", "--seed", "7",
        ])
        .env("GRADEDLIE_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "bad env seed must be rejected");
    let out = Command::new(env!("CARGO_BIN_EXE_gradedlie"))
        .args([
            "aut", "--lambda", "1", "--mu", "0", "verify", "--expr", "flip 1", "--seed", "7",
        ])
        .env("GRADEDLIE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn window_below_minimum_is_rejected() {
    let out = run(&["classify", "--lambda", "3", "--mu", "1/3", "--window", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn factor_accepts_raw_image_tables() {
    // The full image table of scale(2,3) given explicitly; factoring a raw
    // map must work exactly like factoring the tagged constructor.
    let dir = std::env::temp_dir().join("gradedlie-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("scale23.aut");
    let coeff = |mult: i64, n: i64| -> String {
        let p2 = 2i64.pow(n.unsigned_abs() as u32);
        if n >= 0 {
            format!("{}", mult * p2)
        } else {
            format!("{mult}/{p2}")
        }
    };
    let mut spec = String::from("images\n");
    for n in -8..=8i64 {
        spec.push_str(&format!("L{n} = {}*L{n}\n", coeff(1, n)));
        spec.push_str(&format!("Y{n} = {}*Y{n}\n", coeff(3, n)));
        spec.push_str(&format!("M{n} = {}*M{n}\n", coeff(9, n)));
    }
    std::fs::write(&spec_path, spec).unwrap();
    let out = run(&[
        "aut",
        "--lambda",
        "1",
        "--mu",
        "0",
        "factor",
        "--spec",
        spec_path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["alpha"], "2");
    assert_eq!(v["beta"], "3");
    assert_eq!(v["residual_is_identity"], true);
}

#[test]
fn degree_range_flag() {
    let out = run(&[
        "classify",
        "--lambda",
        "3",
        "--mu",
        "1/3",
        "--degrees",
        "-1..1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["h1_by_degree"].as_array().unwrap().len(), 3);

    let out = run(&[
        "classify",
        "--lambda",
        "3",
        "--mu",
        "1/3",
        "--degrees",
        "-5..5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degree range"));
}
