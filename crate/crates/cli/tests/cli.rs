use std::process::{Command, Output};

fn nlsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsys"))
        .args(args)
        .env_remove("SOLVER_PREC_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = nlsys(args);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)))
}

#[test]
fn solve_ex41_m4_residuals() {
    let o = nlsys(&["solve", "--problem", "ex41", "--method", "m4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["residuals"], serde_json::json!(["2.2420e-5", "1.4101e-24", "1.1905e-101"]));
    assert_eq!(v["status"], "converged");
    assert_eq!(v["efficiency_index"].as_f64().map(|e| format!("{e:.4}")), Some("1.0452".into()));
}

#[test]
fn json_schema_has_exactly_the_report_keys() {
    let v = json(&["solve", "--problem", "ex45", "--method", "m3", "--format", "json"]);
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["coc", "efficiency_index", "iterations", "method", "problem", "residuals", "status"]);
    let coc = v["coc"].as_f64().unwrap();
    assert!((2.7..=3.4).contains(&coc));
}

#[test]
fn small_cyclic_system_converges() {
    let o = nlsys(&["solve", "--problem", "ex48", "--size", "5", "--method", "m3", "--tol", "1e-50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("converged"));
}

#[test]
fn general_scheme_at_third_order_parameters_reproduces_m3() {
    let m3 = json(&["solve", "--problem", "ex41", "--method", "m3", "--format", "json"]);
    let general = json(&[
        "solve", "--problem", "ex41", "--method", "m4-general", "--beta", "1", "--a1", "1", "--a2", "0", "--a3", "0", "--format", "json",
    ]);
    for key in ["status", "iterations", "residuals", "coc", "efficiency_index"] {
        assert_eq!(m3[key], general[key], "{key}");
    }
}

#[test]
fn general_scheme_accepts_fractions_and_negatives() {
    let m4 = json(&["solve", "--problem", "ex44", "--method", "m4", "--format", "json"]);
    let general = json(&[
        "solve", "--problem", "ex44", "--method", "m4-general", "--beta", "2/3", "--a1", "9/4", "--a2", "-9/4", "--a3", "1", "--format", "json",
    ]);
    assert_eq!(m4["residuals"], general["residuals"]);
}

#[test]
fn usage_errors_exit_3() {
    for args in [
        &["solve", "--problem", "ex41", "--method", "m3", "--beta", "1"][..],
        &["solve", "--problem", "ex41", "--method", "m4-general", "--beta", "1"],
        &["solve", "--problem", "ex99", "--method", "m3"],
        &["solve", "--problem", "ex41", "--method", "m5"],
        &["solve", "--problem", "ex41", "--method", "m3", "--tol", "-1"],
        &["solve", "--problem", "ex48", "--size", "4", "--method", "m3"],
        &["efficiency", "--kind", "flops", "--n-from", "5", "--n-to", "4"],
        &["efficiency", "--kind", "flops", "--n-from", "1", "--n-to", "4"],
        &["verify", "--params", "1,2"],
        &["table2", "--methods", "sh4"],
        &["frobnicate"],
    ] {
        let o = nlsys(args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn non_convergence_exits_2() {
    let o = nlsys(&["solve", "--problem", "ex42", "--method", "m3", "--max-iter", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("max_iter_reached"));
}

#[test]
fn precision_from_environment() {
    let low = Command::new(env!("CARGO_BIN_EXE_nlsys"))
        .args(["solve", "--problem", "ex41", "--method", "m4", "--tol", "1e-10", "--format", "json"])
        .env("SOLVER_PREC_BITS", "64")
        .output()
        .unwrap();
    assert_eq!(low.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_nlsys"))
        .args(["solve", "--problem", "ex41", "--method", "m4"])
        .env("SOLVER_PREC_BITS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
    // 64 bits cannot reach the default 1e-150 on an irrational root
    let o = Command::new(env!("CARGO_BIN_EXE_nlsys"))
        .args(["solve", "--problem", "ex42", "--method", "m4", "--max-iter", "20"])
        .env("SOLVER_PREC_BITS", "64")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn efficiency_csv_shape() {
    let o = nlsys(&["efficiency", "--kind", "flops", "--n-from", "2", "--n-to", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,SH4,MN4,M3,M4");
    assert_eq!(lines.len() - 1, 19);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        for cell in &cells[1..] {
            let digits = cell.chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 10, "{cell}");
        }
        let v: Vec<f64> = cells[1..].iter().map(|c| c.parse().unwrap()).collect();
        assert!(v[3] > v[0] && v[3] > v[1] && v[3] > v[2], "{line}");
    }

    let o = nlsys(&["efficiency", "--kind", "flops", "--n-from", "2", "--n-to", "80"]);
    assert_eq!(stdout(&o).lines().count() - 1, 79);
}

#[test]
fn classical_fourth_order_cells_are_equal() {
    let text = stdout(&nlsys(&["efficiency", "--kind", "classical", "--n-from", "2", "--n-to", "2"]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], row[2]);
    assert_eq!(row[2], row[4]);
    assert_ne!(row[3], row[4]);
}

#[test]
fn efficiency_writes_file() {
    let path = std::env::temp_dir().join(format!("nlsys-eff-{}.csv", std::process::id()));
    let o = nlsys(&["efficiency", "--kind", "classical", "--n-from", "2", "--n-to", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, stdout(&nlsys(&["efficiency", "--kind", "classical", "--n-from", "2", "--n-to", "5"])));
}

#[test]
fn table2_rows_and_determinism() {
    let args = ["table2", "--problems", "ex41,ex45,ex47", "--format", "csv"];
    let first = stdout(&nlsys(&args));
    assert_eq!(first, stdout(&nlsys(&args)));
    let rows: Vec<Vec<&str>> = first.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let ex45_m3 = rows.iter().find(|r| r[0] == "4.5" && r[1] == "M3").unwrap();
    assert_eq!(&ex45_m3[2..6], ["6.9918e-5", "1.9702e-12", "3.7793e-35", "1.0132"]);
    let ex47_m4 = rows.iter().find(|r| r[0] == "4.7" && r[1] == "M4").unwrap();
    assert_eq!(ex47_m4[5], "1.0452");
}

#[test]
fn table2_reference_rows_are_flagged() {
    let text = stdout(&nlsys(&["table2", "--problems", "ex41", "--format", "csv", "--with-reference"]));
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let methods: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(methods, ["M3", "MN4", "SH4", "M4"]);
    for r in &rows {
        let expected = if r[1].ends_with('4') && r[1] != "M4" { "reference" } else { "computed" };
        assert_eq!(r[9], expected);
    }
}

#[test]
fn table2_markdown_default_has_sixteen_rows() {
    let o = nlsys(&["table2"]);
    assert_eq!(o.status.code(), Some(0));
    // header + separator + 16
    assert_eq!(stdout(&o).lines().count(), 18);
}

#[test]
fn verify_messages() {
    let o = nlsys(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("order 4 conditions satisfied"));
    assert_eq!(text.matches(" ok").count(), 8);

    let text = stdout(&nlsys(&["verify", "--params", "1,1,0,0"]));
    assert!(text.contains("order 3 (T2 ≠ 0"), "{text}");

    let text = stdout(&nlsys(&["verify", "--params", "1,0,0,0"]));
    assert!(text.contains("order ≤ 2") && text.contains("1-Σa ≠ 0") && text.contains("linear-term failure"), "{text}");
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(nlsys(&["--help"]).status.code(), Some(0));
    assert_eq!(nlsys(&["--version"]).status.code(), Some(0));
    assert_eq!(nlsys(&["solve", "--help"]).status.code(), Some(0));
}
