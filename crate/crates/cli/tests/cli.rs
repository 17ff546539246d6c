use std::path::Path;
use std::process::{Command, Output};

fn effcharge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effcharge")).args(args).env_remove("EFFCHARGE_DATA_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn potassium_selects_4s() {
    let o = effcharge(&["solve", "--Z", "19", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["configuration"], "[Ar] 4s1");
    assert!((v["E0"].as_f64().unwrap() + 571.305).abs() < 1e-3);
    let o = effcharge(&["solve", "--Z", "19", "--config", "[Ar] 3d1", "--format", "json"]);
    assert!((json(&o)["E0"].as_f64().unwrap() + 568.473).abs() < 1e-3);
}

#[test]
fn hydrogenic_ion_is_exact() {
    let o = effcharge(&["solve", "--Z", "2", "--N", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "He+");
    assert_eq!(row[8], "-2");
}

#[test]
fn table2_first_twenty_rows_pass() {
    let o = effcharge(&["table2", "--range", "1..20", "--order", "2", "--compare", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
    assert_eq!(v["comparison"]["all_pass"], true);
    assert_eq!(v["comparison"]["E2_single"]["summary"]["compared"], 20);
}

#[test]
fn failing_comparison_exits_one() {
    let o = effcharge(&["table2", "--range", "2", "--compare", "--e0-tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().last().unwrap().ends_with(",false"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = effcharge(&["--jobs", "3", "table2", "--range", "1..12", "--compare", "-o", p.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let a = effcharge(&["formfactor", "--Z", "10", "--s-max", "1", "--format", "json"]);
    let b = effcharge(&["formfactor", "--Z", "10", "--s-max", "1", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn computational_errors_are_json() {
    let o = effcharge(&["solve", "--Z", "5", "--config", "1s9"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "domain");
    assert!(v["error"]["message"].as_str().unwrap().contains("capacity"));

    let o = effcharge(&["solve", "--Z", "3", "--state", "2-3S", "--order", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn data_dir_variable_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_effcharge"))
        .args(["table2", "--range", "1..3", "--compare"])
        .env("EFFCHARGE_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "io");
}

#[test]
fn density_csv_names_atom_and_configuration() {
    let o = effcharge(&["density", "--Z", "10", "--r-max", "1", "--step", "0.1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# atom: Ne\n# Z: 10\n# N: 10\n# configuration: [Ne]\n# Zstar: 7.80729256"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "r,zeroth,first_order,hf");
    assert_eq!(rows.len(), 12);
    assert!(rows[5].split(',').all(|f| !f.is_empty()));
}

#[test]
fn formfactor_starts_at_electron_count() {
    let o = effcharge(&["formfactor", "--Z", "6", "--s-max", "0.5", "--step", "0.25"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let first = text.lines().find(|l| l.starts_with("0,")).unwrap();
    assert_eq!(first, "0,0,6,");
}

#[test]
fn compare_reads_computed_values() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    std::fs::write(&input, "Z,N,state,quantity,value\n2,2,ground,E2,-2.9077\n1,2,ground,E2,-0.5327\n9,9,ground,E2,-1\n").unwrap();
    let o = effcharge(&["compare", "--dataset", "table1", "--input", input.to_str().unwrap(), "--rel-tol", "0.015", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["summary"]["compared"], 2);
    assert_eq!(v["summary"]["uncovered"], 1);

    std::fs::write(&input, "Z,N,state,quantity,value\n2,2,ground,E2,oops\n").unwrap();
    let o = effcharge(&["compare", "--dataset", "table1", "--input", input.to_str().unwrap(), "--rel-tol", "0.1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert!(Path::new(&input).exists());
}
