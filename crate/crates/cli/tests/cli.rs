use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn confine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confine")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Vec<Value>, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = confine(&full);
    let code = out.status.code().unwrap_or(-1);
    if code == 1 {
        return (Vec::new(), code);
    }
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (v["rows"].as_array().unwrap().clone(), code)
}

fn col<'a>(row: &'a Value, key: &str) -> &'a str {
    row[key].as_str().unwrap_or_else(|| panic!("no column {key} in {row}"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("confine-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn oscillator_ground_state() {
    let (rows, code) = json(&["solve", "--a", "0", "--b", "1", "--d", "3", "--l", "0", "--n", "0"]);
    assert_eq!(code, 0);
    assert_eq!(rows.len(), 1);
    let e: f64 = col(&rows[0], "E").parse().unwrap();
    assert!((e - 3.0).abs() < 1e-15);
    assert_eq!(col(&rows[0], "converged"), "yes");
}

#[test]
fn half_line_ladder_to_18_digits() {
    let expected = [
        "4.057877007967971193",
        "7.909673791067402644",
        "11.819201619422902597",
        "15.755974584087041187",
        "19.708234144818473335",
        "23.670343578651163274",
        "27.639205893933559031",
    ];
    let (rows, code) =
        json(&["solve", "--a", "1", "--b", "1", "--d", "3", "--l", "0", "--n", "0..6", "--digits", "18"]);
    assert_eq!(code, 0);
    let got: Vec<&str> = rows.iter().map(|r| col(r, "E")).collect();
    assert_eq!(got, expected);
}

#[test]
fn unit_wall() {
    let (rows, code) =
        json(&["solve", "--a", "1", "--b", "1", "--d", "3", "--l", "0", "--R", "1", "--n", "0", "--digits", "18"]);
    assert_eq!(code, 0);
    assert_eq!(col(&rows[0], "E"), "12.550092461190652257");
}

#[test]
fn iteration_cap_gives_partial_exit() {
    let out = confine(&["solve", "--a", "1", "--b", "1", "--d", "3", "--n", "0,1", "--n-max", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(" no"), "{text}");
}

#[test]
fn invalid_systems_exit_1() {
    for args in [
        &["solve", "--a", "1", "--b", "1", "--d", "1"][..],
        &["solve", "--a", "1", "--b", "-1", "--d", "3"],
        &["solve", "--a", "1", "--b", "1", "--d", "3", "--R", "-2"],
        &["solve", "--a", "1", "--b", "1", "--d", "3", "--n", "4..2"],
        &["solve", "--b", "1", "--d", "3"],
        &["table", "VI"],
        &["solve", "--bogus"],
    ] {
        let out = confine(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn config_file_with_override() {
    let dir = scratch("config");
    let cfg = dir.join("system.conf");
    fs::write(&cfg, "# unit wall\na = 5\nb = 1\nd = 3\nl = 0\nR = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (rows, code) = json(&["solve", "--config", cfg, "--a", "1", "--digits", "18"]);
    assert_eq!(code, 0);
    assert_eq!(col(&rows[0], "E"), "12.550092461190652257");

    fs::write(dir.join("bad.conf"), "a = 1\na = 2\nb = 1\nd = 3\n").unwrap();
    let out = confine(&["solve", "--config", dir.join("bad.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn csv_to_file_is_deterministic() {
    let dir = scratch("csv");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.join(format!("out{i}.csv"));
        let out = confine(&[
            "--format", "csv", "-o", path.to_str().unwrap(),
            "solve", "--a", "1", "--b", "1", "--d", "5", "--n", "0..2",
        ]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,l,d,E,N,r0,converged");
    assert_eq!(text.lines().count(), 4);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn exact_soft_degree_zero_is_only_a_zero() {
    let (rows, code) = json(&["exact", "soft", "--nprime", "0", "--d", "3", "--l", "0", "--b", "1"]);
    assert_eq!(code, 0);
    assert_eq!(rows.len(), 1);
    assert_eq!(col(&rows[0], "a").parse::<f64>().unwrap(), 0.0);
    assert_eq!(col(&rows[0], "E"), "3");
    assert_eq!(col(&rows[0], "type"), "ground");
}

#[test]
fn exact_soft_degree_three() {
    let (rows, _) = json(&["exact", "soft", "--nprime", "3", "--d", "3", "--l", "0", "--b", "1"]);
    let a: Vec<&str> = rows.iter().map(|r| &col(r, "a")[..16]).collect();
    assert_eq!(a, ["2.29376682474353", "7.39855619386012"]);
    assert_eq!(col(&rows[0], "node_radii")[..18].to_string(), "1.4470822287545015");
    assert!(rows.iter().all(|r| col(r, "E") == "9"));
}

#[test]
fn exact_hard_degree_two() {
    let (rows, code) = json(&["exact", "hard", "--n", "2", "--d", "3", "--l", "0", "--b", "1"]);
    assert_eq!(code, 0);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert!(col(r, "a").starts_with("2.2937668247435"));
    assert!(col(r, "R").starts_with("1.4470822287545"));
    assert_eq!(col(r, "E"), "9");
    assert_eq!(col(r, "nodes"), "0");
    assert_eq!(col(r, "aim_checked"), "yes");
}

#[test]
fn bounds_reported() {
    let (rows, code) = json(&["bounds", "--a", "1", "--b", "1", "--d", "3"]);
    assert_eq!(code, 0);
    let value = |name: &str| -> f64 {
        let row = rows.iter().find(|r| col(r, "bound") == name).unwrap();
        col(row, "value").parse().unwrap()
    };
    assert!((value("local-energy") - 3.79049).abs() < 1e-4);
    assert!((value("gaussian") - 4.07988).abs() < 1e-4);
    assert!((value("envelope") - 4.2287).abs() < 1e-4);

    let (rows, _) = json(&["bounds", "--a", "1", "--b", "1", "--d", "4", "--n", "3"]);
    assert_eq!(rows.len(), 1);
    assert!((col(&rows[0], "value").parse::<f64>().unwrap() - 16.9444).abs() < 1e-4);
}

#[test]
fn bounds_at_pure_oscillator() {
    let (rows, _) = json(&["bounds", "--a", "0", "--b", "1", "--d", "3"]);
    for r in &rows {
        let v: f64 = col(r, "value").parse().unwrap();
        match col(r, "kind") {
            "upper" => assert!((v - 3.0).abs() < 1e-8, "{r}"),
            _ => assert!(v <= 3.0 + 1e-8, "{r}"),
        }
    }
}

#[test]
fn bounds_reject_walls() {
    let out = confine(&["bounds", "--a", "1", "--b", "1", "--d", "3", "--R", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tables_one_and_four_match() {
    for name in ["I", "iv"] {
        let (rows, code) = json(&["table", name]);
        assert_eq!(code, 0, "table {name}");
        assert!(rows.iter().all(|r| col(r, "ok") == "yes"));
    }
}

#[test]
fn quick_oracle_check_passes() {
    let (rows, code) = json(&["--jobs", "2", "oracle-check", "--quick"]);
    assert_eq!(code, 0);
    assert!(rows.len() >= 5);
}
