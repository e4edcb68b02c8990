use std::process::{Command, Output};

use modres::recurrence::rec_sequence;
use modres::{Family, RatFunc};
use modres_cli::Cache;
use serde_json::{json, Value};

fn modres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modres"))
        .args(args)
        .env_remove(modres_cli::CACHE_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn compute_delta_family_entry_four() {
    let out = modres(&["compute", "--family", "mult:2,8,8", "--m-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["family"], "mult:2,8,8");
    assert_eq!(doc["entries"][4]["den"], json!([[2, 9], [4, 5], [6, 1]]));
    let e4: RatFunc = serde_json::from_value(doc["entries"][4].clone()).unwrap();
    assert_eq!(e4, rec_sequence(&Family::delta256(), 4).unwrap().entries()[4]);
}

#[test]
fn compute_theta_squared_initial_entry() {
    let out = modres(&["compute", "--family", "mult:0,0,2", "--m-max", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["entries"], json!([{"num": ["1"], "den": []}]));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["compute", "--family", "mult:1,2", "--m-max", "3"][..],
        &["residues", "--family", "poly:2:[(0,1,1)]"],
        &["residues", "--family", "mult:2,8,8", "--m-max", "4", "--trunc", "5"],
        &["residues", "--family", "mult:0,0,2", "--normalize-delta"],
        &["qseries-dump", "form"],
        &["scan", "fermat"],
    ] {
        let out = modres(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn residues_theta_squared_csv() {
    let out = modres(&["residues", "--family", "mult:0,0,2", "--m-max", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,pole,order,residue,recovered,oracle,match"));
    let recovered: Vec<&str> = lines.map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(recovered, ["4", "4", "0", "4", "8"]);
}

#[test]
fn residues_normalized_delta_gives_tau() {
    let out = modres(&["residues", "--family", "mult:2,8,8", "--m-max", "4", "--normalize-delta"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json_of(&out)["rows"][3];
    assert_eq!(row["m"], 4);
    assert_eq!(row["pole"], 6);
    assert_eq!(row["residue"], "-21/32768");
    assert_eq!(row["oracle"], "252");
    assert_eq!(row["match"], true);
}

#[test]
fn residues_theta_family_square_support() {
    let out = modres(&["residues", "--family", "mult:0,0,1", "--m-max", "10"]);
    let doc = json_of(&out);
    let nonzero: Vec<u64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["recovered"] != "0")
        .map(|r| r["m"].as_u64().unwrap())
        .collect();
    assert_eq!(nonzero, [1, 4, 9]);
    assert_eq!(doc["all_match"], true);
}

#[test]
fn scans() {
    let out = modres(&["scan", "two-squares", "--m-max", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["found"], json!([1, 2, 4, 5, 8, 9, 10]));
    let out = modres(&["scan", "lehmer", "--m-max", "6"]);
    assert_eq!(json_of(&out)["found"], json!([]));
    let out = modres(&["scan", "perfect-odd", "--m-max", "15"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["found"], json!([]));
}

#[test]
fn verify_suites() {
    let out = modres(&["verify", "--suite", "golden"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert!(doc["checks"].as_array().unwrap().iter().any(|c| c["detail"].as_str().unwrap().contains("27072")));

    let out = modres(&["verify", "--suite", "identities", "--trunc", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = modres(&["verify", "--suite", "resum", "--format", "pretty"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("result: pass\n"));
}

#[test]
fn output_is_deterministic() {
    let args = ["residues", "--family", "poly:2:[(1,1,1),(0,2,-3)]", "--m-max", "5"];
    let a = modres(&args);
    let b = modres(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let dump = modres(&["qseries-dump", "theta3", "--trunc", "9"]);
    assert_eq!(json_of(&dump), json!({"trunc": 9, "coeffs": ["1","2","0","0","2","0","0","0","0","2"]}));
}

#[test]
fn cache_round_trip_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let args = ["compute", "--family", "mult:0,0,1", "--m-max", "6", "--cache-dir", path];
    let first = modres(&args);
    assert_eq!(first.status.code(), Some(0));

    let cache = Cache::new(dir.path());
    let fam = Family::theta();
    let direct = rec_sequence(&fam, 6).unwrap();
    for m in 0..=6 {
        assert_eq!(cache.load(&fam, m).as_ref(), Some(&direct.entries()[m as usize]));
    }

    // A corrupted entry is recomputed, and output does not change.
    std::fs::write(cache.entry_path(&fam, 4), "{}").unwrap();
    let second = modres(&args);
    assert_eq!(second.stdout, first.stdout);
    assert_eq!(cache.load(&fam, 4).as_ref(), Some(&direct.entries()[4]));

    // The environment variable selects the same cache.
    let via_env = Command::new(env!("CARGO_BIN_EXE_modres"))
        .args(&args[..5])
        .env(modres_cli::CACHE_DIR_ENV, path)
        .output()
        .unwrap();
    assert_eq!(via_env.stdout, first.stdout);
}
