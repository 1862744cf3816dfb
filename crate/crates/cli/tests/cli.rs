use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use a2m_core::fixtures::{ordered_atoms_tree, shape_fixtures, two_colour_dodecagon};
use a2m_core::io::{a2m_json, to_pretty, triangulation_json};
use serde_json::Value;

fn a2m(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_a2m")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn enumerate_hexagon() {
    let out = a2m(&["enumerate", "--n", "6"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["count"], 14);
    assert_eq!(v["result"]["triangulations"].as_array().unwrap().len(), 14);
    assert_eq!(v["config"]["params"]["n"], 6);
}

#[test]
fn validate_reports_crossings_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "cross.json", r#"{"n": 4, "diagonals": [[0, 2], [1, 3]]}"#);
    let out = a2m(&["validate", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["valid"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cross"));

    let ok = write(dir.path(), "ok.json", r#"{"vertices": [1, 2, 3], "edges": [[1, 2], [2, 3]]}"#);
    let out = a2m(&["validate", s(&ok)]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["kind"], "tree");

    let cyc = write(dir.path(), "cyc.json", r#"{"vertices": [1, 2, 3], "edges": [[1, 2], [2, 3], [3, 1]]}"#);
    assert_eq!(a2m(&["validate", s(&cyc)]).status.code(), Some(1));
}

#[test]
fn exit_codes_for_arguments_and_io() {
    assert_eq!(a2m(&["enumerate", "--n", "2"]).status.code(), Some(2));
    assert_eq!(a2m(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(a2m(&["kingman", "sim", "--m", "3", "--n", "1,2"]).status.code(), Some(2));
    assert_eq!(a2m(&["decode", "/nonexistent/file.json"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing-dir").join("out.json");
    assert_eq!(a2m(&["enumerate", "--n", "4", "--out", s(&out)]).status.code(), Some(3));
}

#[test]
fn kingman_sim_is_deterministic() {
    let a = a2m(&["kingman", "sim", "--m", "1", "--n", "3", "--seed", "7"]);
    let b = a2m(&["kingman", "sim", "--m", "1", "--n", "3", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["result"]["history"]["events"].as_array().unwrap().len(), 2);
    let c = a2m(&["kingman", "sim", "--m", "1", "--n", "3", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn decode_then_encode() {
    let dir = tempfile::tempdir().unwrap();
    let (t, k) = two_colour_dodecagon();
    let f = write(dir.path(), "dodecagon.json", &to_pretty(&triangulation_json(&t, &k)));
    let out = a2m(&["decode", s(&f)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tree = json(&out)["result"]["tree"].clone();
    assert_eq!(tree["nu"]["measures"][0]["0"], "1/6");
    let tf = write(dir.path(), "tree.json", &to_pretty(&tree));
    let out = a2m(&["encode", s(&tf), "--root", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let enc = json(&out);
    assert_eq!(enc["result"]["triangulation"]["n"], 12);
    assert_eq!(enc["result"]["triangulation"]["diagonals"].as_array().unwrap().len(), 9);

    let atoms = write(dir.path(), "atoms.json", &to_pretty(&a2m_json(&ordered_atoms_tree())));
    let out = a2m(&["encode", s(&atoms), "--root", "0", "--mode", "float"]);
    let arcs = json(&out)["result"]["triangulation"]["arcs"].clone();
    assert_eq!(arcs[0], "2.5000000000000000e-1");
    assert_eq!(arcs[1], "1.2500000000000000e-1");
    assert_eq!(a2m(&["encode", s(&atoms), "--root", "5"]).status.code(), Some(1));
}

#[test]
fn shape_dist_exact_and_mc() {
    let dir = tempfile::tempdir().unwrap();
    let (_, chi) = shape_fixtures().into_iter().next().unwrap();
    let f = write(dir.path(), "star.json", &to_pretty(&a2m_json(&chi)));
    let exact = json(&a2m(&["shape-dist", s(&f), "--n", "3"]));
    let probs = exact["result"]["probs"].as_object().unwrap();
    assert_eq!(probs.len(), 5);
    assert!(probs.values().any(|p| p == "1/9"));
    let mc1 = a2m(&["shape-dist", s(&f), "--n", "2,1", "--method", "mc", "--samples", "5000", "--seed", "3"]);
    let mc4 =
        a2m(&["shape-dist", s(&f), "--n", "2,1", "--method", "mc", "--samples", "5000", "--seed", "3", "--jobs", "4"]);
    assert!(mc1.status.success());
    let (v1, v4) = (json(&mc1), json(&mc4));
    assert_eq!(v1["result"], v4["result"]);
}

#[test]
fn ds_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<PathBuf> = shape_fixtures()
        .into_iter()
        .take(3)
        .map(|(name, chi)| write(dir.path(), &format!("{name}.json"), &to_pretty(&a2m_json(&chi))))
        .collect();
    let out = a2m(&["ds", s(&files[0]), s(&files[1]), s(&files[2]), "--m-max", "2", "--budget", "3", "--samples", "500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&out)["result"]["distances"].clone();
    for i in 0..3 {
        assert_eq!(m[i][i], "0.0000000000000000e0");
        for j in 0..3 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
}

#[test]
fn bpd_rate_and_kingman_experiments() {
    let out = a2m(&["bpd-rate", "--leaves", "8", "--p", "10,40", "--trials", "20", "--seed", "2"]);
    assert!(out.status.success());
    let runs = json(&out)["result"]["runs"].clone();
    assert_eq!(runs.as_array().unwrap().len(), 2);
    assert_eq!(runs[0]["all_within_bound"], true);

    let args = ["kingman", "consistency", "--n", "2,2", "--j", "1,1", "--samples", "4000", "--seed", "5"];
    let out = a2m(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["pass"], true);

    let args = ["kingman", "converge", "--schedule", "2x2,3x3", "--samples", "100", "--seeds", "2", "--budget", "2"];
    let a = a2m(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# a2m"));
    assert_eq!(lines.next().unwrap(), "step,from,to,seed,estimate,tail_bound");
    assert_eq!(lines.count(), 2);
    assert_eq!(a2m(&args).stdout, a.stdout);
    assert_eq!(a2m(&["kingman", "converge", "--schedule", "2y2,3x3"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tri.json");
    let r = a2m(&["enumerate", "--n", "5", "--out", s(&out)]);
    assert!(r.status.success());
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["count"], 5);
}
