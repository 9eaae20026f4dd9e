use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ipr_core::coloring::{Coloring, Domain};
use ipr_core::matrix::{build_family, SegmentedSpec};
use ipr_core::search::Certificate;
use ipr_core::SparseMatrix;

fn ipr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipr"))
        .args(args)
        .env_remove("IPR_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, v: &T) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn dyadic_phi_prints_count() {
    let o = ipr(&["dyadic", "phi", "9/8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
    let o = ipr(&["dyadic", "color", "73/64"]);
    assert_eq!(stdout(&o).trim(), "2");
    assert_eq!(ipr(&["dyadic", "phi", "1/3"]).status.code(), Some(3));
}

#[test]
fn compactness_bound_for_schur() {
    let o = ipr(&["bound", "compactness", "--family", "schur", "--colors", "2", "--max", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "5");
    let o = ipr(&["bound", "compactness", "--family", "schur", "--colors", "2", "--max", "4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mt_enum_lists_sorted_values() {
    let o = ipr(&["mt", "enum", "--coeffs", "1,2", "--terms", "1,4,16"]);
    let values: Vec<String> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(values, ["9", "33", "36", "37", "41"]);
}

#[test]
fn witness_search_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let c = Coloring::table_from_colors(Domain::integers(1, 5).unwrap(), 2, &[0, 1, 1, 0, 0]);
    let cpath = write_json(dir.path(), "c.json", &c);
    let cert = dir.path().join("w.json");
    let o = ipr(&[
        "search", "witness", "--family", "schur", "--coloring", &cpath, "-o", cert.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let parsed: Certificate = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(parsed.witness().unwrap().1.len(), 3);
    assert_eq!(ipr(&["verify", cert.to_str().unwrap()]).status.code(), Some(0));

    // recolor 5 in the embedded coloring
    let text = fs::read_to_string(&cert).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["coloring"]["assignment"][4][1] = serde_json::json!(1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, v.to_string()).unwrap();
    let o = ipr(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("image entry 2"));
}

#[test]
fn none_and_budget_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c = Coloring::table_from_colors(Domain::integers(1, 4).unwrap(), 2, &[0, 1, 1, 0]);
    let cpath = write_json(dir.path(), "c.json", &c);
    let o = ipr(&["search", "witness", "--family", "schur", "--coloring", &cpath]);
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_ipr"))
        .args(["search", "witness", "--family", "schur", "--coloring", &cpath])
        .env("IPR_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = ipr(&["search", "witness", "--family", "nope", "--coloring", &cpath]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn outputs_replay_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, workers) in [(&a, "1"), (&b, "4")] {
        let o = ipr(&[
            "separation", "depth", "--window", "-6,0", "--maxlen", "3", "--workers", workers, "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(!dir.path().join("a.json.partial").exists());
}

#[test]
fn families_round_trip() {
    let o = ipr(&["families", "build", "--family", "mt", "--size", "3", "--params", "1,2"]);
    let m: SparseMatrix = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m, build_family("mt", 3, &["1".parse().unwrap(), "2".parse().unwrap()]).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "m.json", &m);
    let o = ipr(&["classify", &p, "--breakpoints", "0,3"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["first_entries"], true);
    assert_eq!(report["monic"], true);

    let o = ipr(&["families", "build", "--family", "mt", "--size", "3", "--params", "2,1"]);
    let p = dir.path().join("m2.json");
    fs::write(&p, o.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout(&ipr(&["classify", p.to_str().unwrap(), "--breakpoints", "0,3"]))).unwrap();
    assert_eq!(report["first_entries"], true);
    assert_eq!(report["monic"], false);
}

#[test]
fn pipeline_and_segmented_emit_verifiable_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let schur = build_family("schur", 2, &[]).unwrap();
    let m = write_json(dir.path(), "m.json", &schur);
    let phi = Coloring::dyadic_phi(Domain::dyadic_window(-12, 0).unwrap(), 2);
    let c = write_json(dir.path(), "phi.json", &phi);
    let out = dir.path().join("p.json");
    let o = ipr(&[
        "pipeline", "extend", "--finite", &m, "--coloring", &c, "--epsilon", "1/16", "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(ipr(&["verify", out.to_str().unwrap()]).status.code(), Some(0));

    let spec = SegmentedSpec::from_blocks(&[schur.clone(), schur.clone(), schur]).unwrap();
    let s = write_json(dir.path(), "s.json", &spec);
    let out = dir.path().join("seg.json");
    let o = ipr(&[
        "segmented", "solve", "--spec", &s, "--generators", "base4:12", "--depth", "2", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(ipr(&["verify", out.to_str().unwrap()]).status.code(), Some(0));
    let o = ipr(&["segmented", "solve", "--spec", &s, "--generators", "base4:4", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn examples_and_extend_row() {
    let o = ipr(&["construct", "ex16", "--y", "1,3,5"]);
    let cert: Certificate = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert.witness().unwrap().0, ["1".parse().unwrap(), "1".parse().unwrap(), "1".parse().unwrap()]);
    assert_eq!(ipr(&["construct", "ex16", "--y", "1,2"]).status.code(), Some(3));
    let o = ipr(&["construct", "ex16-obstruction", "--x", "1/8,1/10,1/10,1/10"]);
    assert_eq!(stdout(&o).trim(), "3");
    let o = ipr(&[
        "extend-row", "--family", "schur", "--row", "1,1", "--candidates", "1", "--colors", "2", "--max", "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["chosen"], "1");
}
