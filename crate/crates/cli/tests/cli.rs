use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn pirbatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pirbatch")).args(args).output().expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn build(dir: &TempDir, name: &str, args: &[&str]) -> (String, String) {
    let out = path(dir, name);
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &out]);
    let res = pirbatch(&full);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    (out, String::from_utf8(res.stderr).unwrap())
}

#[test]
fn build_profiles() {
    let dir = TempDir::new().unwrap();
    let (_, profile) = build(&dir, "m.json", &["multiplicity", "--m", "2", "--d", "2", "--s", "2", "--q", "7"]);
    assert!(profile.contains("N=49") && profile.contains("k=3"), "{profile}");
    let (a, profile) = build(&dir, "a.json", &["array", "--r", "3", "--k", "2"]);
    assert!(profile.contains("p=73") && profile.contains("redundancy=146"), "{profile}");
    let json = std::fs::read_to_string(a).unwrap();
    assert!(json.contains("\"p\": 73"), "{json}");
    let (_, profile) = build(&dir, "f.json", &["array", "--five-batch", "--p", "5"]);
    assert!(profile.contains("redundancy=26"), "{profile}");
}

#[test]
fn build_rejects_violated_constraints() {
    let res = pirbatch(&["build", "multiplicity", "--m", "2", "--d", "2", "--s", "2", "--q", "6"]);
    assert_eq!(res.status.code(), Some(2));
    let res = pirbatch(&["build", "array", "--r", "3"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (m, _) = build(&dir, "m.json", &["multiplicity", "--m", "2", "--d", "2", "--s", "2", "--q", "7"]);
    let res = pirbatch(&["certify", "--code", &m, "--mode", "pir"]);
    assert_eq!(res.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!((summary["total"].as_u64(), summary["failed"].as_u64()), (Some(49), Some(0)));

    let (a, _) = build(&dir, "a.json", &["array", "--r", "3", "--k", "2"]);
    assert_eq!(pirbatch(&["certify", "--code", &a, "--mode", "batch", "--k", "2"]).status.code(), Some(0));

    // k = 3 exceeds what C(2,2,2,7) supports as a batch code.
    let res = pirbatch(&["certify", "--code", &m, "--mode", "batch", "--k", "3", "--limit", "0", "--samples", "20"]);
    assert_eq!(res.status.code(), Some(1));

    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"family\": \"multiplicity\", \"m\": 2").unwrap();
    let res = pirbatch(&["certify", "--code", &bad, "--mode", "pir"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("malformed descriptor"));
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let (m, _) = build(&dir, "m.json", &["multiplicity", "--m", "2", "--d", "4", "--s", "2", "--q", "11"]);
    let run = |tag: &str, seed: &str| {
        let (report, summary) = (path(&dir, &format!("{tag}.csv")), path(&dir, &format!("{tag}.json")));
        let args = [
            "certify",
            "--code",
            &m,
            "--mode",
            "batch",
            "--k",
            "2",
            "--limit",
            "0",
            "--samples",
            "300",
            "--seed",
            seed,
            "--report",
            &report,
            "--summary",
            &summary,
            "--jobs",
            "3",
        ];
        assert_eq!(pirbatch(&args).status.code(), Some(0));
        (std::fs::read(report).unwrap(), std::fs::read(summary).unwrap())
    };
    let first = run("a", "11");
    assert_eq!(first, run("b", "11"));
    assert_ne!(first.0, run("c", "12").0);
    assert!(String::from_utf8(first.1).unwrap().contains("\"seed\": 11"));
}

#[test]
fn curves_csv() {
    let res = pirbatch(&["curves", "pir-binary", "--step", "0.1"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.starts_with("epsilon,delta,series"));
    assert!(text.lines().any(|l| l == "0.000000,0.833333,delta_s,3,0,5/6"), "{text}");
    let batch = String::from_utf8(pirbatch(&["curves", "batch", "--step", "0.05"]).stdout).unwrap();
    assert!(batch.lines().any(|l| l == "0.200000,0.900000,delta_min,,1/5,9/10"));
    assert!(batch.lines().any(|l| l == "0.250000,0.500000,lower_bound,,1/4,1/2"));
    assert_eq!(pirbatch(&["curves", "batch", "--step", "0"]).status.code(), Some(2));
}

#[test]
fn roundtrip_encode_recover() {
    let dir = TempDir::new().unwrap();
    let (m, _) = build(&dir, "m.json", &["multiplicity", "--m", "2", "--d", "2", "--s", "2", "--q", "7"]);
    let (a, _) = build(&dir, "a.json", &["array", "--r", "5", "--p", "5", "--slopes", "0,1,2"]);
    for code in [&m, &a] {
        for extra in [&["--seed", "4"][..], &["--zero"][..]] {
            let mut args = vec!["roundtrip", "--code", code.as_str()];
            args.extend_from_slice(extra);
            let res = pirbatch(&args);
            assert!(res.status.success());
            assert!(String::from_utf8_lossy(&res.stdout).contains(" 0 mismatches"));
        }
    }
    let word = path(&dir, "w.txt");
    assert!(pirbatch(&["encode", "--code", &m, "--seed", "9", "-o", &word]).status.success());
    let entries: Vec<String> = std::fs::read_to_string(&word).unwrap().trim().split(',').map(String::from).collect();
    assert_eq!(entries.len(), 147);
    for set in ["0", "1", "2"] {
        let res = pirbatch(&["recover", "--code", &m, "--word", &word, "--target", "20", "--set", set]);
        assert!(res.status.success());
        assert_eq!(String::from_utf8(res.stdout).unwrap().trim(), entries[60..63].join(","));
    }
    assert!(Path::new(&word).exists());
}

#[test]
fn nested_descriptors() {
    let dir = TempDir::new().unwrap();
    let (base, _) = build(&dir, "b.json", &["multiplicity", "--m", "1", "--d", "1", "--s", "1", "--q", "4"]);
    let (bin, profile) = build(&dir, "bin.json", &["binary", "--base", &base]);
    assert!(profile.contains("N=4 n=2 k=1"), "{profile}");
    let (rep, _) = build(&dir, "rep.json", &["replicated", "--copies", "2", "--base", &bin]);
    assert_eq!(pirbatch(&["certify", "--code", &rep, "--mode", "pir"]).status.code(), Some(0));
    assert!(pirbatch(&["roundtrip", "--code", &rep]).status.success());
}
