use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use radpair::cli::run_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("radpair").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn yield_prints_closed_form_value() {
    let (code, out, _) = run(&["yield", "--preset", "fad-trp-1-1", "--theta-deg", "0"]);
    assert_eq!(code, 0);
    let value: f64 = out.split_whitespace().find_map(|w| w.parse().ok()).unwrap();
    let expected = radpair::yields::singlet_yield_closed(&radpair::config::preset("fad-trp-1-1").unwrap())
        .unwrap()
        .value;
    assert!((value - expected).abs() < 1e-11, "{out}");
}

#[test]
fn isotropic_override_gives_zero_sensitivity() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let (code, out, _) = run(&[
        "sensitivity", "--preset", "fad-trp-1-1", "--ax-mT", "0.5", "--ay-mT", "0.5", "--az-mT", "0.5", "--out", out_dir,
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("0.000000000000"), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["yield", "--preset", "fad-trp-1-1", "--bogus"]).0, 2);
    assert_eq!(run(&["no-such-verb"]).0, 2);
    assert_eq!(run(&["yield"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn invalid_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"radical_a": {"nuclei": [{"label": "X1", "ax_mT": 0.0, "ay_mT": 0.0, "az_mT": 1.0}]}, "radical_b": {}}"#).unwrap();
    let (code, _, err) = run(&["yield", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("X1"), "{err}");

    let (code, _, err) = run(&["yield", "--preset", "nope"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
}

#[test]
fn repeated_runs_write_identical_files_with_sidecars() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let d = dir.path().to_str().unwrap();
        let args = ["--preset", "fad-trp-1-1", "--theta-points", "7", "--out", d];
        assert_eq!(run(&[&["profile"][..], &args[..]].concat()).0, 0);
        assert_eq!(run(&[&["sweep-transverse", "--values-mT", "0,0.05"][..], &args[..]].concat()).0, 0);
        let coherence = ["coherence", "--preset", "fad-trp-1-1", "--time-points", "5", "--out", d];
        assert_eq!(run(&coherence).0, 0);
    }
    let first = snapshot(a.path());
    assert_eq!(first, snapshot(b.path()));

    let names: BTreeSet<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    let data: Vec<&str> = names.iter().copied().filter(|n| n.ends_with(".csv")).collect();
    assert!(data.len() >= 3);
    for csv in &data {
        let sidecar = format!("{}.meta.json", csv.trim_end_matches(".csv"));
        assert!(names.contains(sidecar.as_str()), "missing {sidecar}");
    }
    assert_eq!(names.len(), 2 * data.len());
    for (name, bytes) in &first {
        assert!(!bytes.contains(&b'\r'), "{name} has CR");
        if name.ends_with(".meta.json") {
            assert!(!String::from_utf8_lossy(bytes).contains("generated_unix_s\": 1"), "{name} stamped");
        }
    }
}

#[test]
fn stamp_flag_adds_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(run(&["profile", "--preset", "fad-trp-1-1", "--theta-points", "3", "--out", d, "--stamp"]).0, 0);
    let meta = fs::read_to_string(dir.path().join("yield_profile.meta.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&meta).unwrap();
    assert!(v["generated_unix_s"].as_u64().unwrap() > 1_600_000_000);
}

#[test]
fn validate_passes_on_smallest_preset() {
    let (code, out, err) = run(&["validate", "--preset", "fad-trp-1-1"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("PASS") && !out.contains("FAIL"), "{out}");
}

#[test]
fn presets_lists_and_shows() {
    let (code, out, _) = run(&["presets"]);
    assert_eq!(code, 0);
    for name in radpair::config::PRESET_NAMES {
        assert!(out.contains(name));
    }
    let (code, out, _) = run(&["presets", "--show", "fad-trp-3-3"]);
    assert_eq!(code, 0);
    let parsed = radpair::config::parse_config(&out).unwrap();
    assert_eq!(parsed, radpair::config::preset("fad-trp-3-3").unwrap());
}
