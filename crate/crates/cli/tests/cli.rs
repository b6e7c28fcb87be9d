use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use turedo::formats::{emit_claim, emit_seed, ClaimFile};
use turedo::simcheck::half_letter;

fn turedo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turedo")).current_dir(dir).args(args).output().expect("spawn turedo")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = turedo(dir, args);
    assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    String::from_utf8(o.stdout).expect("utf-8")
}

fn spiral(dir: &Path) {
    ok(dir, &["zoo", "export", "spiral-xor", "--out", "s.json"]);
    ok(dir, &["zoo", "seed", "spiral-xor", "--out", "ss.json"]);
}

#[test]
fn run_writes_trace_and_final_state() {
    let d = TempDir::new().unwrap();
    spiral(d.path());
    ok(d.path(), &["run", "--spec", "s.json", "--seed", "ss.json", "--steps", "50", "--trace", "t.ndjson", "--final", "f.json"]);
    let trace = fs::read_to_string(d.path().join("t.ndjson")).unwrap();
    assert_eq!(trace.lines().count(), 51);
    let last: serde_json::Value = serde_json::from_str(trace.lines().last().unwrap()).unwrap();
    assert_eq!(last["steps"], 50);
    assert_eq!(last["blocked"], false);
    // resuming from the final state continues the same orbit
    let out = ok(d.path(), &["run", "--spec", "s.json", "--seed", "f.json", "--steps", "10"]);
    let whole = ok(d.path(), &["run", "--spec", "s.json", "--seed", "ss.json", "--steps", "60"]);
    let tail: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    let full: serde_json::Value = serde_json::from_str(whole.lines().last().unwrap()).unwrap();
    assert_eq!(tail["head"], full["head"]);
    assert_eq!(tail["state"], full["state"]);
}

#[test]
fn stdout_trace_is_deterministic() {
    let d = TempDir::new().unwrap();
    spiral(d.path());
    let a = ok(d.path(), &["run", "--spec", "s.json", "--seed", "ss.json", "--steps", "300"]);
    let b = ok(d.path(), &["run", "--spec", "s.json", "--seed", "ss.json", "--steps", "300"]);
    assert_eq!(a, b);
}

#[test]
fn exit_codes_for_bad_input() {
    let d = TempDir::new().unwrap();
    spiral(d.path());
    let o = turedo(d.path(), &["run", "--spec", "missing.json", "--seed", "ss.json", "--steps", "1"]);
    assert_eq!(code(&o), 2);
    fs::write(d.path().join("junk.json"), "{\"format\": 1, \"nope\": true}").unwrap();
    let o = turedo(d.path(), &["run", "--spec", "junk.json", "--seed", "ss.json", "--steps", "1"]);
    assert_eq!(code(&o), 2);
    let o = turedo(d.path(), &["zoo", "export", "comparator", "--out", "c.json", "--param", "bogus=1"]);
    assert_eq!(code(&o), 2);
    let o = turedo(d.path(), &["frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn validate_reports_errors_with_exit_three() {
    let d = TempDir::new().unwrap();
    spiral(d.path());
    let out = ok(d.path(), &["validate", "--spec", "s.json"]);
    assert!(out.contains("ok"));
    let mut spec: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("s.json")).unwrap()).unwrap();
    spec["radius"] = serde_json::json!(0);
    fs::write(d.path().join("bad.json"), spec.to_string()).unwrap();
    let o = turedo(d.path(), &["validate", "--spec", "bad.json"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn zoo_lists_all_machines() {
    let d = TempDir::new().unwrap();
    let out = ok(d.path(), &["zoo", "list"]);
    for name in ["spiral-xor", "comparator", "copy-and-move", "zigzag-copier"] {
        assert!(out.contains(name), "{name} missing");
    }
    for name in ["comparator", "copy-and-move", "zigzag-copier"] {
        ok(d.path(), &["zoo", "export", name, "--out", "x.json"]);
        ok(d.path(), &["validate", "--spec", "x.json"]);
    }
}

#[test]
fn copy_and_move_decides_from_the_cli() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["zoo", "export", "copy-and-move", "--out", "c.json"]);
    for (ap, want) in [("b", [5, -1]), ("c", [3, -1])] {
        ok(d.path(), &["zoo", "seed", "copy-and-move", "--out", "cs.json", "--param", "a=a,b,c", "--param", "i=1", "--param", &format!("a_prime={ap}")]);
        let out = ok(d.path(), &["run", "--spec", "c.json", "--seed", "cs.json", "--steps", "500"]);
        let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
        assert_eq!(last["blocked"], true);
        assert_eq!(last["head"], serde_json::json!(want));
    }
}

fn claim_dir(d: &Path, edit: impl FnOnce(&mut ClaimFile)) -> PathBuf {
    let claim = half_letter::claim();
    let mut f = ClaimFile::from_claim(&claim);
    edit(&mut f);
    fs::write(d.join("claim.json"), serde_json::to_string_pretty(&f).unwrap()).unwrap();
    let seeds = d.join("seeds");
    fs::create_dir_all(&seeds).unwrap();
    for (i, s) in half_letter::row_seeds(&claim.simulated, 3).iter().enumerate() {
        fs::write(seeds.join(format!("seed{i:03}.json")), emit_seed(&claim.simulated, s)).unwrap();
    }
    seeds
}

#[test]
fn check_sim_passes_a_true_claim() {
    let d = TempDir::new().unwrap();
    claim_dir(d.path(), |_| {});
    for mode in ["liberal", "fuzzless", "rigorous"] {
        ok(d.path(), &["check-sim", "--claim", "claim.json", "--seeds", "seeds", "--horizon", "12", "--mode", mode, "--report", "r.json"]);
        let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
        assert_eq!(r["semantics"], "claim-witness");
        assert_eq!(r["mode"], mode);
    }
    // the emitted claim text is accepted as is
    fs::write(d.path().join("claim2.json"), emit_claim(&half_letter::claim())).unwrap();
    ok(d.path(), &["check-sim", "--claim", "claim2.json", "--seeds", "seeds", "--horizon", "8", "--threads", "2"]);
}

#[test]
fn check_sim_reports_failure_and_setup_failure() {
    let d = TempDir::new().unwrap();
    claim_dir(d.path(), |f| f.k = 3);
    let o = turedo(d.path(), &["check-sim", "--claim", "claim.json", "--seeds", "seeds", "--horizon", "12", "--report", "r.json"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert!(r["seeds"].as_array().unwrap().iter().any(|s| s["verdict"] == "fail"));

    let d = TempDir::new().unwrap();
    claim_dir(d.path(), |f| {
        f.seed_encoder.letter_blocks.insert("a".into(), vec!["a2".into(), "a1".into()]);
    });
    let o = turedo(d.path(), &["check-sim", "--claim", "claim.json", "--seeds", "seeds", "--horizon", "12"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));

    let o = turedo(d.path(), &["check-sim", "--claim", "claim.json", "--seeds", "no-such-dir", "--horizon", "12"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn leakage_round_trip_and_tamper() {
    let d = TempDir::new().unwrap();
    spiral(d.path());
    fs::write(d.path().join("p.json"), r#"{"format":1,"spine":[[4,0]]}"#).unwrap();
    ok(d.path(), &["leakage", "record", "--spec", "s.json", "--seed", "ss.json", "--path", "p.json", "--steps", "300", "--out", "d.json"]);
    ok(d.path(), &["leakage", "reconstruct", "--spec", "s.json", "--description", "d.json", "--truth", "ss.json", "--out", "r.json"]);
    // a cells file works as the truth too
    ok(d.path(), &["leakage", "reconstruct", "--spec", "s.json", "--description", "d.json", "--truth", "r.json"]);

    let size: serde_json::Value =
        serde_json::from_str(&ok(d.path(), &["leakage", "size", "--spec", "s.json", "--description", "d.json", "--binary", "d.bin"]))
            .unwrap();
    let bits = size["bits"].as_u64().unwrap();
    assert_eq!(fs::metadata(d.path().join("d.bin")).unwrap().len(), bits.div_ceil(8));

    let mut desc: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("d.json")).unwrap()).unwrap();
    let ev = &mut desc["events"][3];
    ev["letter"] = serde_json::json!(if ev["letter"] == "0" { "1" } else { "0" });
    fs::write(d.path().join("bad.json"), desc.to_string()).unwrap();
    let o = turedo(d.path(), &["leakage", "reconstruct", "--spec", "s.json", "--description", "bad.json", "--truth", "ss.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("mismatch") || stderr(&o).contains("failed"), "{}", stderr(&o));
}

#[test]
fn render_svg_and_ascii() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["zoo", "export", "zigzag-copier", "--out", "z.json"]);
    ok(d.path(), &["zoo", "seed", "zigzag-copier", "--out", "zs.json", "--param", "u=1,0,0,1"]);
    let ascii = ok(d.path(), &["render", "--spec", "z.json", "--seed", "zs.json", "--steps", "100", "--ascii", "--svg", "z.svg", "--blocks", "2,2"]);
    assert!(ascii.contains('@'));
    let svg = fs::read_to_string(d.path().join("z.svg")).unwrap();
    assert!(svg.contains("<svg"));
    assert!(svg.contains("trajectory"));
    let o = turedo(d.path(), &["render", "--spec", "z.json", "--seed", "zs.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn confined_run_records_no_crossings() {
    let d = TempDir::new().unwrap();
    spiral(d.path());
    fs::write(d.path().join("far.json"), r#"{"format":1,"spine":[[40,0]]}"#).unwrap();
    ok(d.path(), &["leakage", "record", "--spec", "s.json", "--seed", "ss.json", "--path", "far.json", "--steps", "50", "--out", "d.json"]);
    let desc: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(desc["crossings"], 0);
    assert!(desc["events"].as_array().unwrap().is_empty());
}

#[test]
fn comparator_radius_follows_r() {
    let d = TempDir::new().unwrap();
    ok(d.path(), &["zoo", "export", "comparator", "--param", "r=2", "--out", "c.json"]);
    let spec: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(spec["radius"], 3);
}
