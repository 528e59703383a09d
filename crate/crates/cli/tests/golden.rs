//! Runs the binary on the shipped fixtures and compares stdout with the
//! files under `fixtures/golden`. Set `RELCRIS_BLESS=1` to rewrite them.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_relcris"))
        .current_dir(root())
        .args(args)
        .output()
        .expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap_or(-1))
}

fn golden(name: &str, args: &[&str], code: i32) -> String {
    let (stdout, status) = run(args);
    assert_eq!(status, code, "exit status of {args:?}\n{stdout}");
    let path = root().join("fixtures/golden").join(name);
    if std::env::var_os("RELCRIS_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &stdout).unwrap();
    } else {
        let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        assert_eq!(stdout, want, "output of {args:?} differs from {}", path.display());
    }
    stdout
}

#[test]
fn counterexample_commands() {
    let f = "fixtures/counterexample.json";
    golden("counterexample.validate.txt", &["validate", f], 0);
    let h = golden("counterexample.hodge.txt", &["hodge", f], 0);
    assert!(h.starts_with("t_H = 1 (mod p^"));
    let n = golden("counterexample.newton.txt", &["newton", f], 0);
    assert!(n.contains("t_N(closed) = 1") && n.contains("t_N(generic) = 1"));
    let w = golden("counterexample.weakadm.txt", &["weakadm", f], 0);
    assert!(w.contains("\npunctually weakly admissible (mod"));
    let l = golden("counterexample.lattice.txt", &["lattice", f], 0);
    let verdicts: Vec<&str> = l.lines().filter(|s| s.trim_end().ends_with("divisible")).map(str::trim).collect();
    assert_eq!(verdicts, ["strongly divisible", "strongly divisible", "not strongly divisible"]);
    let r = golden("counterexample.bpair-rank.txt", &["bpair-rank", f], 0);
    assert!(r.contains("rank V_cris = 1 (mod"));
    let c = golden("counterexample.classify.txt", &["classify", f], 0);
    assert!(c.contains("WEAKLY_ADMISSIBLE_NON_ADMISSIBLE (mod"));
}

#[test]
fn auto_mode_on_the_counterexample() {
    let (out, code) = run(&["weakadm", "--auto", "fixtures/counterexample.json"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("mode: auto"), "{out}");
    assert!(out.contains("\npunctually weakly admissible"));
}

#[test]
fn classify_each_fixture() {
    for (name, verdict) in [
        ("admissible", "ADMISSIBLE_MIXED"),
        ("etale", "ETALE"),
        ("multiplicative", "MULTIPLICATIVE"),
        ("fil1_e2", "NOT_WEAKLY_ADMISSIBLE"),
    ] {
        let file = format!("fixtures/{name}.json");
        let out = golden(&format!("{name}.classify.txt"), &["classify", &file], 0);
        let last = out.lines().last().unwrap();
        assert!(last.starts_with(&format!("{verdict} (mod p^")), "{name}: {out}");
    }
}

#[test]
fn hodge_of_etale_is_two() {
    let (out, code) = run(&["hodge", "fixtures/etale.json"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t_H = 2 "), "{out}");
}

#[test]
fn non_invertible_frobenius_is_rejected() {
    let out = golden("non_invertible.validate.txt", &["validate", "fixtures/non_invertible.json"], 1);
    assert!(out.contains("invalid: 1⊗φ isomorphism fails"), "{out}");
    // every other module command validates first
    let (out, code) = run(&["hodge", "fixtures/non_invertible.json"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("invalid module: 1⊗φ isomorphism"), "{out}");
}

#[test]
fn breuil_export() {
    let dir = std::env::temp_dir().join(format!("relcris-golden-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let dest = dir.join("breuil.json");
    let (out, code) = run(&["breuil", "fixtures/admissible.json", "--out", dest.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().filter(|l| l.contains(": ")).all(|l| l.contains(": pass")), "{out}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["e"], 1);
    assert_eq!(v["holds"], true);
    assert!(v["report"].as_array().unwrap().iter().all(|c| c["outcome"] == "pass"), "{v}");
    // no Breuil module for a non-admissible input
    let (_, code) = run(&["breuil", "fixtures/counterexample.json"]);
    assert_eq!(code, 1);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn batch_classification_is_deterministic() {
    let (a, code) = run(&["--json", "classify", "fixtures", "--jobs", "4"]);
    assert_eq!(code, 1, "non_invertible.json is in the batch");
    let (b, _) = run(&["--json", "classify", "fixtures", "--jobs", "1"]);
    assert_eq!(a, b);
    assert!(a.contains("\"WEAKLY_ADMISSIBLE_NON_ADMISSIBLE\""));
}

#[test]
fn parse_errors_name_the_field() {
    let dir = std::env::temp_dir().join(format!("relcris-parse-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    let text = fs::read_to_string(root().join("fixtures/etale.json")).unwrap().replace("\"rank\"", "\"rnak\"");
    fs::write(&bad, text).unwrap();
    let (out, code) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("module") && out.contains("rnak"), "{out}");
    fs::remove_dir_all(dir).ok();
}

#[test]
fn precision_flags_change_the_modulus() {
    let (out, code) = run(&["--prec-p", "20", "--prec-y", "10", "hodge", "fixtures/counterexample.json"]);
    assert_eq!(code, 0);
    assert!(out.contains("(mod p^20, Y^10,"), "{out}");
}
