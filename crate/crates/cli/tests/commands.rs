use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn provrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_provrec"))
        .args(args)
        .env_remove("PROVREC_MAX_STEPS")
        .env_remove("PROVREC_MAX_TERM_SIZE")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn check(policy: &str, theory: &str, program: &str, proof: &str) -> i32 {
    code(&provrec(&["check", "--policy", policy, "--theory", theory, program, proof]))
}

#[test]
fn trivial_proof_policies() {
    let (p, pf) = (corpus("trivial.hg"), corpus("trivial.ndp"));
    assert_eq!(check("unrestricted", "arith", &p, &pf), 0);
    let out = provrec(&["--porcelain", "check", "--policy", "basic", &p, &pf]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("verdict rejected"), "{text}");
    assert!(text.contains("node n2"), "{text}");
    assert!(text.contains("reason eigenterm-policy-violation f(x)"), "{text}");
}

#[test]
fn eval_prints_the_value() {
    let out = provrec(&["eval", &corpus("add.hg"), "add", "2", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "5");
    let out = provrec(&["--porcelain", "eval", &corpus("arith.hg"), "mul", "3", "4"]);
    assert!(stdout(&out).lines().any(|l| l == "value 12"));
}

#[test]
fn eval_certificate_checks() {
    let dir = TempDir::new().unwrap();
    let cert = path(&dir, "add.cert");
    assert_eq!(code(&provrec(&["eval", &corpus("add.hg"), "add", "1", "2", "--cert", &cert])), 0);
    let out = provrec(&["check-cert", &corpus("add.hg"), &cert]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("add(S(0), S(S(0))) = S(S(S(0)))"), "{}", stdout(&out));
    assert_eq!(code(&provrec(&["check-cert", &corpus("trivial.hg"), &cert])), 1);
}

#[test]
fn eval_without_value() {
    let out = provrec(&["eval", &corpus("trivial.hg"), "f", "0", "--max-steps", "200", "--max-term-size", "8"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn relativize_guards_quantifiers() {
    let out = provrec(&["relativize", "forall x exists y f(x)=y"]);
    assert_eq!(code(&out), 0);
    // Quantifier scope extends to the right, so no parentheses are needed.
    assert_eq!(stdout(&out).trim(), "forall x N(x) -> exists y N(y) & f(x) = y");
}

#[test]
fn usage_errors_exit_two() {
    let (p, pf) = (corpus("trivial.hg"), corpus("trivial.ndp"));
    assert_eq!(code(&provrec(&["check", "--policy", "strict", &p, &pf])), 2);
    assert_eq!(code(&provrec(&["check", &p, "/nonexistent.ndp"])), 2);
    assert_eq!(code(&provrec(&["check", &pf, &p])), 2);
    assert_eq!(code(&provrec(&["relativize", "forall x"])), 2);
    assert_eq!(code(&provrec(&["eval", &p, "f", "0", "--max-steps", "0"])), 2);
    assert_eq!(code(&provrec(&["frobnicate"])), 2);
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_provrec"))
        .args(["eval", &corpus("add.hg"), "add", "2", "3"])
        .env("PROVREC_MAX_STEPS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn coherence_exit_codes() {
    let out = provrec(&["coherence", &corpus("inconsistent.hg"), "--max-steps", "1000"]);
    assert_eq!(code(&out), 1);
    let dir = TempDir::new().unwrap();
    let prog = path(&dir, "clash.hg");
    std::fs::write(&prog, "c() = 0.\nc() = S(0).\n").unwrap();
    let out = provrec(&["--porcelain", "coherence", &prog]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict incoherent"));
}

#[test]
fn inconsistency_proof_depends_on_policy() {
    let (p, pf) = (corpus("inconsistent.hg"), corpus("inconsistency.ndp"));
    assert_eq!(check("unrestricted", "arith", &p, &pf), 0);
    assert_eq!(check("pr", "arith", &p, &pf), 1);
    assert_eq!(check("basic", "arith", &p, &pf), 1);
}

#[test]
fn generated_totality_proof_rechecks() {
    let dir = TempDir::new().unwrap();
    let (pf, prog) = (path(&dir, "mul.ndp"), path(&dir, "mul.hg"));
    let out = provrec(&["gen-totality", &corpus("catalog.pr"), "mul", "-o", &pf, "--program-out", &prog]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("forall x forall y exists z mul(x, y) = z"));
    assert_eq!(check("basic", "arith", &prog, &pf), 0);

    let tr = path(&dir, "mul.intrinsic.ndp");
    assert_eq!(code(&provrec(&["translate", &prog, &pf, "--vars", "x,y", "-o", &tr])), 0);
    assert_eq!(check("unrestricted", "intrinsic", &prog, &tr), 0);
    assert_eq!(check("unrestricted", "arith", &prog, &tr), 1);
}

#[test]
fn lowered_proof_rechecks() {
    let dir = TempDir::new().unwrap();
    let input = corpus("lowering/lower_nested.ndp");
    let prog = corpus("arith.hg");
    assert_eq!(check("basic", "arith", &prog, &input), 1);
    let out = path(&dir, "low.ndp");
    assert_eq!(code(&provrec(&["lower", &input, "--program", &prog, "-o", &out])), 0);
    assert_eq!(check("basic", "arith", &prog, &out), 0);
    assert_eq!(code(&provrec(&["lower", &corpus("trivial.ndp"), "--program", &corpus("trivial.hg")])), 1);
}

#[test]
fn k_trick_outputs() {
    let dir = TempDir::new().unwrap();
    let (prog, pf) = (path(&dir, "k.hg"), path(&dir, "k.ndp"));
    let args = [
        "build-k",
        &corpus("toy.hg"),
        "g",
        "h",
        "f",
        "--g-proof",
        &corpus("toy_g.ndp"),
        "--h-proof",
        &corpus("toy_h.ndp"),
        "-o",
        &prog,
        "--proof-out",
        &pf,
    ];
    assert_eq!(code(&provrec(&args)), 0);
    assert_eq!(check("basic", "arith", &prog, &pf), 0);
    let out = provrec(&["eval", &prog, "f", "3"]);
    assert_eq!(stdout(&out).trim(), "4");
    assert_eq!(code(&provrec(&["build-k", &prog, "g", "h", "f"])), 2);
}

#[test]
fn pipeline_writes_checkable_stages() {
    let dir = TempDir::new().unwrap();
    let out = provrec(&["--porcelain", "pipeline", "--symbol", "add", "--symbol", "pred", "--out-dir", &path(&dir, "out")]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("pipeline ") && l.contains(" ok ")).count(), 2);
    let d = dir.path().join("out");
    let file = |name: &str| -> String { Path::new(&d).join(name).to_string_lossy().into_owned() };
    for sym in ["add", "pred"] {
        let prog = file(&format!("{sym}.hg"));
        assert_eq!(check("basic", "arith", &prog, &file(&format!("{sym}.totality.ndp"))), 0);
        assert_eq!(check("unrestricted", "intrinsic", &prog, &file(&format!("{sym}.intrinsic.ndp"))), 0);
        assert_eq!(check("unrestricted", "intrinsic", &prog, &file(&format!("{sym}.closure.ndp"))), 0);
    }
    assert_eq!(code(&provrec(&["pipeline", "--symbol", "nosuch"])), 1);
}
