use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn typecyk(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_typecyk")).args(args).output().unwrap();
    (
        o.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(typecyk(&["--help"]).0, 0);
    let (code, out, _) = typecyk(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(typecyk(&["frobnicate"]).0, 2);
    let missing = "/nonexistent/nothing.treebank";
    let (code, _, err) = typecyk(&["induce", "--treebank", missing, "--out", "/tmp/unused.txt"]);
    assert_eq!(code, 2);
    assert!(err.contains(missing), "{err}");
}

#[test]
fn malformed_input_is_a_domain_failure() {
    let (code, _, err) = typecyk(&["parse", "--grammar", s(&fixture("trig.sig")), "sin", "x"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn induce_then_parse() {
    let dir = tempfile::tempdir().unwrap();
    let grammar = dir.path().join("g.txt");
    let (code, _, err) = typecyk(&["induce", "--treebank", s(&fixture("trig.treebank")), "--out", s(&grammar)]);
    assert_eq!(code, 0, "{err}");
    assert!(grammar.exists());

    let (code, out, err) = typecyk(&["parse", "--grammar", s(&grammar), "--root", "real", "sin", "x"]);
    assert_eq!(code, 0, "{err}");
    let first = out.lines().nth(1).unwrap();
    assert!(first.starts_with("1\t"), "{out}");
    assert!(first.ends_with("(real (fun[real,real] sin) (real x))"), "{out}");
}

#[test]
fn parse_without_tokens_fails_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let grammar = dir.path().join("g.txt");
    assert_eq!(typecyk(&["induce", "--treebank", s(&fixture("trig.treebank")), "--out", s(&grammar)]).0, 0);
    assert_eq!(typecyk(&["parse", "--grammar", s(&grammar)]).0, 2);
}

#[test]
fn typed_hook_requires_signature() {
    let dir = tempfile::tempdir().unwrap();
    let grammar = dir.path().join("g.txt");
    assert_eq!(typecyk(&["induce", "--treebank", s(&fixture("trig.treebank")), "--out", s(&grammar)]).0, 0);
    let (code, _, err) = typecyk(&["parse", "--grammar", s(&grammar), "--hook", "typed", "sin", "x"]);
    assert_eq!(code, 2);
    assert!(err.contains("signature"), "{err}");
}

#[test]
fn evaluate_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = typecyk(&[
        "evaluate",
        "--config",
        s(&fixture("trig_exp.json")),
        "--output-dir",
        s(dir.path()),
        "--jobs",
        "2",
    ]);
    assert_eq!(code, 0, "{err}");
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(json.starts_with('{') && json.contains("\"top1\""), "{json}");
    assert!(dir.path().join("report.txt").exists());
}
