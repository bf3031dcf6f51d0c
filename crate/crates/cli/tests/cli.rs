use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

const F1: &str = "s:u0 b:u0 a:beta a:gamma a:delta a:epsilon a:kappa b:v0";
const F2: &str =
    "s:u0 b:u0 a:beta a:gamma a:lambda eta1:v1 eta2:v1 a:lambda a:delta a:epsilon a:kappa b:v0";
const F3: &str = "s:u0 b:u0 a:beta a:gamma a:lambda eta1:v1 eta2:v1 eta1:v1 eta2:v1 a:lambda a:delta a:epsilon a:kappa b:v0";
const F4: &str =
    "s:u0 b:u0 a:beta a:gamma a:lambda eta2:v1 eta1:v1 a:lambda a:delta a:epsilon a:kappa b:v0";
const GENERATOR: &str = "s:u0 b:u0 a:beta a:gamma a:lambda eta1:v1 eta2:v1 a:lambda a:gamma a:beta b:u0";

fn annulus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/annulus.json")
}

fn kinkfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinkfree"))
        .args(args)
        .env_remove("KINK_SEED")
        .output()
        .expect("binary runs")
}

fn on_annulus(cmd: &str, rest: &[&str]) -> Output {
    let path = annulus();
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(rest);
    kinkfree(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn validate_accepts_annulus() {
    let o = on_annulus("validate", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn validate_reports_overused_arc() {
    let doc = r#"{"arcs": ["x"], "boundary_segments": ["a", "b", "c", "d"],
        "triangles": [
          {"name": "T1", "sides": ["x", "bd:a", "bd:b"]},
          {"name": "T2", "sides": ["x", "bd:c", "x"]},
          {"name": "T3", "sides": ["bd:d", "x", "bd:a"]}
        ]}"#;
    let f = temp_file(doc);
    let o = kinkfree(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    let first: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert!(err.contains("\"arc\":\"x\""), "{err}");
    assert!(first.get("kind").is_some());
}

#[test]
fn validate_rejects_malformed_json() {
    let f = temp_file("{ not json");
    let o = kinkfree(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn signs_and_kinks() {
    assert_eq!(stdout(&on_annulus("signs", &[F1])).trim(), "+----+");
    assert_eq!(stdout(&on_annulus("signs", &[F4])).trim(), "+-+-+-+--+");
    assert_eq!(stdout(&on_annulus("kinks", &[F2])), "");
    let out = stdout(&on_annulus("kinks", &[F3]));
    let k: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(k["j"], 4);
    assert_eq!(k["m"], 9);
    assert_eq!(k["multiplicity"], 2);
    assert_eq!(k["triangle"], "v1");
}

#[test]
fn normalize_examples() {
    let o = on_annulus("normalize", &[F4]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), F2);
    assert_eq!(stdout(&on_annulus("normalize", &[F2])).trim(), F2);

    let o = on_annulus("normalize", &[F3, "--trace", "--orbifold-check"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let step: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(step["multiplicity"], 2);
    assert_eq!(lines[1], F1);
}

#[test]
fn normalize_random_strategy_is_seeded() {
    let a = on_annulus("normalize", &[F3, "--strategy", "random", "--seed", "9"]);
    assert_eq!(stdout(&a).trim(), F1);
    assert!(stderr(&a).contains("ChaCha8"));
    let b = Command::new(env!("CARGO_BIN_EXE_kinkfree"))
        .args(["normalize", annulus().to_str().unwrap(), F3, "--strategy", "random"])
        .env("KINK_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stderr(&b).contains("seed 9"));
}

#[test]
fn normalize_order_two_loop() {
    let o = on_annulus("normalize", &[GENERATOR, "--iota-strict"]);
    assert_eq!(code(&o), 3);
    let o = on_annulus("normalize", &[GENERATOR]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("# order-two class"));
    assert_eq!(out.lines().last().unwrap(), GENERATOR);
}

#[test]
fn normalize_closed_walks() {
    let square = "t:v1 eta1:v1 eta2:v1 eta1:v1 eta2:v1";
    let o = on_annulus("normalize", &[square, "--closed"]);
    assert_eq!(stdout(&o).trim(), "contractible");
}

#[test]
fn normalize_stdin_keeps_input_order() {
    let path = annulus();
    let mut child = Command::new(env!("CARGO_BIN_EXE_kinkfree"))
        .args(["normalize", path.to_str().unwrap(), "--stdin", "--jobs", "3"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let input = format!("{F3}\n{F4}\n\n# comment\n{F2}\n{F1}\n");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), format!("{F1}\n{F2}\n{F2}\n{F1}\n"));
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(code(&on_annulus("signs", &["s:u0 b:nope"])), 2);
    assert_eq!(code(&on_annulus("normalize", &["s:u0 a:kappa"])), 2);
    assert_eq!(code(&kinkfree(&["normalize", "/nonexistent/file.json", F1])), 2);
}

#[test]
fn equal_exit_codes() {
    assert_eq!(code(&on_annulus("equal", &[F3, F1, "--orbifold"])), 0);
    assert_eq!(code(&on_annulus("equal", &[F4, F2, "--orbifold"])), 0);
    assert_eq!(code(&on_annulus("equal", &[F3, F1])), 1);
    assert_eq!(code(&on_annulus("equal", &[F1, F2, "--orbifold"])), 1);
    let o = on_annulus("equal", &[F1, GENERATOR, "--orbifold"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("endpoint mismatch"));
}

#[test]
fn order2() {
    assert_eq!(stdout(&on_annulus("order2", &[GENERATOR])).trim(), "true");
    assert_eq!(code(&on_annulus("order2", &[F1])), 1);
}

#[test]
fn flip_and_transport_round_trip() {
    let o = on_annulus("flip", &["--move", "standard:delta"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let flipped = temp_file(&stdout(&o));
    let v = kinkfree(&["validate", flipped.path().to_str().unwrap()]);
    assert_eq!(code(&v), 0);

    let script = temp_file(r#"[{"kind": "standard", "target": "delta"}, {"kind": "double", "target": "v1"}]"#);
    let o = on_annulus("transport", &[F3, "--script", script.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("s:u0 b:u0 "));

    let o = on_annulus("transport", &[F3, "--move", "standard:delta"]);
    let there = stdout(&o);
    let o = kinkfree(&["kinks", flipped.path().to_str().unwrap(), there.trim()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(!stdout(&o).is_empty(), "kink presence survives the flip");

    assert_eq!(code(&on_annulus("flip", &["--move", "standard:rho1"])), 1);
    assert_eq!(code(&on_annulus("flip", &["--move", "standard:nowhere"])), 2);
    assert_eq!(code(&on_annulus("flip", &["--move", "sideways:delta"])), 2);
}

#[test]
fn dot_output() {
    let o = on_annulus("dot", &["--walk", F3]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("graph \"annulus\" {"));
    assert!(out.contains("// rotation at w:v1: eta1:v1 leaf:v1 eta2:v1"));
    assert!(out.contains("style=bold"));
    let plain = stdout(&on_annulus("dot", &["--plain"]));
    assert!(!plain.contains("leaf:"));
}

#[test]
fn selftest_runs_and_detects_faults() {
    let o = kinkfree(&["selftest", "--cases", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 suites run"));

    let o = kinkfree(&["selftest", "--seed", "42", "--cases", "60", "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# rng ChaCha8, seed 42, cases 60"));
    assert!(out.contains("PASS confluence"));

    let o = kinkfree(&["selftest", "--cases", "60", "--inject-fault", "skip-sign-condition"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    let dump = out.lines().find_map(|l| l.strip_prefix("counterexample: ")).unwrap();
    let c: serde_json::Value = serde_json::from_str(dump).unwrap();
    assert!(c["triangulation"]["triangles"].is_array());
    assert!(c["walks"].is_array());
    assert!(c["strategy_seeds"].is_array());
}

#[test]
fn selftest_is_deterministic() {
    let a = stdout(&kinkfree(&["selftest", "--seed", "5", "--cases", "40"]));
    let b = stdout(&kinkfree(&["selftest", "--seed", "5", "--cases", "40", "--jobs", "3"]));
    assert_eq!(a, b);
}
