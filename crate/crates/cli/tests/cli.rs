use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const PENGUIN: &str = "vocabulary V {\n    type Animal\n    fly(Animal)\n}\n\
theory T : V {\n    !x: fly(x).\n}\n\
structure S : V {\n    Animal = { penguin; eagle }\n    fly = { eagle }\n}\n";

fn kbide(args: &[&str], dir: &Path, stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_kbide"))
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn check_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ok.kb"), PENGUIN).unwrap();
    std::fs::write(dir.path().join("bad.kb"), "theory T : W { }\n").unwrap();
    assert!(kbide(&["check", "ok.kb"], dir.path(), "").status.success());
    let out = kbide(&["check", "bad.kb"], dir.path(), "");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("bad.kb:1:12: error: unknown vocabulary W"));
}

#[test]
fn infer_prints_core() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.kb"), PENGUIN).unwrap();
    let out = kbide(&["infer", "unsatcore", "-t", "T", "-s", "S", "p.kb"], dir.path(), "");
    assert!(out.status.success());
    let stdout = text(&out.stdout);
    assert!(stdout.starts_with("p.kb:6:5: core:"), "{stdout}");
    assert!(stdout.contains("[x = penguin]"));

    let out = kbide(&["infer", "propagate", "-t", "T", "-s", "S", "p.kb"], dir.path(), "");
    assert_eq!(text(&out.stdout), "inconsistent\n");
    let out = kbide(&["infer", "unsatcore", "-t", "Nope", "-s", "S", "p.kb"], dir.path(), "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_reads_stdin_and_exits_with_code() {
    let dir = tempfile::tempdir().unwrap();
    let src = "procedure main() {\n    n := ask(\"n? \")\n    print(\"got \" + n)\n    exit(3)\n}\n";
    std::fs::write(dir.path().join("m.kb"), src).unwrap();
    let out = kbide(&["run", "m.kb"], dir.path(), "five\n");
    assert_eq!(text(&out.stdout), "n? got five\n");
    assert_eq!(out.status.code(), Some(3));

    // end of input leaves the shell
    std::fs::write(dir.path().join("p.kb"), PENGUIN).unwrap();
    let out = kbide(&["run", "--shell", "p.kb"], dir.path(), "print(unsatcore(T, S))\n");
    assert!(out.status.success());
    assert!(text(&out.stdout).contains("sentence 1 [x=penguin]: !x: fly(x)."));
}

#[test]
fn run_stops_at_wall_limit() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("loop.kb"),
        "procedure main() {\n    while true { }\n}\n",
    )
    .unwrap();
    let out = kbide(&["run", "--wall-ms", "100", "loop.kb"], dir.path(), "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("stopped: wall limit"));
}

#[test]
fn fmt_check_and_write() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.kb");
    std::fs::write(&path, "theory T : V {\n!x: p(x).\n}\n").unwrap();
    let out = kbide(&["fmt", "--check", "f.kb"], dir.path(), "");
    assert_eq!(out.status.code(), Some(1));
    assert!(kbide(&["fmt", "--write", "f.kb"], dir.path(), "").status.success());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "theory T : V {\n    !x: p(x).\n}\n"
    );
    assert!(kbide(&["fmt", "--check", "f.kb"], dir.path(), "").status.success());
}
