use std::collections::VecDeque;
use std::thread;
use std::time::{Duration, Instant};

use kbide_core::session::{spawn_run, well_formed, RunHandle, RunMode, SessionEvent, SourceFile, VizCommand};
use kbide_core::{LimitKind, ResourceLimits};
use tokio::sync::mpsc::error::TryRecvError;

const PENGUIN: &str = "vocabulary V { type Animal fly(Animal) }\n\
theory T : V { !x: fly(x). }\n\
structure S : V { Animal = { penguin; eagle } fly = { eagle } }\n\
structure Open : V { Animal = { penguin; eagle } }\n";

fn limits(wall_ms: u64) -> ResourceLimits {
    ResourceLimits {
        wall_ms,
        ..ResourceLimits::online()
    }
}

fn start(src: &str, mode: RunMode, wall_ms: u64) -> RunHandle {
    spawn_run(vec![SourceFile::new("main.kb", src)], mode, None, limits(wall_ms))
}

/// Answer asks from `lines` and, after each grid flush, send one click from
/// `clicks`. Gives up after `timeout`.
fn drive(mut h: RunHandle, lines: &[&str], clicks: &[(u32, u32)], timeout: Duration) -> Vec<SessionEvent> {
    let mut lines: VecDeque<&str> = lines.iter().copied().collect();
    let mut clicks: VecDeque<(u32, u32)> = clicks.iter().copied().collect();
    let deadline = Instant::now() + timeout;
    let mut out = Vec::new();
    loop {
        match h.events.try_recv() {
            Ok(e) => {
                match &e {
                    SessionEvent::Ask { .. } => {
                        if let Some(l) = lines.pop_front() {
                            h.control.send_input(l);
                        }
                    }
                    SessionEvent::Viz { .. } => {
                        if let Some((x, y)) = clicks.pop_front() {
                            h.control.send_click(x, y);
                        }
                    }
                    _ => {}
                }
                let done = e.is_exit();
                out.push(e);
                if done {
                    return out;
                }
            }
            Err(TryRecvError::Empty) => {
                assert!(Instant::now() < deadline, "run did not finish: {out:?}");
                thread::sleep(Duration::from_millis(2));
            }
            Err(TryRecvError::Disconnected) => return out,
        }
    }
}

fn stdout(events: &[SessionEvent]) -> String {
    events
        .iter()
        .filter_map(|e| match e {
            SessionEvent::Stdout { data } => Some(data.as_str()),
            _ => None,
        })
        .collect()
}

fn stderr(events: &[SessionEvent]) -> String {
    events
        .iter()
        .filter_map(|e| match e {
            SessionEvent::Stderr { data } => Some(data.as_str()),
            _ => None,
        })
        .collect()
}

fn exit_code(events: &[SessionEvent]) -> i32 {
    match events.last() {
        Some(SessionEvent::Exit { code }) => *code,
        other => panic!("no exit event: {other:?}"),
    }
}

const SECOND: Duration = Duration::from_secs(1);
const LONG: Duration = Duration::from_secs(20);

#[test]
fn hello() {
    let ev = drive(
        start("procedure main() { print(\"hi\") }", RunMode::Main, 5000),
        &[],
        &[],
        LONG,
    );
    assert_eq!(
        ev,
        vec![
            SessionEvent::Stdout { data: "hi\n".into() },
            SessionEvent::Exit { code: 0 }
        ]
    );
}

#[test]
fn ask_then_print() {
    let src = "procedure main() { x := ask(\"name?\") print(x) }";
    let ev = drive(start(src, RunMode::Main, 5000), &["bob"], &[], LONG);
    assert_eq!(
        ev,
        vec![
            SessionEvent::Ask { prompt: "name?".into() },
            SessionEvent::Stdout { data: "bob\n".into() },
            SessionEvent::Exit { code: 0 }
        ]
    );
}

#[test]
fn asks_resolve_in_order_and_input_is_buffered() {
    let src = "procedure main() { a := ask(\"first\") b := ask(\"second\") print(a + \"/\" + b) }";
    let h = start(src, RunMode::Main, 5000);
    // both lines arrive before either ask is answered
    h.control.send_input("one");
    h.control.send_input("two");
    let ev = drive(h, &[], &[], LONG);
    assert_eq!(stdout(&ev), "one/two\n");
    assert_eq!(exit_code(&ev), 0);
}

#[test]
fn infinite_loop_hits_wall_limit() {
    let t = Instant::now();
    let ev = drive(
        start("procedure main() { while true { } }", RunMode::Main, 100),
        &[],
        &[],
        SECOND,
    );
    assert!(t.elapsed() < SECOND);
    assert_eq!(
        ev,
        vec![
            SessionEvent::Limit { kind: LimitKind::Wall },
            SessionEvent::Exit { code: 2 }
        ]
    );
}

#[test]
fn infinite_shell_loop_hits_wall_limit() {
    let t = Instant::now();
    let ev = drive(
        start("", RunMode::Shell, 100),
        &["n := 0; while true { n := n + 1 }"],
        &[],
        SECOND,
    );
    assert!(t.elapsed() < SECOND);
    assert!(well_formed(&ev));
    assert_eq!(ev[ev.len() - 2], SessionEvent::Limit { kind: LimitKind::Wall });
    assert_eq!(exit_code(&ev), 2);
}

#[test]
fn waiting_for_input_does_not_use_wall_time() {
    let src = "procedure main() { x := ask(\"?\") print(x) }";
    let h = start(src, RunMode::Main, 100);
    let control = h.control.clone();
    thread::spawn(move || {
        thread::sleep(Duration::from_millis(400));
        control.send_input("late");
    });
    let ev = drive(h, &[], &[], LONG);
    assert_eq!(stdout(&ev), "late\n");
    assert_eq!(exit_code(&ev), 0);
}

#[test]
fn kill_ends_run_promptly() {
    let h = start("procedure main() { while true { } }", RunMode::Main, u64::MAX);
    let control = h.control.clone();
    thread::sleep(Duration::from_millis(50));
    let t = Instant::now();
    control.kill();
    let ev = drive(h, &[], &[], SECOND);
    assert!(t.elapsed() < SECOND);
    assert_eq!(
        ev[ev.len() - 2],
        SessionEvent::Limit {
            kind: LimitKind::Killed
        }
    );
    assert_eq!(exit_code(&ev), 2);
    assert!(control.is_finished());
}

#[test]
fn kill_while_waiting_for_input() {
    let h = start("procedure main() { x := ask(\"?\") }", RunMode::Main, u64::MAX);
    let control = h.control.clone();
    thread::sleep(Duration::from_millis(50));
    control.kill();
    let ev = drive(h, &[], &[], SECOND);
    assert!(well_formed(&ev));
    assert_eq!(exit_code(&ev), 2);
}

#[test]
fn output_cap() {
    let mut l = limits(10_000);
    l.output_bytes_max = 1000;
    let h = spawn_run(
        vec![SourceFile::new(
            "m.kb",
            "procedure main() { while true { print(\"0123456789\") } }",
        )],
        RunMode::Main,
        None,
        l,
    );
    let ev = drive(h, &[], &[], LONG);
    assert!(stdout(&ev).len() <= 1000);
    assert_eq!(
        ev[ev.len() - 2],
        SessionEvent::Limit {
            kind: LimitKind::Output
        }
    );
    assert_eq!(exit_code(&ev), 2);
}

#[test]
fn lights_out_clicks() {
    let src = "procedure main() {\n\
        draw_grid(3, 3)\n\
        n := 0\n\
        while n < 2 {\n\
            x, y := onclick()\n\
            draw_cell(x, y, \"yellow\")\n\
            n := n + 1\n\
        }\n\
        print(\"done\")\n\
    }";
    let ev = drive(start(src, RunMode::Main, 5000), &[], &[(0, 1), (2, 2), (9, 9)], LONG);
    let viz: Vec<&Vec<VizCommand>> = ev
        .iter()
        .filter_map(|e| match e {
            SessionEvent::Viz { commands } => Some(commands),
            _ => None,
        })
        .collect();
    assert_eq!(viz[0], &vec![VizCommand::Grid { width: 3, height: 3 }]);
    assert_eq!(
        viz[1],
        &vec![VizCommand::Cell {
            x: 0,
            y: 1,
            color: "yellow".into()
        }]
    );
    assert_eq!(
        viz[2],
        &vec![VizCommand::Cell {
            x: 2,
            y: 2,
            color: "yellow".into()
        }]
    );
    assert_eq!(stdout(&ev), "done\n");
    assert_eq!(exit_code(&ev), 0);
}

#[test]
fn stray_click_is_dropped_with_warning() {
    let h = start("procedure main() { x := ask(\"?\") }", RunMode::Main, 5000);
    h.control.send_click(1, 1);
    let ev = drive(h, &["ok"], &[], LONG);
    assert!(stderr(&ev).contains("no grid"));
    assert_eq!(exit_code(&ev), 0);
}

#[test]
fn shell_unsatcore_and_modelexpand() {
    let ev = drive(
        start(PENGUIN, RunMode::Shell, 5000),
        &["unsatcore(T, S)", "modelexpand(T, Open)", "exit"],
        &[],
        LONG,
    );
    let out = stdout(&ev);
    assert!(out.contains("sentence 1 [x=penguin]: !x: fly(x)."), "{out}");
    assert!(!out.contains("x=eagle"));
    assert!(out.contains("model 1:\nstructure Open : V {"), "{out}");
    assert!(out.contains("fly = { penguin; eagle }"), "{out}");
    assert_eq!(exit_code(&ev), 0);
}

#[test]
fn shell_recovers_from_errors() {
    let ev = drive(
        start(PENGUIN, RunMode::Shell, 5000),
        &["nonsense(", "frobnicate(T)", "print(1 / 0)", "print(6 * 7)", "exit"],
        &[],
        LONG,
    );
    let err = stderr(&ev);
    assert!(err.contains("parse error in command"), "{err}");
    assert!(err.contains("unknown command frobnicate"), "{err}");
    assert!(err.contains("division by zero"), "{err}");
    assert_eq!(stdout(&ev), "42\n");
    assert_eq!(exit_code(&ev), 0);
}

#[test]
fn main_reports_diagnostics() {
    let ev = drive(start("procedure main() { print(", RunMode::Main, 5000), &[], &[], LONG);
    assert!(stderr(&ev).starts_with("main.kb:1:"), "{ev:?}");
    assert_eq!(exit_code(&ev), 1);
}

#[test]
fn runtime_error_exits_one() {
    let src = "procedure main() {\n    print(\"a\")\n    x := y\n}";
    let ev = drive(start(src, RunMode::Main, 5000), &[], &[], LONG);
    assert_eq!(stdout(&ev), "a\n");
    assert!(
        stderr(&ev).starts_with("main.kb:3:5: runtime error: unknown variable y"),
        "{ev:?}"
    );
    assert_eq!(exit_code(&ev), 1);
}

#[test]
fn explicit_exit_code_and_inference_in_procedure() {
    let src = format!(
        "{PENGUIN}procedure main() {{\n    c := unsatcore(T, S)\n    p := propagate(T, Open)\n    print(p)\n    exit(3)\n}}"
    );
    let ev = drive(start(&src, RunMode::Main, 5000), &[], &[], LONG);
    assert!(stdout(&ev).contains("fly = { penguin; eagle }"), "{ev:?}");
    assert_eq!(exit_code(&ev), 3);
}

#[test]
fn concurrent_runs_do_not_cross_talk() {
    let handles: Vec<(usize, RunHandle)> = (0..20)
        .map(|i| {
            let src = format!(
                "procedure main() {{ n := 0 while n < 50 {{ print(\"run{i} \" + n) n := n + 1 }} x := ask(\"run{i}?\") print(x) }}"
            );
            (i, start(&src, RunMode::Main, 10_000))
        })
        .collect();
    let workers: Vec<_> = handles
        .into_iter()
        .map(|(i, h)| {
            thread::spawn(move || {
                let answer = format!("answer{i}");
                let ev = drive(h, &[answer.as_str()], &[], LONG);
                (i, ev)
            })
        })
        .collect();
    for w in workers {
        let (i, ev) = w.join().unwrap();
        assert!(well_formed(&ev));
        let expected: String = (0..50)
            .map(|n| format!("run{i} {n}\n"))
            .chain([format!("answer{i}\n")])
            .collect();
        assert_eq!(stdout(&ev), expected);
        assert_eq!(exit_code(&ev), 0);
    }
}

#[test]
fn kill_during_solve() {
    // pigeonhole: 9 pigeons, 8 holes; far beyond what plain DPLL refutes quickly
    let src = "vocabulary V { type P type H in(P, H) }\n\
        theory T : V {\n\
            !p[P]: ?h[H]: in(p, h).\n\
            !p[P] q[P] h[H]: in(p, h) & in(q, h) => p = q.\n\
        }\n\
        structure S : V { P = { p1; p2; p3; p4; p5; p6; p7; p8; p9 } H = { h1; h2; h3; h4; h5; h6; h7; h8 } }\n\
        procedure main() { print(modelexpand(T, S)) }";
    let mut l = limits(u64::MAX);
    l.max_decisions = u64::MAX;
    let h = spawn_run(vec![SourceFile::new("m.kb", src)], RunMode::Main, None, l);
    let control = h.control.clone();
    thread::sleep(Duration::from_millis(300));
    assert!(
        !control.is_finished(),
        "solver finished too early for this test to mean anything"
    );
    let t = Instant::now();
    control.kill();
    let ev = drive(h, &[], &[], SECOND);
    assert!(t.elapsed() < SECOND);
    assert_eq!(
        ev[ev.len() - 2],
        SessionEvent::Limit {
            kind: LimitKind::Killed
        }
    );
    assert_eq!(exit_code(&ev), 2);
}
