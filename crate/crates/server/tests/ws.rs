mod common;

use std::time::{Duration, Instant};

use common::*;
use futures::SinkExt;
use kbide_server::{Mode, ServerConfig};
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

fn start(mode: &str, source: &str) -> Value {
    json!({ "type": "start", "mode": mode, "files": [{ "name": "main.kb", "content": source }] })
}

fn stdout(events: &[Value]) -> String {
    events
        .iter()
        .filter(|e| e["type"] == "stdout")
        .map(|e| e["data"].as_str().unwrap())
        .collect()
}

async fn local_server() -> (tempfile::TempDir, TestServer) {
    let dir = tempfile::tempdir().unwrap();
    let server = TestServer::start(ServerConfig::new(dir.path(), Mode::Local)).await;
    (dir, server)
}

#[tokio::test]
async fn ask_and_print() {
    let (_dir, server) = local_server().await;
    let mut ws = connect(&server).await;
    send(
        &mut ws,
        start(
            "main",
            "procedure main() { name := ask(\"who? \")\n print(\"hi \" + name) }",
        ),
    )
    .await;
    assert_eq!(
        next(&mut ws).await,
        Frame::Event(json!({ "type": "ask", "prompt": "who? " }))
    );
    send(&mut ws, json!({ "type": "stdin", "data": "ada" })).await;
    let events = until_exit(&mut ws).await;
    assert_eq!(stdout(&events), "hi ada\n");
    assert_eq!(events.last().unwrap(), &json!({ "type": "exit", "code": 0 }));
    server.stop().await;
}

#[tokio::test]
async fn shell_over_socket() {
    let (_dir, server) = local_server().await;
    let mut ws = connect(&server).await;
    send(&mut ws, start("shell", PENGUIN)).await;
    assert_eq!(
        next(&mut ws).await,
        Frame::Event(json!({ "type": "ask", "prompt": "> " }))
    );
    send(&mut ws, json!({ "type": "stdin", "data": "print(unsatcore(T, S))" })).await;
    let mut out = String::new();
    loop {
        match next(&mut ws).await {
            Frame::Event(e) if e["type"] == "stdout" => out.push_str(e["data"].as_str().unwrap()),
            Frame::Event(e) if e["type"] == "ask" => break,
            other => panic!("unexpected {other:?}"),
        }
    }
    assert!(out.contains("[x=penguin]"), "{out}");
    send(&mut ws, json!({ "type": "stdin", "data": "exit" })).await;
    let events = until_exit(&mut ws).await;
    assert_eq!(events.last().unwrap()["code"], 0);
    server.stop().await;
}

#[tokio::test]
async fn protocol_errors_close_with_1002() {
    let (_dir, server) = local_server().await;

    let mut ws = connect(&server).await;
    send(&mut ws, json!({ "type": "stdin", "data": "x" })).await;
    assert_eq!(next(&mut ws).await, Frame::Close(Some(1002)));

    let mut ws = connect(&server).await;
    ws.send(Message::text("{nonsense")).await.unwrap();
    assert_eq!(next(&mut ws).await, Frame::Close(Some(1002)));

    let mut ws = connect(&server).await;
    send(&mut ws, start("shell", "")).await;
    assert_eq!(
        next(&mut ws).await,
        Frame::Event(json!({ "type": "ask", "prompt": "> " }))
    );
    send(&mut ws, start("shell", "")).await;
    assert_eq!(next(&mut ws).await, Frame::Close(Some(1002)));
    wait_idle(&server).await;
    server.stop().await;
}

async fn wait_idle(server: &TestServer) {
    let deadline = Instant::now() + Duration::from_secs(5);
    while server.state.sessions.active_count() > 0 {
        assert!(Instant::now() < deadline, "runs still registered");
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
}

#[tokio::test]
async fn disconnect_kills_the_run() {
    let (_dir, server) = local_server().await;
    let mut ws = connect(&server).await;
    send(
        &mut ws,
        start("main", "procedure main() { n := 0\n while true { n := n + 1 } }"),
    )
    .await;
    tokio::time::sleep(Duration::from_millis(100)).await;
    assert_eq!(server.state.sessions.active_count(), 1);
    drop(ws);
    wait_idle(&server).await;
    server.stop().await;
}

#[tokio::test]
async fn kill_and_wall_limit() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ServerConfig::new(dir.path(), Mode::Local);
    config.limits.wall_ms = 100;
    let server = TestServer::start(config).await;

    let mut ws = connect(&server).await;
    let t = Instant::now();
    send(&mut ws, start("shell", "")).await;
    next(&mut ws).await;
    send(
        &mut ws,
        json!({ "type": "stdin", "data": "n := 0; while true { n := n + 1 }" }),
    )
    .await;
    let events = until_exit(&mut ws).await;
    assert!(t.elapsed() < Duration::from_secs(1));
    let n = events.len();
    assert_eq!(events[n - 2], json!({ "type": "limit", "kind": "wall" }));
    assert_eq!(events[n - 1], json!({ "type": "exit", "code": 2 }));

    let mut ws = connect(&server).await;
    send(&mut ws, start("shell", "")).await;
    next(&mut ws).await;
    send(&mut ws, json!({ "type": "kill" })).await;
    let events = until_exit(&mut ws).await;
    assert!(events.contains(&json!({ "type": "limit", "kind": "killed" })));
    server.stop().await;
}

#[tokio::test]
async fn lights_out_tutorial_over_socket() {
    let (_dir, server) = local_server().await;
    let resp = reqwest::get(server.url("/api/tutorials/lights-out")).await.unwrap();
    let body: Value = resp.json().await.unwrap();
    let files: Vec<Value> = body["files"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(name, content)| json!({ "name": name, "content": content }))
        .collect();
    let mut ws = connect(&server).await;
    send(&mut ws, json!({ "type": "start", "mode": "main", "files": files })).await;
    // clicks are only accepted once a grid exists
    loop {
        match next(&mut ws).await {
            Frame::Event(e) if e["type"] == "viz" => {
                if e["commands"].as_array().unwrap().iter().any(|c| c["type"] == "grid") {
                    break;
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }
    send(&mut ws, json!({ "type": "click", "x": 1, "y": 1 })).await;
    let events = until_exit(&mut ws).await;
    assert!(stdout(&events).contains("solved in 1 moves"), "{events:?}");
    server.stop().await;
}

#[tokio::test]
async fn twenty_concurrent_sockets() {
    let (_dir, server) = local_server().await;
    let mut tasks = Vec::new();
    for i in 0..20 {
        let mut ws = connect(&server).await;
        tasks.push(tokio::spawn(async move {
            let src = format!(
                "procedure main() {{ a := ask(\"\")\n i := 0\n while i < 50 {{ print(a + \"-{i}\")\n i := i + 1 }} }}"
            );
            send(&mut ws, start("main", &src)).await;
            assert_eq!(
                next(&mut ws).await,
                Frame::Event(json!({ "type": "ask", "prompt": "" }))
            );
            send(&mut ws, json!({ "type": "stdin", "data": format!("s{i}") })).await;
            let out = stdout(&until_exit(&mut ws).await);
            let expected: String = (0..50).map(|_| format!("s{i}-{i}\n")).collect();
            assert_eq!(out, expected);
        }));
    }
    for t in tasks {
        t.await.unwrap();
    }
    wait_idle(&server).await;
    server.stop().await;
}

#[tokio::test]
async fn oversized_message_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ServerConfig::new(dir.path(), Mode::Local);
    config.max_body_bytes = 4096;
    let server = TestServer::start(config).await;
    let mut ws = connect(&server).await;
    let _ = ws
        .send(Message::text(start("main", &"x".repeat(8192)).to_string()))
        .await;
    assert!(matches!(next(&mut ws).await, Frame::Close(_)));
    assert_eq!(server.state.sessions.active_count(), 0);
    server.stop().await;
}
