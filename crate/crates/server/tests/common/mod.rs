#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use kbide_server::{router, AppState, DiskWorkspace, FsError, ServerConfig, WorkspaceFs, WorkspacePath};
use serde_json::Value;
use tokio::sync::oneshot;
use tokio_tungstenite::tungstenite::Message;

pub struct TestServer {
    pub base: String,
    pub addr: SocketAddr,
    pub state: Arc<AppState>,
    stop: Option<oneshot::Sender<()>>,
    task: Option<tokio::task::JoinHandle<()>>,
}

impl TestServer {
    pub async fn start(config: ServerConfig) -> TestServer {
        Self::with_state(AppState::new(config).unwrap()).await
    }

    pub async fn with_state(state: Arc<AppState>) -> TestServer {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr = listener.local_addr().unwrap();
        let (tx, rx) = oneshot::channel::<()>();
        let app = router(state.clone());
        let task = tokio::spawn(async move {
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await
                .unwrap();
        });
        TestServer {
            base: format!("http://{addr}"),
            addr,
            state,
            stop: Some(tx),
            task: Some(task),
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub fn ws_url(&self) -> String {
        format!("ws://{}/ws/session", self.addr)
    }

    /// Stop accepting and wait for the server task to end.
    pub async fn stop(mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.task.take() {
            t.abort();
            let _ = t.await;
        }
    }
}

/// Workspace wrapper that counts every call that could modify the disk.
pub struct RecordingFs {
    inner: DiskWorkspace,
    pub writes: AtomicUsize,
}

impl RecordingFs {
    pub fn new(inner: DiskWorkspace) -> Arc<Self> {
        Arc::new(RecordingFs {
            inner,
            writes: AtomicUsize::new(0),
        })
    }

    pub fn write_calls(&self) -> usize {
        self.writes.load(Ordering::SeqCst)
    }
}

impl WorkspaceFs for RecordingFs {
    fn list(&self) -> Result<Vec<String>, FsError> {
        self.inner.list()
    }

    fn read(&self, path: &WorkspacePath) -> Result<String, FsError> {
        self.inner.read(path)
    }

    fn write(&self, path: &WorkspacePath, content: &str) -> Result<(), FsError> {
        self.writes.fetch_add(1, Ordering::SeqCst);
        self.inner.write(path, content)
    }
}

/// Snapshot of every file under a directory, for before/after comparison.
pub fn snapshot(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .map(|e| {
            let bytes = if e.file_type().is_file() {
                std::fs::read(e.path()).unwrap()
            } else {
                Vec::new()
            };
            (e.path().display().to_string(), bytes)
        })
        .collect();
    out.sort();
    out
}

pub const PENGUIN: &str = "vocabulary V {\n    type Animal\n    fly(Animal)\n}\n\
theory T : V {\n    !x: fly(x).\n}\n\
structure S : V {\n    Animal = { penguin; eagle }\n    fly = { eagle }\n}\n";

/// Expected diagnostic: severity, line, col, end line, end col, and a
/// fragment of the message.
pub type Expected = (&'static str, u32, u32, u32, u32, &'static str);

/// Fixture files with diagnostic ranges worked out by counting characters.
pub fn check_fixtures() -> Vec<(&'static str, &'static str, Vec<Expected>)> {
    vec![
        (
            "missing_period.kb",
            "vocabulary V { type T p(T) }\ntheory A : V { !x: p(x) }\n",
            vec![("error", 2, 25, 2, 26, "expected '.'")],
        ),
        (
            "unknown_predicate.kb",
            "vocabulary V { type T p(T) }\ntheory A : V { !x: p(x) & q(x). }\n",
            vec![("error", 2, 27, 2, 28, "unknown predicate q")],
        ),
        (
            "arity.kb",
            "vocabulary V {\n    type T\n    p(T, T)\n}\ntheory A : V {\n    !x y: p(x, y) | p(x).\n}\n",
            vec![("error", 6, 21, 6, 24, "predicate p expects 2 arguments, got 1")],
        ),
        (
            "type_mismatch.kb",
            "vocabulary V { type A type B p(A) c : B }\ntheory T : V { p(c). }\n",
            vec![("error", 2, 18, 2, 19, "c has type B, but p expects A")],
        ),
        (
            "bad_element.kb",
            "vocabulary V { type Animal fly(Animal) }\ntheory T : V { !x: fly(x). }\n\
             structure S : V { Animal = { penguin; eagle } fly = { tweety } }\n",
            vec![("error", 3, 55, 3, 61, "element tweety is not in the domain of Animal")],
        ),
        (
            "unicode.kb",
            "vocabulary V { type T p(T) }\ntheory A : V { /* für alle */ !x: p(x) & qé(x). }\n",
            vec![("error", 2, 42, 2, 44, "unknown predicate qé")],
        ),
        (
            "unknown_vocabulary.kb",
            "theory T : W { }\n",
            vec![("error", 1, 12, 1, 13, "unknown vocabulary W")],
        ),
        (
            "unknown_command.kb",
            "procedure main() {\n    print(\"hi\")\n    system(\"rm -rf /\")\n}\n",
            vec![("error", 3, 5, 3, 11, "unknown command system")],
        ),
        (
            "unused.kb",
            "vocabulary V { type T p(T) q(T) }\ntheory A : V { !x: p(x). }\n",
            vec![("warning", 1, 28, 1, 29, "predicate q is declared but never used")],
        ),
        (
            "crlf.kb",
            "vocabulary V {\r\n    type T\r\n    p(T)\r\n}\r\ntheory A : V {\r\n    !x: p(x) => .\r\n}\r\n",
            vec![("error", 6, 17, 6, 18, "found '.'")],
        ),
    ]
}

/// Compare a `/api/check` diagnostics array against expectations.
pub fn diagnostics_match(actual: &serde_json::Value, expected: &[Expected]) -> Result<(), String> {
    let list = actual.as_array().ok_or("diagnostics is not an array")?;
    if list.len() != expected.len() {
        return Err(format!("expected {} diagnostics, got {list:?}", expected.len()));
    }
    for (d, &(sev, l, c, el, ec, msg)) in list.iter().zip(expected) {
        let r = &d["range"];
        let got = (
            d["severity"].as_str().unwrap_or(""),
            r["line"].as_u64().unwrap_or(0) as u32,
            r["col"].as_u64().unwrap_or(0) as u32,
            r["end_line"].as_u64().unwrap_or(0) as u32,
            r["end_col"].as_u64().unwrap_or(0) as u32,
        );
        let message = d["message"].as_str().unwrap_or("");
        if got != (sev, l, c, el, ec) || !message.contains(msg) {
            return Err(format!("expected {:?}, got {d}", (sev, l, c, el, ec, msg)));
        }
    }
    Ok(())
}

pub type Socket = tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

#[derive(Debug, PartialEq)]
pub enum Frame {
    Event(Value),
    Close(Option<u16>),
}

pub async fn connect(server: &TestServer) -> Socket {
    tokio_tungstenite::connect_async(server.ws_url()).await.unwrap().0
}

pub async fn send(ws: &mut Socket, msg: Value) {
    ws.send(Message::text(msg.to_string())).await.unwrap();
}

pub async fn next(ws: &mut Socket) -> Frame {
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(10), ws.next())
            .await
            .expect("socket stalled");
        match msg {
            Some(Ok(Message::Text(t))) => return Frame::Event(serde_json::from_str(t.as_str()).unwrap()),
            Some(Ok(Message::Close(frame))) => return Frame::Close(frame.map(|f| u16::from(f.code))),
            Some(Ok(_)) => continue,
            Some(Err(_)) | None => return Frame::Close(None),
        }
    }
}

/// Read events until `exit`, then expect the normal close.
pub async fn until_exit(ws: &mut Socket) -> Vec<Value> {
    let mut out = Vec::new();
    loop {
        match next(ws).await {
            Frame::Event(e) => {
                let done = e["type"] == "exit";
                out.push(e);
                if done {
                    assert_eq!(next(ws).await, Frame::Close(Some(1000)));
                    return out;
                }
            }
            Frame::Close(c) => panic!("closed early ({c:?}) after {out:?}"),
        }
    }
}
