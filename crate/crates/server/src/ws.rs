//! WebSocket transport for run sessions: one run per connection.

use std::sync::Arc;

use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use kbide_core::session::{spawn_run, RunHandle, RunMode, SourceFile};
use serde::Deserialize;

use crate::state::AppState;

/// Close codes used on the session socket.
pub mod close {
    pub const NORMAL: u16 = 1000;
    pub const PROTOCOL_ERROR: u16 = 1002;
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClientMessage {
    Start {
        mode: RunMode,
        files: Vec<SourceFile>,
        #[serde(default)]
        entry: Option<String>,
    },
    Stdin {
        data: String,
    },
    Click {
        x: u32,
        y: u32,
    },
    Kill,
}

pub async fn upgrade(ws: WebSocketUpgrade, State(state): State<Arc<AppState>>) -> Response {
    ws.max_message_size(state.config.max_body_bytes)
        .on_upgrade(move |socket| session(socket, state))
}

fn parse(msg: Message) -> Option<Result<ClientMessage, String>> {
    match msg {
        Message::Text(t) => Some(serde_json::from_str(t.as_str()).map_err(|e| format!("bad message: {e}"))),
        Message::Binary(_) => Some(Err("binary messages are not supported".into())),
        Message::Ping(_) | Message::Pong(_) | Message::Close(_) => None,
    }
}

async fn close_with(socket: &mut WebSocket, code: u16, reason: &str) {
    let frame = CloseFrame {
        code,
        reason: reason.into(),
    };
    let _ = socket.send(Message::Close(Some(frame))).await;
}

async fn session(mut socket: WebSocket, state: Arc<AppState>) {
    let (mode, files, entry) = loop {
        let msg = match socket.recv().await {
            Some(Ok(Message::Close(_))) | Some(Err(_)) | None => return,
            Some(Ok(m)) => m,
        };
        match parse(msg) {
            None => continue,
            Some(Ok(ClientMessage::Start { mode, files, entry })) => break (mode, files, entry),
            Some(Ok(_)) => return close_with(&mut socket, close::PROTOCOL_ERROR, "expected start").await,
            Some(Err(e)) => return close_with(&mut socket, close::PROTOCOL_ERROR, &e).await,
        }
    };

    let RunHandle { mut events, control } = spawn_run(files, mode, entry, state.config.limits);
    let id = state.sessions.insert(control.clone());
    let mut connected = true;
    loop {
        tokio::select! {
            event = events.recv() => {
                let Some(event) = event else { break };
                let last = event.is_exit();
                if connected {
                    let text = serde_json::to_string(&event).unwrap_or_default();
                    if socket.send(Message::Text(text.into())).await.is_err() {
                        connected = false;
                        control.kill();
                    }
                }
                if last {
                    break;
                }
            }
            msg = socket.recv(), if connected => {
                let msg = match msg {
                    Some(Ok(Message::Close(_))) | Some(Err(_)) | None => {
                        connected = false;
                        control.kill();
                        continue;
                    }
                    Some(Ok(m)) => m,
                };
                match parse(msg) {
                    None => {}
                    Some(Ok(ClientMessage::Stdin { data })) => control.send_input(data),
                    Some(Ok(ClientMessage::Click { x, y })) => control.send_click(x, y),
                    Some(Ok(ClientMessage::Kill)) => control.kill(),
                    Some(Ok(ClientMessage::Start { .. })) => {
                        close_with(&mut socket, close::PROTOCOL_ERROR, "run already started").await;
                        connected = false;
                        control.kill();
                    }
                    Some(Err(e)) => {
                        close_with(&mut socket, close::PROTOCOL_ERROR, &e).await;
                        connected = false;
                        control.kill();
                    }
                }
            }
        }
    }
    state.sessions.remove(&id);
    if connected {
        close_with(&mut socket, close::NORMAL, "exit").await;
    }
}
