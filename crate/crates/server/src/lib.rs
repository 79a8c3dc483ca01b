//! HTTP and WebSocket server for the knowledge-base IDE.

pub mod api;
pub mod config;
pub mod share;
pub mod state;
pub mod tutorials;
pub mod workspace;
pub mod ws;

use std::future::Future;
use std::net::SocketAddr;

pub use api::router;
pub use config::{Mode, ServerConfig, ShareBackendConfig};
pub use state::{AppState, StartError};
pub use workspace::{DiskWorkspace, FsError, WorkspaceFs, WorkspacePath};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Start(#[from] StartError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Validate the config, bind and serve until `shutdown` resolves.
pub async fn serve(
    config: ServerConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    config.validate()?;
    let addr = SocketAddr::new(config.bind_addr(), config.port);
    let state = AppState::new(config)?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    tracing::info!("listening on http://{addr}");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}
