//! HTTP service for interactive layout retrieval.
//!
//! Routes:
//!
//! | method | path | body / query |
//! |---|---|---|
//! | POST | `/api/retrieve` | `{"elements": [...], "k": 8}` |
//! | GET | `/api/heatmap` | `?mode=title\|text\|figure\|all[&raw=1]` |
//! | POST | `/api/heatmap/overlay` | `{"mode": "...", "elements": [...]}` |
//! | GET | `/api/slides/{id}` | |
//! | GET | `/api/slides/{id}/image` | |
//! | GET | `/api/stats` | |
//! | POST | `/api/reload` | re-reads the corpus file |
//!
//! All state lives in one immutable [`state::Snapshot`]; a reload builds a
//! new one and swaps it in, so every response reflects a single revision.

pub mod api;
pub mod config;
pub mod state;

use std::future::Future;
use std::sync::Arc;

use thiserror::Error;
use tokio::net::TcpListener;

pub use api::router;
pub use config::ServiceConfig;
pub use state::{AppState, Snapshot};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("corpus: {0}")]
    Corpus(#[from] shadowlayout_core::record::CorpusError),
    #[error(transparent)]
    Core(#[from] shadowlayout_core::Error),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: std::net::SocketAddr,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub async fn bind(state: &AppState) -> Result<TcpListener, ServiceError> {
    let addr = state.config().bind;
    TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Bind { addr, source })
}

/// Serves until `shutdown` resolves, then lets in-flight requests finish.
pub async fn serve(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}

/// Resolves on Ctrl-C or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
