//! HTTP API for elicitation sessions.
//!
//! Models and sessions live in a data directory as `.ucm` and session JSON
//! files, so the CLI can read and write the same data. Mutations on one
//! session are serialized and persisted before the response is sent.

pub mod api;
pub mod error;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use api::router;
pub use error::ApiError;
pub use store::{Store, StoredModel};

/// Environment variable that, when set, replaces the `--data` directory.
pub const DATA_DIR_ENV: &str = "NFR_DATA_DIR";

pub fn resolve_data_dir(flag: Option<PathBuf>) -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .or(flag)
        .unwrap_or_else(|| PathBuf::from("nfr-data"))
}

pub async fn serve(addr: SocketAddr, data_dir: PathBuf) -> std::io::Result<()> {
    let store = Arc::new(Store::open(&data_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, data = %data_dir.display(), "listening");
    axum::serve(listener, router(store)).await
}
