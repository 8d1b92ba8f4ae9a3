use std::io::Write;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use puzzlers_service::config::ServerConfig;
use puzzlers_service::{router, SessionService};
use tracing_subscriber::EnvFilter;

fn write_snapshot(service: &SessionService, path: &std::path::Path) -> anyhow::Result<()> {
    let line = serde_json::json!({
        "taken_at": chrono::Utc::now(),
        "sessions": service.sessions(),
    });
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening snapshot file {}", path.display()))?;
    writeln!(file, "{line}")?;
    Ok(())
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();

    let config = ServerConfig::parse();
    let service = Arc::new(config.build()?);
    tracing::info!(
        puzzles = service.list_puzzles().len(),
        provider = if config.mock_script.is_some() { "mock" } else { "openai" },
        "starting on {}",
        config.bind
    );

    let listener = tokio::net::TcpListener::bind(&config.bind)
        .await
        .with_context(|| format!("binding {}", config.bind))?;
    axum::serve(listener, router(service.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;

    if let Some(path) = &config.snapshot {
        write_snapshot(&service, path)?;
        tracing::info!("wrote session snapshot to {}", path.display());
    }
    Ok(())
}
