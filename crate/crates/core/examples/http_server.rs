//! Serves the workbench over HTTP for a directory of CSV files.
//!
//! cargo run --example http_server -- ./data 8080
//!
//! curl -X POST localhost:8080/sessions
//! curl -X POST localhost:8080/sessions/s1/messages -H 'content-type: application/json' \
//!      -d '{"text": "Find the importance of the features with the iris dataset."}'
//! curl 'localhost:8080/sessions/s1/events?after=0&wait_ms=5000'

use ml_workbench::server::serve;
use ml_workbench::session::WorkbenchConfig;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let data = args.next().unwrap_or_else(|| "data".into());
    let root = std::path::Path::new(&data).parent().unwrap_or(std::path::Path::new(".")).to_path_buf();
    let mut config = WorkbenchConfig::in_dir(&root);
    config.data_dir = data.into();
    if let Some(port) = args.next() {
        config.port = port.parse()?;
    }
    println!("listening on {}:{}", config.bind, config.port);
    serve(config).await?;
    Ok(())
}
