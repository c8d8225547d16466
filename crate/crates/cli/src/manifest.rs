//! JSON run manifests, replaced atomically on every update.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Ok,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub master_seed: u64,
    pub config: Config,
    /// Seconds since the Unix epoch.
    pub started_unix_s: f64,
    pub finished_unix_s: Option<f64>,
    pub status: Status,
    pub error: Option<String>,
    pub outputs: Vec<PathBuf>,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn start(command: &str, master_seed: u64, config: &Config) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            args: std::env::args().collect(),
            master_seed,
            config: config.clone(),
            started_unix_s: now(),
            finished_unix_s: None,
            status: Status::Running,
            error: None,
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, outcome: Result<(), String>) {
        self.finished_unix_s = Some(now());
        match outcome {
            Ok(()) => self.status = Status::Ok,
            Err(e) => {
                self.status = Status::Failed;
                self.error = Some(e);
            }
        }
    }

    /// Writes to a sibling temporary file, then renames it over `path`.
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
        let mut file = fs::File::create(&tmp)?;
        file.write_all(json.as_bytes())?;
        file.write_all(b"\n")?;
        file.sync_all()?;
        drop(file);
        fs::rename(&tmp, path).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }
}
