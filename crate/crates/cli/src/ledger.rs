//! Append-only JSON-lines results ledger.
//!
//! Entries are appended, never rewritten; re-runs add new lines so results
//! stay diffable across tool versions.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;

pub const LEDGER_ENV: &str = "PDTLAB_LEDGER";

pub struct Ledger {
    path: Option<PathBuf>,
}

impl Ledger {
    /// Flag value wins over the environment; no path means no ledger.
    pub fn from_flag(flag: Option<PathBuf>) -> Self {
        let path = flag.or_else(|| std::env::var_os(LEDGER_ENV).map(PathBuf::from));
        Ledger { path }
    }

    pub fn append(&self, mut entry: serde_json::Value) -> std::io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        entry["ts"] = serde_json::json!(chrono::Utc::now().to_rfc3339());
        entry["tool_version"] = serde_json::json!(env!("CARGO_PKG_VERSION"));
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(file, "{entry}")
    }
}
