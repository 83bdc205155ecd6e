//! Report envelope and atomic file writes. Reports are deterministic
//! for a fixed config and seed: no timestamps, sorted maps only.

use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Everything a report must carry besides its body: the seed, an echo
/// of the resolved config, and the library version.
pub fn envelope(seed: Option<u64>, config: Value, body: Value) -> Value {
    json!({
        "tool": "cslab",
        "version": version(),
        "seed": seed,
        "config": config,
        "body": body,
    })
}

/// Write via a temp file in the target directory plus rename, so a
/// crash never leaves a half-written report behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .with_context(|| format!("{} has no file name", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}
