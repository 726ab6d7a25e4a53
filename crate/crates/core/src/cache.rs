//! Content-addressed artifact cache keyed by instance parameters and the
//! schema version. Entries are written atomically; loads return raw bytes
//! and leave integrity checks to the artifact's own checksum.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::kernels::StepDistribution;
use crate::report::{sha256_hex, step_law_fingerprint, write_atomic};
use crate::SCHEMA_VERSION;

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "CYCLEMIX_CACHE_DIR";

/// Cache directory from the environment; `None` (caching disabled) when the
/// variable is unset or empty.
pub fn default_dir() -> Option<PathBuf> {
    match env::var(CACHE_DIR_ENV) {
        Ok(value) if !value.trim().is_empty() => Some(PathBuf::from(value)),
        _ => None,
    }
}

/// Content address for an artifact: SHA-256 over the artifact kind, the
/// schema version, and the identifying parts, all pipe-joined. Any change
/// to the parts or a schema bump yields a fresh key.
pub fn key_for(kind: &str, parts: &[&str]) -> String {
    let mut descriptor = format!("{kind}|v{SCHEMA_VERSION}");
    for part in parts {
        descriptor.push('|');
        descriptor.push_str(part);
    }
    sha256_hex(descriptor.as_bytes())
}

/// Content address for a spectrum artifact of the chain (n, k, p).
pub fn spectrum_key(n: u32, k: u32, p: &StepDistribution) -> String {
    key_for(
        "spectrum",
        &[
            &format!("n={n}"),
            &format!("k={k}"),
            &format!("p={}", step_law_fingerprint(p)),
        ],
    )
}

/// On-disk location of a cache entry.
pub fn entry_path(dir: &Path, kind: &str, key: &str) -> PathBuf {
    dir.join(format!("{kind}-{key}.artifact"))
}

/// Store an artifact under its content address, atomically.
pub fn store(dir: &Path, kind: &str, key: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = entry_path(dir, kind, key);
    write_atomic(&path, bytes)?;
    Ok(path)
}

/// Load an artifact's raw bytes; `None` when the entry does not exist or is
/// unreadable. Callers verify integrity via the artifact's embedded
/// checksum and recompute on failure.
pub fn load(dir: &Path, kind: &str, key: &str) -> Option<Vec<u8>> {
    fs::read(entry_path(dir, kind, key)).ok()
}
