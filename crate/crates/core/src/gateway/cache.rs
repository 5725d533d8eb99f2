//! Persistent response cache: one JSON file per completion, keyed by a
//! digest of the request. Interrupted runs resume without re-billing.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Hex digest identifying one completion request.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn as_hex(&self) -> &str {
        &self.0
    }
}

/// Key over (model name, temperature, full prompt, attempt index). The
/// attempt index distinguishes repeated draws for majority voting and
/// re-parses.
pub fn response_key(model: &str, temperature: f64, prompt: &str, attempt: u32) -> CacheKey {
    let mut hasher = Sha256::new();
    for field in [model.as_bytes(), &temperature.to_bits().to_le_bytes()[..], prompt.as_bytes(), &attempt.to_le_bytes()[..]] {
        hasher.update((field.len() as u64).to_le_bytes());
        hasher.update(field);
    }
    CacheKey(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CachedResponse {
    pub raw_response: String,
    pub timestamp: String,
    pub params: serde_json::Value,
}

/// On-disk key-value store with read-through semantics. Writes are atomic
/// (temp file + rename) so concurrent writers of the same key cannot corrupt
/// an entry.
pub struct ResponseCache {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(ResponseCache {
            dir,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        })
    }

    fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(&key.0[..2]).join(format!("{}.json", key.0))
    }

    pub fn get(&self, key: &CacheKey) -> Option<CachedResponse> {
        let bytes = match std::fs::read(self.path_for(key)) {
            Ok(b) => b,
            Err(_) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                return None;
            }
        };
        match serde_json::from_slice(&bytes) {
            Ok(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(v)
            }
            Err(_) => {
                // Corrupt entry: treat as a miss and let the caller rewrite it.
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    pub fn put(&self, key: &CacheKey, value: &CachedResponse) -> std::io::Result<()> {
        let path = self.path_for(key);
        std::fs::create_dir_all(path.parent().unwrap())?;
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(value)?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// (hits, misses) observed since open.
    pub fn stats(&self) -> (u64, u64) {
        (
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
        )
    }
}
