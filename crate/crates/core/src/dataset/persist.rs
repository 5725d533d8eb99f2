//! Benchmark persistence: JSONL with a manifest line first, invariants
//! checked on both save and load.

use std::io::Write;
use std::path::Path;

use super::{Benchmark, BenchmarkPost, DatasetError, Manifest};

/// Writes the manifest line (tagged `"type":"manifest"`) followed by one
/// post object per line. Validates invariants first.
pub fn save_benchmark(benchmark: &Benchmark, path: &Path) -> Result<(), DatasetError> {
    benchmark.validate()?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);

    let mut manifest = serde_json::to_value(&benchmark.manifest).expect("manifest serializes");
    manifest
        .as_object_mut()
        .expect("manifest is an object")
        .insert("type".into(), "manifest".into());
    writeln!(out, "{manifest}")?;

    for post in &benchmark.posts {
        writeln!(out, "{}", serde_json::to_string(post).expect("post serializes"))?;
    }
    out.flush()?;
    Ok(())
}

/// Loads and validates a benchmark file.
pub fn load_benchmark(path: &Path) -> Result<Benchmark, DatasetError> {
    let content = std::fs::read_to_string(path)?;
    let mut lines = content.lines().enumerate();

    let (_, first) = lines.next().ok_or_else(|| DatasetError::Format {
        line: 1,
        message: "empty benchmark file, expected a manifest line".into(),
    })?;
    let value: serde_json::Value =
        serde_json::from_str(first).map_err(|e| DatasetError::Format {
            line: 1,
            message: e.to_string(),
        })?;
    if value.get("type").and_then(|t| t.as_str()) != Some("manifest") {
        return Err(DatasetError::Format {
            line: 1,
            message: "first line is not tagged \"type\":\"manifest\"".into(),
        });
    }
    let manifest: Manifest =
        serde_json::from_value(value).map_err(|e| DatasetError::Format {
            line: 1,
            message: e.to_string(),
        })?;

    let mut posts = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let post: BenchmarkPost =
            serde_json::from_str(line).map_err(|e| DatasetError::Format {
                line: idx + 1,
                message: e.to_string(),
            })?;
        posts.push(post);
    }

    let mut manifest = manifest;
    manifest.extra.remove("type");
    let benchmark = Benchmark { posts, manifest };
    benchmark.validate()?;
    Ok(benchmark)
}
