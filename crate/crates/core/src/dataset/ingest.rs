//! Reading raw corpora from JSONL or TSV files.

use std::collections::HashSet;
use std::path::Path;

use super::{DatasetError, RawPost};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestFormat {
    Jsonl,
    Tsv,
}

impl std::str::FromStr for IngestFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(IngestFormat::Jsonl),
            "tsv" => Ok(IngestFormat::Tsv),
            other => Err(format!("unknown ingest format {other:?}, expected jsonl or tsv")),
        }
    }
}

/// Parses one `RawPost` per record, order preserved. Schema violations name
/// the offending line; duplicate ids are rejected.
pub fn ingest(path: &Path, format: IngestFormat) -> Result<Vec<RawPost>, DatasetError> {
    let content = std::fs::read_to_string(path)?;
    let mut posts = Vec::new();
    let mut seen = HashSet::new();

    for (idx, raw_line) in content.lines().enumerate() {
        let line = idx + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let post = match format {
            IngestFormat::Jsonl => {
                serde_json::from_str::<RawPost>(raw_line).map_err(|e| DatasetError::Format {
                    line,
                    message: e.to_string(),
                })?
            }
            IngestFormat::Tsv => {
                let (id, raw_text) =
                    raw_line.split_once('\t').ok_or_else(|| DatasetError::Format {
                        line,
                        message: "missing raw_text column (expected `id\\traw_text`)".into(),
                    })?;
                RawPost {
                    id: id.to_string(),
                    raw_text: raw_text.to_string(),
                    source_meta: Default::default(),
                }
            }
        };
        if post.raw_text.is_empty() {
            return Err(DatasetError::Format {
                line,
                message: format!("post {:?} has empty raw_text", post.id),
            });
        }
        if !seen.insert(post.id.clone()) {
            return Err(DatasetError::Format {
                line,
                message: format!("duplicate id {:?}", post.id),
            });
        }
        posts.push(post);
    }
    Ok(posts)
}
