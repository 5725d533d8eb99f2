//! Stage-output manifests and JSONL helpers. Every output file starts with a
//! manifest line carrying the config digest, seeds, lexicon version, and
//! tool version, so any artifact can be traced back to its run.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};

use crate::config::SeedsConfig;
use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Prompts travel as a single user message; recorded so runs stay
/// comparable if this ever changes.
pub const MESSAGE_PLACEMENT: &str = "single_user_message";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: String,
    pub tool_version: String,
    pub config_digest: String,
    pub lexicon_version: String,
    pub seeds: SeedsConfig,
    pub message_placement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

impl StageManifest {
    pub fn new(
        stage: &str,
        config_digest: &str,
        lexicon_version: &str,
        seeds: SeedsConfig,
    ) -> StageManifest {
        StageManifest {
            stage: stage.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            config_digest: config_digest.to_string(),
            lexicon_version: lexicon_version.to_string(),
            seeds,
            message_placement: MESSAGE_PLACEMENT.to_string(),
            model: None,
            strategy: None,
            variant: None,
        }
    }

    pub fn with_model(mut self, model: &str) -> Self {
        self.model = Some(model.to_string());
        self
    }

    pub fn with_strategy(mut self, strategy: &str) -> Self {
        self.strategy = Some(strategy.to_string());
        self
    }

    pub fn with_variant(mut self, variant: &str) -> Self {
        self.variant = Some(variant.to_string());
        self
    }

    /// The manifest as a tagged JSON line.
    pub fn to_line(&self) -> String {
        let mut value = serde_json::to_value(self).expect("manifest serializes");
        value
            .as_object_mut()
            .unwrap()
            .insert("type".into(), "manifest".into());
        value.to_string()
    }
}

/// Writes a manifest line followed by one JSON record per line.
pub fn write_jsonl<T: Serialize>(
    path: &Path,
    manifest: &StageManifest,
    records: &[T],
) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))
            .map_err(CliError::Data)?;
    }
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))
            .map_err(CliError::Data)?,
    );
    (|| -> std::io::Result<()> {
        writeln!(out, "{}", manifest.to_line())?;
        for record in records {
            writeln!(out, "{}", serde_json::to_string(record)?)?;
        }
        out.flush()
    })()
    .with_context(|| format!("writing {}", path.display()))
    .map_err(CliError::Data)
}

/// Reads a manifest-headed JSONL file: returns the manifest value and the
/// parsed records.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(
    path: &Path,
) -> CliResult<(serde_json::Value, Vec<T>)> {
    let content = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Data)?;
    let mut lines = content.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| CliError::data(anyhow!("{} is empty", path.display())))?;
    let manifest: serde_json::Value = serde_json::from_str(first)
        .with_context(|| format!("{} line 1", path.display()))
        .map_err(CliError::Data)?;
    if manifest.get("type").and_then(|t| t.as_str()) != Some("manifest") {
        return Err(CliError::data(anyhow!(
            "{} does not start with a manifest line",
            path.display()
        )));
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(line)
            .with_context(|| format!("{} line {}", path.display(), idx + 1))
            .map_err(CliError::Data)?;
        records.push(record);
    }
    Ok((manifest, records))
}

/// One judge verdict row: the persisted wire format for judge results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeRow {
    pub post_id: String,
    pub variant: String,
    pub task: sempres_core::judge::Task,
    pub votes: Vec<sempres_core::judge::JudgeLabel>,
    pub label: sempres_core::judge::JudgeLabel,
}
