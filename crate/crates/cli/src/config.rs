//! Run configuration: a TOML file naming paths, model specs, seeds, and the
//! concurrency budget. Relative paths resolve against the config file's
//! directory.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sempres_core::emoji::Normalization;
use sempres_core::gateway::ModelSpec;

use crate::error::{CliError, CliResult};

pub const RECOMMENDER_DEFAULT_TEMPERATURE: f64 = 1.0;
pub const JUDGE_DEFAULT_TEMPERATURE: f64 = 0.0;
const DEFAULT_MAX_RETRIES: u32 = 3;

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub judge: ModelConfig,
    #[serde(default)]
    pub recommenders: Vec<ModelConfig>,
    #[serde(default)]
    pub seeds: SeedsConfig,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct PathsConfig {
    pub lexicon: PathBuf,
    pub benchmark: PathBuf,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ModelConfig {
    pub provider: String,
    pub model: String,
    pub endpoint: String,
    pub temperature: Option<f64>,
    pub max_retries: Option<u32>,
    /// Requests per second; 0 or absent disables rate limiting.
    pub rate_limit_per_sec: Option<f64>,
}

impl ModelConfig {
    pub fn to_spec(&self, default_temperature: f64) -> ModelSpec {
        ModelSpec {
            provider_id: self.provider.clone(),
            model_name: self.model.clone(),
            endpoint: self.endpoint.clone(),
            temperature: self.temperature.unwrap_or(default_temperature),
            max_retries: self.max_retries.unwrap_or(DEFAULT_MAX_RETRIES),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
pub struct SeedsConfig {
    pub balance: u64,
    pub baseline: u64,
    pub sensitivity: u64,
}

impl Default for SeedsConfig {
    fn default() -> Self {
        SeedsConfig {
            balance: 42,
            baseline: 42,
            sensitivity: 42,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RunSection {
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default = "default_male_sample")]
    pub male_sample: usize,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
}

fn default_concurrency() -> usize {
    4
}

fn default_male_sample() -> usize {
    2000
}

fn default_top_k() -> usize {
    50
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            concurrency: default_concurrency(),
            male_sample: default_male_sample(),
            normalization: Normalization::default(),
            top_k: default_top_k(),
        }
    }
}

/// A loaded config plus the digest of its raw bytes; the digest goes into
/// every output manifest.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub digest: String,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> CliResult<LoadedConfig> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(CliError::Config)?;
        let config: RunConfig = toml::from_str(
            std::str::from_utf8(&bytes)
                .context("config is not UTF-8")
                .map_err(CliError::Config)?,
        )
        .map_err(|e| CliError::config(anyhow!("parsing {}: {e}", path.display())))?;

        let base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or_else(|| PathBuf::from("."));

        let loaded = LoadedConfig {
            config,
            digest: hex::encode(Sha256::digest(&bytes)),
            base_dir,
        };
        loaded.validate()?;
        Ok(loaded)
    }

    fn validate(&self) -> CliResult<()> {
        if !self.lexicon_path().exists() {
            return Err(CliError::config(anyhow!(
                "lexicon file {} does not exist",
                self.lexicon_path().display()
            )));
        }
        self.judge_spec().validate().map_err(CliError::config)?;
        for model in &self.config.recommenders {
            model
                .to_spec(RECOMMENDER_DEFAULT_TEMPERATURE)
                .validate()
                .map_err(CliError::config)?;
        }
        if self.config.run.concurrency == 0 {
            return Err(CliError::config(anyhow!("run.concurrency must be at least 1")));
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn lexicon_path(&self) -> PathBuf {
        self.resolve(&self.config.paths.lexicon)
    }

    pub fn benchmark_path(&self) -> PathBuf {
        self.resolve(&self.config.paths.benchmark)
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.resolve(&self.config.paths.cache_dir)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.paths.output_dir)
    }

    pub fn judge_spec(&self) -> ModelSpec {
        self.config.judge.to_spec(JUDGE_DEFAULT_TEMPERATURE)
    }

    /// Recommender by name, or the first configured one.
    pub fn recommender_spec(&self, name: Option<&str>) -> CliResult<ModelSpec> {
        let found = match name {
            Some(name) => self
                .config
                .recommenders
                .iter()
                .find(|m| m.model == name)
                .ok_or_else(|| {
                    CliError::config(anyhow!("model {name:?} is not in [[recommenders]]"))
                })?,
            None => self.config.recommenders.first().ok_or_else(|| {
                CliError::config(anyhow!("config has no [[recommenders]] entries"))
            })?,
        };
        Ok(found.to_spec(RECOMMENDER_DEFAULT_TEMPERATURE))
    }

    pub fn recommender_config(&self, name: Option<&str>) -> Option<&ModelConfig> {
        match name {
            Some(name) => self.config.recommenders.iter().find(|m| m.model == name),
            None => self.config.recommenders.first(),
        }
    }
}

/// File-name-safe form of a model or strategy name.
pub fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, lexicon_line: &str) -> PathBuf {
        let lexicon = dir.join("lex.tsv");
        std::fs::write(&lexicon, lexicon_line).unwrap();
        let path = dir.join("run.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        write!(
            f,
            r#"
[paths]
lexicon = "lex.tsv"
benchmark = "out/benchmark.jsonl"
cache_dir = "out/cache"
output_dir = "out"

[judge]
provider = "openai"
model = "gpt-4o-mini"
endpoint = "https://api.openai.com/v1"

[[recommenders]]
provider = "openai"
model = "gpt-4o"
endpoint = "https://api.openai.com/v1"
"#
        )
        .unwrap();
        path
    }

    #[test]
    fn loads_with_role_specific_temperature_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "1\t😂\n");
        let loaded = LoadedConfig::load(&path).unwrap();
        assert_eq!(loaded.judge_spec().temperature, 0.0);
        assert_eq!(loaded.recommender_spec(None).unwrap().temperature, 1.0);
        assert_eq!(loaded.config.seeds.balance, 42);
        assert_eq!(loaded.config.run.male_sample, 2000);
        assert_eq!(loaded.digest.len(), 64);
    }

    #[test]
    fn missing_lexicon_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "1\t😂\n");
        std::fs::remove_file(dir.path().join("lex.tsv")).unwrap();
        let err = LoadedConfig::load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_model_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), "1\t😂\n");
        let loaded = LoadedConfig::load(&path).unwrap();
        assert_eq!(loaded.recommender_spec(Some("nope")).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn slug_sanitizes_names() {
        assert_eq!(slug("meta/llama-3.1"), "meta_llama-3.1");
        assert_eq!(slug("gpt-4o"), "gpt-4o");
    }
}
