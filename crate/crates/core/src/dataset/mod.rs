//! Corpus ingestion, filtering, judge-labeling, class balancing, and
//! persistence of the benchmark.

mod balance;
mod filter;
mod ingest;
mod label;
mod persist;

pub use balance::{balance, BalanceOptions, BalanceReport, ManifestContext};
pub use filter::filter_corpus;
pub use ingest::{ingest, IngestFormat};
pub use label::{label_corpus, DroppedPost, LabeledCorpus, LabelingOptions};
pub use persist::{load_benchmark, save_benchmark};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emoji::Emoji;
use crate::judge::{LabelSet, Task};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),
    #[error("labeling failed at post {failed_id}: {message}")]
    PartialRun {
        /// Posts committed in input order before the failure; labeling can
        /// resume through the cache without re-billing these.
        completed: Vec<BenchmarkPost>,
        dropped: Vec<DroppedPost>,
        failed_id: String,
        message: String,
    },
}

/// One record from the raw corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPost {
    pub id: String,
    pub raw_text: String,
    #[serde(default, rename = "meta", skip_serializing_if = "BTreeMap::is_empty")]
    pub source_meta: BTreeMap<String, String>,
}

/// One benchmark entry: plain text, its original emojis, and the judge's
/// ground-truth labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPost {
    pub id: String,
    pub text: String,
    pub emojis: Vec<Emoji>,
    pub labels: LabelSet,
}

/// Per-task class histograms; every class is present, zero counts included.
pub type DistributionReport = BTreeMap<String, BTreeMap<String, usize>>;

/// Exact class counts per task over a set of posts.
pub fn distribution_report(posts: &[BenchmarkPost]) -> DistributionReport {
    let mut report = DistributionReport::new();
    for task in Task::ALL {
        let mut histogram: BTreeMap<String, usize> = task
            .classes()
            .iter()
            .map(|c| ((*c).to_string(), 0))
            .collect();
        for post in posts {
            *histogram.get_mut(post.labels.get(task)).unwrap() += 1;
        }
        report.insert(task.name().to_string(), histogram);
    }
    report
}

/// Provenance header persisted as the first line of a benchmark file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub lexicon_version: String,
    pub judge_model: String,
    pub balance_seed: u64,
    pub created_at: String,
    pub histograms: DistributionReport,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub posts: Vec<BenchmarkPost>,
    pub manifest: Manifest,
}

impl Benchmark {
    /// Checks the structural invariants: unique ids and manifest histograms
    /// equal to the recomputed ones. Run on save and load.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let mut seen = std::collections::HashSet::new();
        for post in &self.posts {
            if !seen.insert(post.id.as_str()) {
                return Err(DatasetError::ManifestMismatch(format!(
                    "duplicate post id {:?}",
                    post.id
                )));
            }
        }
        let recomputed = distribution_report(&self.posts);
        if recomputed != self.manifest.histograms {
            return Err(DatasetError::ManifestMismatch(
                "manifest histograms differ from recomputed histograms".into(),
            ));
        }
        Ok(())
    }
}
