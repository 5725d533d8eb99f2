//! Emoji-sensitivity probe: does swapping a post's emojis for random ones
//! change the judge's gender prediction? Agreement between the two label
//! vectors is reported as Cohen's kappa and the phi correlation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emoji::{Emoji, EmojiLexicon};
use crate::gateway::{derive_rng, seeded_sample, ChatBackend, ModelSpec, ResponseCache};
use crate::metrics::{binary_correlation, cohens_kappa, MetricsError};

use super::{classify, JudgeError, Task};

/// Joins a post's plain text with emojis appended at the end, the fixed
/// composition used whenever original spans are unavailable.
pub fn compose_with_emojis(text: &str, emojis: &[Emoji]) -> String {
    let glyphs: String = emojis.iter().map(|e| e.as_str()).collect();
    if text.is_empty() {
        glyphs
    } else if glyphs.is_empty() {
        text.to_string()
    } else {
        format!("{text} {glyphs}")
    }
}

/// One post entering the sensitivity experiment; must carry at least one
/// original emoji.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityPost {
    pub id: String,
    pub plain_text: String,
    pub original_emojis: Vec<Emoji>,
}

#[derive(Debug, Clone, Copy)]
pub struct SensitivityOptions {
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum SensitivityError {
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error("no posts produced valid gender verdicts on both variants")]
    NoScoredPosts,
    #[error("agreement metric undefined: {0}")]
    Metric(#[from] MetricsError),
    #[error("post {0} has no emojis")]
    EmptyEmojis(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub kappa: f64,
    pub correlation: f64,
    pub n_scored: usize,
    /// Posts whose gender verdict was INVALID on either variant.
    pub excluded: Vec<ExcludedPost>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExcludedPost {
    pub id: String,
    pub reason: String,
}

/// Runs the experiment: for each post, judge the gender of the original
/// composition and of a variant whose emojis are replaced by three
/// seeded-random lexicon emojis, then measure agreement.
pub fn sensitivity_experiment(
    posts: &[SensitivityPost],
    model: &ModelSpec,
    backend: &dyn ChatBackend,
    cache: &ResponseCache,
    lexicon: &EmojiLexicon,
    opts: SensitivityOptions,
) -> Result<SensitivityReport, SensitivityError> {
    let mut original_labels = Vec::new();
    let mut variant_labels = Vec::new();
    let mut excluded = Vec::new();

    for post in posts {
        if post.original_emojis.is_empty() {
            return Err(SensitivityError::EmptyEmojis(post.id.clone()));
        }
        let original = compose_with_emojis(&post.plain_text, &post.original_emojis);
        let replacement = random_replacement(&post.id, lexicon, opts.seed);
        let variant = compose_with_emojis(&post.plain_text, &replacement);

        let v_orig = classify(&original, Task::Gender, model, backend, cache)?;
        let v_var = classify(&variant, Task::Gender, model, backend, cache)?;

        match (v_orig.label.as_valid(), v_var.label.as_valid()) {
            (Some(a), Some(b)) => {
                original_labels.push(a.to_string());
                variant_labels.push(b.to_string());
            }
            _ => excluded.push(ExcludedPost {
                id: post.id.clone(),
                reason: format!(
                    "INVALID verdict (original: {}, variant: {})",
                    v_orig.label, v_var.label
                ),
            }),
        }
    }

    if original_labels.is_empty() {
        return Err(SensitivityError::NoScoredPosts);
    }

    Ok(SensitivityReport {
        kappa: cohens_kappa(&original_labels, &variant_labels)?,
        correlation: binary_correlation(&original_labels, &variant_labels)?,
        n_scored: original_labels.len(),
        excluded,
        seed: opts.seed,
    })
}

/// Three lexicon emojis drawn per (seed, post id); the stream is independent
/// of the random-baseline stream for the same post.
fn random_replacement(post_id: &str, lexicon: &EmojiLexicon, seed: u64) -> Vec<Emoji> {
    let mut rng = derive_rng(seed, &format!("sensitivity/{post_id}"));
    seeded_sample(&mut rng, lexicon.size(), 3)
        .into_iter()
        .map(|i| lexicon.get(i).unwrap().clone())
        .collect()
}
