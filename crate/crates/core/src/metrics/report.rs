//! Assembles per-post evaluation inputs into the full score report, with
//! JSON, aligned-text, and CSV renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::emoji::{Emoji, Normalization};
use crate::judge::{LabelSet, Task};

use super::{
    diversity, exact_match_prf, per_class_accuracy, prf_macro_average, sp_corpus, sp_per_post,
    DiversityStats, MetricsError, PerClassReport, Prf, SpResult,
};
use crate::gateway::Recommendation;

/// Everything known about one post when scoring: ground-truth emojis, the
/// recommendation (if any), and the judge's labels for both variants.
#[derive(Debug, Clone)]
pub struct PostEvaluation {
    pub post_id: String,
    pub truth_emojis: Vec<Emoji>,
    pub recommendation: Option<Recommendation>,
    pub original_labels: Option<LabelSet>,
    pub recommended_labels: Option<LabelSet>,
}

/// Posts left out of each rate, never silently dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionSummary {
    pub recommendation_failures: usize,
    pub invalid_original_labels: usize,
    pub invalid_recommended_labels: usize,
    pub empty_truth_emojis: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreReport {
    pub model: String,
    pub strategy: String,
    pub normalization: Normalization,
    /// Exact-match P/R/F1, macro-averaged per sentence.
    pub prf: Prf,
    pub prf_n_scored: usize,
    pub sp: SpResult,
    pub per_class: Vec<PerClassReport>,
    pub diversity: DiversityStats,
    pub excluded: ExclusionSummary,
    /// Per-post matching-pairs values, for the human comparison.
    pub matching_pairs: Vec<(String, u8)>,
}

/// Computes the whole report. SP rates run over posts where both variants
/// have complete valid labels; exact-match P/R/F1 over posts with a parsed
/// recommendation and non-empty ground truth; diversity over every parsed
/// recommendation.
pub fn compile_report(
    posts: &[PostEvaluation],
    model: &str,
    strategy: &str,
    mode: Normalization,
    top_k: usize,
) -> Result<ScoreReport, MetricsError> {
    let mut excluded = ExclusionSummary::default();
    let mut per_post_prf = Vec::new();
    let mut sp_matches = Vec::new();
    let mut label_pairs = Vec::new();
    let mut matching_pairs = Vec::new();
    let mut recs = Vec::new();

    for post in posts {
        let rec = match &post.recommendation {
            Some(rec) => rec,
            None => {
                excluded.recommendation_failures += 1;
                continue;
            }
        };
        recs.push(rec);

        match exact_match_prf(&rec.emojis, &post.truth_emojis, mode) {
            Some(prf) => per_post_prf.push(prf),
            None => excluded.empty_truth_emojis += 1,
        }

        match (&post.original_labels, &post.recommended_labels) {
            (Some(truth), Some(pred)) => {
                let m = sp_per_post(pred, truth);
                matching_pairs.push((post.post_id.clone(), m.matching_pairs));
                sp_matches.push(m);
                label_pairs.push((*pred, *truth));
            }
            (None, _) => excluded.invalid_original_labels += 1,
            (Some(_), None) => excluded.invalid_recommended_labels += 1,
        }
    }

    let sp = sp_corpus(&sp_matches)?;
    let prf = prf_macro_average(&per_post_prf)?;
    let per_class = Task::ALL
        .iter()
        .map(|task| per_class_accuracy(&label_pairs, *task))
        .collect();
    let diversity = diversity(&recs, top_k, mode)?;

    Ok(ScoreReport {
        model: model.to_string(),
        strategy: strategy.to_string(),
        normalization: mode,
        prf,
        prf_n_scored: per_post_prf.len(),
        sp,
        per_class,
        diversity,
        excluded,
        matching_pairs,
    })
}

impl ScoreReport {
    /// Human-readable aligned table.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}  strategy: {}", self.model, self.strategy);
        let _ = writeln!(
            out,
            "exact match (macro per sentence, {} posts): precision {:.4}  recall {:.4}  f1 {:.4}",
            self.prf_n_scored, self.prf.precision, self.prf.recall, self.prf.f1
        );
        let _ = writeln!(out, "semantics preservation ({} posts):", self.sp.n_scored);
        for task in Task::ALL {
            let _ = writeln!(out, "  {:<10} {:>7.2}%", task.name(), self.sp.per_task.get(task) * 100.0);
        }
        let _ = writeln!(out, "  {:<10} {:>7.2}%", "average", self.sp.average * 100.0);
        let _ = writeln!(out, "matching pairs histogram:");
        for (k, count) in self.sp.matching_pairs_histogram.iter().enumerate() {
            let _ = writeln!(out, "  {k}: {count}");
        }
        let _ = writeln!(out, "per-class accuracy:");
        for report in &self.per_class {
            for class in &report.classes {
                let _ = writeln!(
                    out,
                    "  {:<10} {:<10} {:>7.2}%  ({}/{})",
                    report.task.name(),
                    class.class,
                    class.accuracy * 100.0,
                    class.correct,
                    class.n
                );
            }
            for class in &report.omitted {
                let _ = writeln!(out, "  {:<10} {:<10} (no posts)", report.task.name(), class);
            }
        }
        let _ = writeln!(
            out,
            "diversity: {} unique emojis over {} recommended",
            self.diversity.unique_count, self.diversity.total_emojis
        );
        let _ = writeln!(
            out,
            "excluded: {} recommendation failures, {} invalid original, {} invalid recommended, {} empty truth",
            self.excluded.recommendation_failures,
            self.excluded.invalid_original_labels,
            self.excluded.invalid_recommended_labels,
            self.excluded.empty_truth_emojis
        );
        out
    }

    /// `matching_pairs,count` CSV of the histogram.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("matching_pairs,count\n");
        for (k, count) in self.sp.matching_pairs_histogram.iter().enumerate() {
            let _ = writeln!(out, "{k},{count}");
        }
        out
    }

    /// `rank,emoji,frequency` CSV of the top-k distribution.
    pub fn top_emojis_csv(&self) -> String {
        let mut out = String::from("rank,emoji,frequency\n");
        for (i, (emoji, count)) in self.diversity.top_k.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i + 1, emoji.as_str(), count);
        }
        out
    }
}
