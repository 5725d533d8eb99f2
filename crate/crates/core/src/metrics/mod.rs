//! Quantitative evaluation: exact-match P/R/F1 over emoji multisets,
//! semantics-preservation scores, per-class accuracy, agreement statistics,
//! diversity, and the human-judgement comparison. Everything here is pure
//! and deterministic.

mod report;

pub use report::{compile_report, ExclusionSummary, PostEvaluation, ScoreReport};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emoji::{normalize, Emoji, Normalization};
use crate::gateway::Recommendation;
use crate::judge::{LabelSet, Task};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no scored posts")]
    EmptyInput,
    #[error("label vectors have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("kappa undefined: expected agreement is 1 but the vectors differ")]
    UndefinedKappa,
    #[error("correlation undefined: a label vector is constant")]
    ConstantVector,
    #[error("correlation requires a binary label domain, found {0} labels")]
    NotBinary(usize),
    #[error("annotation references unknown post id {0:?}")]
    UnknownPostId(String),
    #[error("annotation for {id:?} has score {score} outside [0, 1]")]
    InvalidAnnotation { id: String, score: f64 },
}

/// Precision, recall, and F1 in `[0, 1]`. F1 is 0 when `p + r = 0`,
/// otherwise the harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_pr(precision: f64, recall: f64) -> Prf {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

/// Multiset-intersection exact match between a predicted triple and the
/// ground-truth emojis. `None` when the truth is empty (post excluded).
pub fn exact_match_prf(pred: &[Emoji], truth: &[Emoji], mode: Normalization) -> Option<Prf> {
    if truth.is_empty() {
        return None;
    }
    if pred.is_empty() {
        return Some(Prf::from_pr(0.0, 0.0));
    }
    let mut remaining: HashMap<Emoji, usize> = HashMap::new();
    for e in truth {
        *remaining.entry(normalize(e, mode)).or_insert(0) += 1;
    }
    let mut matched = 0usize;
    for e in pred {
        if let Some(count) = remaining.get_mut(&normalize(e, mode)) {
            if *count > 0 {
                *count -= 1;
                matched += 1;
            }
        }
    }
    Some(Prf::from_pr(
        matched as f64 / pred.len() as f64,
        matched as f64 / truth.len() as f64,
    ))
}

/// Corpus-level P/R/F1: the unweighted mean of per-post values (macro over
/// sentences).
pub fn prf_macro_average(per_post: &[Prf]) -> Result<Prf, MetricsError> {
    if per_post.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = per_post.len() as f64;
    Ok(Prf {
        precision: per_post.iter().map(|p| p.precision).sum::<f64>() / n,
        recall: per_post.iter().map(|p| p.recall).sum::<f64>() / n,
        f1: per_post.iter().map(|p| p.f1).sum::<f64>() / n,
    })
}

/// Per-task match vector for one post, in `Task::ALL` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpMatch {
    pub matches: [bool; 5],
    pub matching_pairs: u8,
}

/// Compares the judge's labels for the recommended variant against the
/// original variant, task by task.
pub fn sp_per_post(pred: &LabelSet, truth: &LabelSet) -> SpMatch {
    let mut matches = [false; 5];
    for (i, task) in Task::ALL.iter().enumerate() {
        matches[i] = pred.get(*task) == truth.get(*task);
    }
    SpMatch {
        matches,
        matching_pairs: matches.iter().filter(|&&m| m).count() as u8,
    }
}

/// Accuracy per task, stored in `Task::ALL` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerTask {
    pub sentiment: f64,
    pub emotion: f64,
    pub stance: f64,
    pub age: f64,
    pub gender: f64,
}

impl PerTask {
    pub fn get(&self, task: Task) -> f64 {
        match task {
            Task::Sentiment => self.sentiment,
            Task::Emotion => self.emotion,
            Task::Stance => self.stance,
            Task::Age => self.age,
            Task::Gender => self.gender,
        }
    }

    fn from_fn(mut f: impl FnMut(Task) -> f64) -> PerTask {
        PerTask {
            sentiment: f(Task::Sentiment),
            emotion: f(Task::Emotion),
            stance: f(Task::Stance),
            age: f(Task::Age),
            gender: f(Task::Gender),
        }
    }

    pub fn mean(&self) -> f64 {
        (self.sentiment + self.emotion + self.stance + self.age + self.gender) / 5.0
    }
}

/// Corpus semantics-preservation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpResult {
    pub per_task: PerTask,
    /// Mean of the five per-task accuracies: the headline score.
    pub average: f64,
    /// Post counts indexed by matching-pairs value 0..=5.
    pub matching_pairs_histogram: [usize; 6],
    pub n_scored: usize,
}

/// Aggregates per-post match vectors into per-task accuracies, the average
/// score, and the matching-pairs histogram.
pub fn sp_corpus(results: &[SpMatch]) -> Result<SpResult, MetricsError> {
    if results.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = results.len() as f64;
    let per_task = PerTask::from_fn(|task| {
        let idx = Task::ALL.iter().position(|t| *t == task).unwrap();
        results.iter().filter(|r| r.matches[idx]).count() as f64 / n
    });
    let mut histogram = [0usize; 6];
    for r in results {
        histogram[r.matching_pairs as usize] += 1;
    }
    Ok(SpResult {
        per_task,
        average: per_task.mean(),
        matching_pairs_histogram: histogram,
        n_scored: results.len(),
    })
}

/// The downstream score a post with `k` matching pairs contributes: `k / 5`.
pub fn downstream_score(matching_pairs: u8) -> f64 {
    f64::from(matching_pairs) / 5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub class: String,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClassReport {
    pub task: Task,
    pub classes: Vec<ClassAccuracy>,
    /// Classes with no ground-truth posts, omitted from `classes`.
    pub omitted: Vec<String>,
}

/// Accuracy over the subset of posts whose ground-truth label is each class.
pub fn per_class_accuracy(pairs: &[(LabelSet, LabelSet)], task: Task) -> PerClassReport {
    let mut classes = Vec::new();
    let mut omitted = Vec::new();
    for class in task.classes() {
        let subset: Vec<_> = pairs
            .iter()
            .filter(|(_, truth)| truth.get(task) == *class)
            .collect();
        if subset.is_empty() {
            omitted.push((*class).to_string());
            continue;
        }
        let correct = subset
            .iter()
            .filter(|(pred, truth)| pred.get(task) == truth.get(task))
            .count();
        classes.push(ClassAccuracy {
            class: (*class).to_string(),
            n: subset.len(),
            correct,
            accuracy: correct as f64 / subset.len() as f64,
        });
    }
    PerClassReport {
        task,
        classes,
        omitted,
    }
}

/// Chance-corrected agreement `(p_o − p_e) / (1 − p_e)` with the
/// marginal-product expected agreement. Multi-class.
pub fn cohens_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = a.len() as f64;
    let mut count_a: HashMap<&T, usize> = HashMap::new();
    let mut count_b: HashMap<&T, usize> = HashMap::new();
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        *count_a.entry(x).or_insert(0) += 1;
        *count_b.entry(y).or_insert(0) += 1;
        if x == y {
            agree += 1;
        }
    }
    let observed = agree as f64 / n;
    let expected: f64 = count_a
        .iter()
        .map(|(label, &ca)| {
            let cb = count_b.get(label).copied().unwrap_or(0);
            (ca as f64 / n) * (cb as f64 / n)
        })
        .sum();
    if expected >= 1.0 {
        return if a == b {
            Ok(1.0)
        } else {
            Err(MetricsError::UndefinedKappa)
        };
    }
    Ok((observed - expected) / (1.0 - expected))
}

/// Pearson correlation over a `{0, 1}` encoding of a binary label domain
/// (the phi coefficient). Labels are encoded by their sort order, the same
/// mapping for both vectors.
pub fn binary_correlation<T: Eq + Hash + Ord>(a: &[T], b: &[T]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let domain: BTreeSet<&T> = a.iter().chain(b.iter()).collect();
    if domain.len() != 2 {
        return Err(MetricsError::NotBinary(domain.len()));
    }
    let zero = *domain.iter().next().unwrap();
    let encode = |v: &[T]| -> Vec<f64> {
        v.iter().map(|x| if x == zero { 0.0 } else { 1.0 }).collect()
    };
    let xa = encode(a);
    let xb = encode(b);
    let n = xa.len() as f64;
    let mean_a = xa.iter().sum::<f64>() / n;
    let mean_b = xb.iter().sum::<f64>() / n;
    let var_a: f64 = xa.iter().map(|x| (x - mean_a).powi(2)).sum();
    let var_b: f64 = xb.iter().map(|x| (x - mean_b).powi(2)).sum();
    if var_a == 0.0 || var_b == 0.0 {
        return Err(MetricsError::ConstantVector);
    }
    let cov: f64 = xa
        .iter()
        .zip(&xb)
        .map(|(x, y)| (x - mean_a) * (y - mean_b))
        .sum();
    Ok(cov / (var_a * var_b).sqrt())
}

/// Distinct-emoji count and top-k frequency table for a batch of
/// recommendations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityStats {
    pub unique_count: usize,
    /// `(emoji, frequency)` with non-increasing frequencies; ties broken by
    /// code-point order for determinism.
    pub top_k: Vec<(Emoji, usize)>,
    pub total_emojis: usize,
}

pub fn diversity(
    recs: &[&Recommendation],
    k: usize,
    mode: Normalization,
) -> Result<DiversityStats, MetricsError> {
    if recs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut counts: BTreeMap<Emoji, usize> = BTreeMap::new();
    let mut total = 0usize;
    for rec in recs {
        for e in &rec.emojis {
            *counts.entry(normalize(e, mode)).or_insert(0) += 1;
            total += 1;
        }
    }
    let unique_count = counts.len();
    let mut ranked: Vec<(Emoji, usize)> = counts.into_iter().collect();
    ranked.sort_by(|(ea, ca), (eb, cb)| cb.cmp(ca).then_with(|| ea.cmp(eb)));
    ranked.truncate(k);
    Ok(DiversityStats {
        unique_count,
        top_k: ranked,
        total_emojis: total,
    })
}

/// One row of the downstream-vs-human comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanComparisonRow {
    pub matching_pairs: u8,
    pub count: usize,
    pub downstream_score: f64,
    pub mean_human_score: Option<f64>,
}

/// Groups annotated posts by matching-pairs value and reports the mean human
/// score next to the downstream score `k / 5`. Rows cover k = 0..=5; buckets
/// with no annotations carry a count of 0.
pub fn human_comparison(
    matching_pairs: &[(String, u8)],
    annotations: &[(String, f64)],
) -> Result<Vec<HumanComparisonRow>, MetricsError> {
    let by_id: HashMap<&str, u8> = matching_pairs
        .iter()
        .map(|(id, k)| (id.as_str(), *k))
        .collect();
    let mut sums = [0.0f64; 6];
    let mut counts = [0usize; 6];
    for (id, score) in annotations {
        let k = *by_id
            .get(id.as_str())
            .ok_or_else(|| MetricsError::UnknownPostId(id.clone()))?;
        if !(0.0..=1.0).contains(score) {
            return Err(MetricsError::InvalidAnnotation {
                id: id.clone(),
                score: *score,
            });
        }
        sums[k as usize] += score;
        counts[k as usize] += 1;
    }
    Ok((0u8..=5)
        .map(|k| HumanComparisonRow {
            matching_pairs: k,
            count: counts[k as usize],
            downstream_score: downstream_score(k),
            mean_human_score: (counts[k as usize] > 0)
                .then(|| sums[k as usize] / counts[k as usize] as f64),
        })
        .collect())
}

/// Macro-averaged classification P/R/F1 over the classes present in either
/// vector.
pub fn classifier_prf<T: Eq + Hash + Ord>(pred: &[T], truth: &[T]) -> Result<Prf, MetricsError> {
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            a: pred.len(),
            b: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let classes: BTreeSet<&T> = pred.iter().chain(truth.iter()).collect();
    let mut sum = (0.0, 0.0, 0.0);
    for class in &classes {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for (p, t) in pred.iter().zip(truth) {
            match (&p == class, &t == class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f1 = Prf::from_pr(precision, recall).f1;
        sum.0 += precision;
        sum.1 += recall;
        sum.2 += f1;
    }
    let c = classes.len() as f64;
    Ok(Prf {
        precision: sum.0 / c,
        recall: sum.1 / c,
        f1: sum.2 / c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::RngCore;

    fn e(s: &str) -> Emoji {
        Emoji::new(s).unwrap()
    }

    fn labels(
        sentiment: &str,
        emotion: &str,
        stance: &str,
        age: &str,
        gender: &str,
    ) -> LabelSet {
        LabelSet {
            sentiment: sentiment.parse().unwrap(),
            emotion: emotion.parse().unwrap(),
            stance: stance.parse().unwrap(),
            age: age.parse().unwrap(),
            gender: gender.parse().unwrap(),
        }
    }

    #[test]
    fn exact_match_identity_is_perfect() {
        let triple = [e("🎉"), e("🏆"), e("💪")];
        let prf = exact_match_prf(&triple, &triple, Normalization::Exact).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn exact_match_partial_overlap() {
        // pred {🎉,🏆,💪} vs truth {🎉}: m=1 → p=1/3, r=1, f1=0.5
        let pred = [e("🎉"), e("🏆"), e("💪")];
        let truth = [e("🎉")];
        let prf = exact_match_prf(&pred, &truth, Normalization::Exact).unwrap();
        assert!((prf.precision - 1.0 / 3.0).abs() < 1e-12);
        assert!((prf.recall - 1.0).abs() < 1e-12);
        assert!((prf.f1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_match_disjoint_is_zero() {
        let pred = [e("🎉"), e("🏆"), e("💪")];
        let truth = [e("😂"), e("😭")];
        let prf = exact_match_prf(&pred, &truth, Normalization::Exact).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn exact_match_uses_multiset_intersection() {
        // pred has 😂 twice but truth only once: only one counts.
        let pred = [e("😂"), e("😂"), e("👍")];
        let truth = [e("😂")];
        let prf = exact_match_prf(&pred, &truth, Normalization::Exact).unwrap();
        assert!((prf.precision - 1.0 / 3.0).abs() < 1e-12);
        // and twice in truth lets both count
        let truth2 = [e("😂"), e("😂")];
        let prf2 = exact_match_prf(&pred, &truth2, Normalization::Exact).unwrap();
        assert!((prf2.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((prf2.recall - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_match_respects_base_normalization() {
        let pred = [e("👍🏽"), e("🏆"), e("💪")];
        let truth = [e("👍")];
        assert_eq!(
            exact_match_prf(&pred, &truth, Normalization::Exact).unwrap().recall,
            0.0
        );
        assert_eq!(
            exact_match_prf(&pred, &truth, Normalization::Base).unwrap().recall,
            1.0
        );
    }

    #[test]
    fn exact_match_empty_truth_excluded() {
        assert!(exact_match_prf(&[e("🎉")], &[], Normalization::Exact).is_none());
    }

    #[test]
    fn prf_symmetry_precision_recall_swap() {
        let a = [e("🎉"), e("🏆"), e("💪")];
        let b = [e("🎉"), e("😂")];
        let ab = exact_match_prf(&a, &b, Normalization::Exact).unwrap();
        let ba = exact_match_prf(&b, &a, Normalization::Exact).unwrap();
        assert!((ab.precision - ba.recall).abs() < 1e-12);
        assert!((ab.recall - ba.precision).abs() < 1e-12);
    }

    #[test]
    fn sp_per_post_counts_matching_tasks() {
        let truth = labels("positive", "happiness", "favor", "teen", "male");
        assert_eq!(sp_per_post(&truth, &truth).matching_pairs, 5);

        let pred = labels("positive", "sadness", "favor", "adult", "male");
        let m = sp_per_post(&pred, &truth);
        assert_eq!(m.matching_pairs, 3);
        assert!((downstream_score(m.matching_pairs) - 0.6).abs() < 1e-12);

        let disjoint = labels("negative", "sadness", "against", "adult", "female");
        let m = sp_per_post(&disjoint, &truth);
        assert_eq!(m.matching_pairs, 0);
        assert_eq!(downstream_score(0), 0.0);
    }

    #[test]
    fn downstream_score_is_exactly_k_over_five() {
        let expected = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        for k in 0u8..=5 {
            assert_eq!(downstream_score(k), expected[k as usize]);
        }
    }

    #[test]
    fn sp_corpus_all_matching_is_one() {
        let full = SpMatch { matches: [true; 5], matching_pairs: 5 };
        let result = sp_corpus(&[full, full, full]).unwrap();
        assert_eq!(result.average, 1.0);
        assert_eq!(result.per_task.gender, 1.0);
        assert_eq!(result.matching_pairs_histogram, [0, 0, 0, 0, 0, 3]);
        assert_eq!(result.n_scored, 3);
    }

    #[test]
    fn sp_corpus_average_equals_histogram_weighted_mean() {
        let cases = [
            SpMatch { matches: [true, true, false, true, false], matching_pairs: 3 },
            SpMatch { matches: [true, false, false, false, false], matching_pairs: 1 },
            SpMatch { matches: [true, true, true, true, true], matching_pairs: 5 },
        ];
        let result = sp_corpus(&cases).unwrap();
        let weighted: f64 = result
            .matching_pairs_histogram
            .iter()
            .enumerate()
            .map(|(k, &count)| downstream_score(k as u8) * count as f64)
            .sum::<f64>()
            / result.n_scored as f64;
        assert!((result.average - weighted).abs() < 1e-12);
    }

    #[test]
    fn sp_corpus_empty_is_error() {
        assert_eq!(sp_corpus(&[]).unwrap_err(), MetricsError::EmptyInput);
    }

    #[test]
    fn per_class_accuracy_planted_fixture() {
        let truth_teen = labels("positive", "happiness", "none", "teen", "male");
        let truth_senior = labels("positive", "happiness", "none", "senior", "male");
        let pred_teen = truth_teen;
        let pred_wrong_age = labels("positive", "happiness", "none", "adult", "male");

        // 4 senior-truth posts all mispredicted, 2 teen posts both right
        let pairs = vec![
            (pred_wrong_age, truth_senior),
            (pred_wrong_age, truth_senior),
            (pred_wrong_age, truth_senior),
            (pred_wrong_age, truth_senior),
            (pred_teen, truth_teen),
            (pred_teen, truth_teen),
        ];
        let report = per_class_accuracy(&pairs, Task::Age);
        let senior = report.classes.iter().find(|c| c.class == "senior").unwrap();
        assert_eq!((senior.n, senior.correct), (4, 0));
        assert_eq!(senior.accuracy, 0.0);
        let teen = report.classes.iter().find(|c| c.class == "teen").unwrap();
        assert_eq!(teen.accuracy, 1.0);
        assert_eq!(report.omitted, vec!["child".to_string(), "adult".to_string()]);
    }

    #[test]
    fn kappa_identity_with_two_labels_is_one() {
        let a = ["m", "f", "m", "f"];
        assert!((cohens_kappa(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_hand_contingency_case() {
        // a=[m,m,f,f], b=[m,f,f,f]: p_o=0.75, p_e=0.5 → kappa=0.5
        let a = ["m", "m", "f", "f"];
        let b = ["m", "f", "f", "f"];
        assert!((cohens_kappa(&a, &b).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kappa_is_symmetric_and_relabel_invariant() {
        let a = ["m", "m", "f", "f", "m"];
        let b = ["m", "f", "f", "f", "m"];
        assert!((cohens_kappa(&a, &b).unwrap() - cohens_kappa(&b, &a).unwrap()).abs() < 1e-12);
        // consistent relabeling m→1, f→2
        let a2 = [1, 1, 2, 2, 1];
        let b2 = [1, 2, 2, 2, 1];
        assert!((cohens_kappa(&a, &b).unwrap() - cohens_kappa(&a2, &b2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn kappa_degenerate_constant_identical_is_one() {
        let a = ["m", "m", "m"];
        assert_eq!(cohens_kappa(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn kappa_length_mismatch_is_error() {
        assert!(matches!(
            cohens_kappa(&["m"], &["m", "f"]),
            Err(MetricsError::LengthMismatch { a: 1, b: 2 })
        ));
    }

    #[test]
    fn kappa_near_zero_for_independent_vectors() {
        // Monte-Carlo: two independent fair binary vectors of length 1e5.
        let mut rng = crate::gateway::derive_rng(1234, "kappa-independence");
        let n = 100_000;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            a.push((rng.next_u64() & 1) as u8);
            b.push((rng.next_u64() & 1) as u8);
        }
        let kappa = cohens_kappa(&a, &b).unwrap();
        assert!(kappa.abs() < 0.02, "kappa {kappa} too far from 0");
    }

    #[test]
    fn phi_identity_and_complement() {
        let a = ["m", "f", "m", "f"];
        assert!((binary_correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let b = ["f", "m", "f", "m"];
        assert!((binary_correlation(&a, &b).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_matches_hand_contingency() {
        // same vectors as the kappa hand case; phi = 2/sqrt(12) = 1/sqrt(3)
        let a = ["m", "m", "f", "f"];
        let b = ["m", "f", "f", "f"];
        let phi = binary_correlation(&a, &b).unwrap();
        assert!((phi - 1.0 / 3.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn phi_rejects_constant_and_multiclass_inputs() {
        assert_eq!(
            binary_correlation(&["m", "m"], &["m", "f"]).unwrap_err(),
            MetricsError::ConstantVector
        );
        assert_eq!(
            binary_correlation(&["a", "b"], &["c", "b"]).unwrap_err(),
            MetricsError::NotBinary(3)
        );
    }

    fn rec(emojis: [&str; 3]) -> Recommendation {
        Recommendation {
            post_id: "p".into(),
            model: crate::gateway::ModelSpec {
                provider_id: "mock".into(),
                model_name: "m".into(),
                endpoint: "https://x/v1".into(),
                temperature: 1.0,
                max_retries: 0,
            },
            strategy: crate::gateway::StrategyKind::ZeroShot,
            emojis: [e(emojis[0]), e(emojis[1]), e(emojis[2])],
            raw_response: "r".into(),
            cached: false,
        }
    }

    #[test]
    fn diversity_constant_triple() {
        let recs = vec![rec(["🎉", "🏆", "💪"]); 4];
        let refs: Vec<&Recommendation> = recs.iter().collect();
        let stats = diversity(&refs, 50, Normalization::Exact).unwrap();
        assert_eq!(stats.unique_count, 3);
        assert_eq!(stats.total_emojis, 12);
        assert!(stats.top_k.iter().all(|(_, n)| *n == 4));
    }

    #[test]
    fn diversity_frequencies_non_increasing_and_order_invariant() {
        let mut recs = [
            rec(["🎉", "🎉", "🏆"]),
            rec(["🎉", "💪", "🏆"]),
            rec(["😂", "💪", "🎉"]),
        ];
        let refs: Vec<&Recommendation> = recs.iter().collect();
        let stats = diversity(&refs, 2, Normalization::Exact).unwrap();
        assert_eq!(stats.top_k[0].0.as_str(), "🎉");
        assert_eq!(stats.top_k[0].1, 4);
        assert!(stats.top_k.windows(2).all(|w| w[0].1 >= w[1].1));

        recs.reverse();
        let refs: Vec<&Recommendation> = recs.iter().collect();
        let again = diversity(&refs, 2, Normalization::Exact).unwrap();
        assert_eq!(stats, again);
    }

    #[test]
    fn human_comparison_rows() {
        let pairs = vec![
            ("a".to_string(), 4u8),
            ("b".to_string(), 4u8),
            ("c".to_string(), 5u8),
        ];
        let annotations = vec![
            ("a".to_string(), 0.7),
            ("b".to_string(), 0.8),
            ("c".to_string(), 0.9),
        ];
        let rows = human_comparison(&pairs, &annotations).unwrap();
        assert_eq!(rows.len(), 6);
        let row4 = &rows[4];
        assert_eq!(row4.count, 2);
        assert!((row4.downstream_score - 0.8).abs() < 1e-12);
        assert!((row4.mean_human_score.unwrap() - 0.75).abs() < 1e-12);
        let row5 = &rows[5];
        assert_eq!(row5.downstream_score, 1.0);
        assert_eq!(rows[0].count, 0);
        assert_eq!(rows[0].mean_human_score, None);
    }

    #[test]
    fn human_comparison_rejects_unknown_ids_and_bad_scores() {
        let pairs = vec![("a".to_string(), 3u8)];
        assert!(matches!(
            human_comparison(&pairs, &[("zz".to_string(), 0.5)]),
            Err(MetricsError::UnknownPostId(_))
        ));
        assert!(matches!(
            human_comparison(&pairs, &[("a".to_string(), 1.5)]),
            Err(MetricsError::InvalidAnnotation { .. })
        ));
    }

    #[test]
    fn classifier_prf_identity() {
        let v = ["m", "f", "m"];
        let prf = classifier_prf(&v, &v).unwrap();
        assert_eq!((prf.precision, prf.recall, prf.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn classifier_prf_hand_confusion_case() {
        // truth=[m,m,f,f], pred=[m,f,f,f]
        // class m: p=1, r=0.5, f1=2/3; class f: p=2/3, r=1, f1=4/5
        let truth = ["m", "m", "f", "f"];
        let pred = ["m", "f", "f", "f"];
        let prf = classifier_prf(&pred, &truth).unwrap();
        assert!((prf.precision - 5.0 / 6.0).abs() < 1e-12);
        assert!((prf.recall - 0.75).abs() < 1e-12);
        assert!((prf.f1 - 11.0 / 15.0).abs() < 1e-12);
    }
}
