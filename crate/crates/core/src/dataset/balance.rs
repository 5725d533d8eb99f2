//! Down-sampling the labeled corpus into the balanced benchmark.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::gateway::{derive_rng, seeded_sample};
use crate::judge::{AgeGroup, Emotion, Gender, Stance};

use super::{distribution_report, Benchmark, BenchmarkPost, Manifest};

#[derive(Debug, Clone, Copy)]
pub struct BalanceOptions {
    pub seed: u64,
    /// Size of the male down-sample; defaults to 2000.
    pub male_sample: usize,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        BalanceOptions {
            seed: 0,
            male_sample: 2000,
        }
    }
}

/// Provenance recorded into the benchmark manifest.
#[derive(Debug, Clone)]
pub struct ManifestContext {
    pub lexicon_version: String,
    pub judge_model: String,
    pub created_at: String,
}

/// Which rule selected which ids; lets an external check rebuild the union
/// independently.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    /// (a) emotion ∈ {disgust, anger, fear}
    pub minority_emotion_ids: Vec<String>,
    /// (b) age ∈ {child, senior}
    pub minority_age_ids: Vec<String>,
    /// (c) stance = against
    pub stance_against_ids: Vec<String>,
    /// (d) seeded sample of male-labeled posts
    pub male_sample_ids: Vec<String>,
    pub male_available: usize,
    /// True when fewer male posts were available than requested.
    pub male_shortfall: bool,
}

fn is_minority_emotion(e: Emotion) -> bool {
    matches!(e, Emotion::Disgust | Emotion::Anger | Emotion::Fear)
}

fn is_minority_age(a: AgeGroup) -> bool {
    matches!(a, AgeGroup::Child | AgeGroup::Senior)
}

/// Builds the benchmark as the union (deduplicated by id) of the three
/// minority-class selections plus a seeded male down-sample.
///
/// Posts are deduplicated and sorted by id before sampling, so the output is
/// identical for any permutation of the input. Output posts are in id order.
pub fn balance(
    labeled: &[BenchmarkPost],
    opts: BalanceOptions,
    ctx: &ManifestContext,
) -> (Benchmark, BalanceReport) {
    // Canonical order: dedup by id (first occurrence wins), then sort.
    let mut seen = BTreeSet::new();
    let mut canonical: Vec<&BenchmarkPost> = labeled
        .iter()
        .filter(|p| seen.insert(p.id.as_str()))
        .collect();
    canonical.sort_by(|a, b| a.id.cmp(&b.id));

    let mut report = BalanceReport::default();
    for post in &canonical {
        if is_minority_emotion(post.labels.emotion) {
            report.minority_emotion_ids.push(post.id.clone());
        }
        if is_minority_age(post.labels.age) {
            report.minority_age_ids.push(post.id.clone());
        }
        if post.labels.stance == Stance::Against {
            report.stance_against_ids.push(post.id.clone());
        }
    }

    let males: Vec<&BenchmarkPost> = canonical
        .iter()
        .copied()
        .filter(|p| p.labels.gender == Gender::Male)
        .collect();
    report.male_available = males.len();
    report.male_shortfall = males.len() < opts.male_sample;
    let take = opts.male_sample.min(males.len());
    if take > 0 {
        let mut rng = derive_rng(opts.seed, "balance/male-sample");
        let mut picks = seeded_sample(&mut rng, males.len(), take);
        picks.sort_unstable();
        report.male_sample_ids = picks.iter().map(|&i| males[i].id.clone()).collect();
    }

    let selected: BTreeSet<&str> = report
        .minority_emotion_ids
        .iter()
        .chain(&report.minority_age_ids)
        .chain(&report.stance_against_ids)
        .chain(&report.male_sample_ids)
        .map(String::as_str)
        .collect();

    let posts: Vec<BenchmarkPost> = canonical
        .iter()
        .filter(|p| selected.contains(p.id.as_str()))
        .map(|p| (*p).clone())
        .collect();

    let manifest = Manifest {
        lexicon_version: ctx.lexicon_version.clone(),
        judge_model: ctx.judge_model.clone(),
        balance_seed: opts.seed,
        created_at: ctx.created_at.clone(),
        histograms: distribution_report(&posts),
        extra: Default::default(),
    };

    (Benchmark { posts, manifest }, report)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::{labels, post};
    use super::*;

    fn ctx() -> ManifestContext {
        ManifestContext {
            lexicon_version: "test".into(),
            judge_model: "mock-judge".into(),
            created_at: "1970-01-01T00:00:00Z".into(),
        }
    }

    fn majority() -> crate::judge::LabelSet {
        labels("positive", "happiness", "none", "teen", "female")
    }

    #[test]
    fn no_selector_match_yields_empty_benchmark() {
        let corpus: Vec<BenchmarkPost> =
            (0..10).map(|i| post(&format!("p{i}"), majority())).collect();
        let (bench, report) = balance(&corpus, BalanceOptions { seed: 1, male_sample: 2000 }, &ctx());
        assert!(bench.posts.is_empty());
        assert_eq!(report.male_available, 0);
        assert!(report.male_shortfall);
        assert!(bench.validate().is_ok());
    }

    #[test]
    fn union_covers_every_selector_once() {
        let corpus = vec![
            post("a", labels("positive", "disgust", "none", "teen", "female")),
            post("b", labels("positive", "happiness", "none", "senior", "female")),
            post("c", labels("positive", "happiness", "against", "teen", "female")),
            post("d", labels("positive", "happiness", "none", "teen", "male")),
            // matches emotion AND stance: must appear once
            post("e", labels("positive", "anger", "against", "teen", "female")),
        ];
        let (bench, report) = balance(&corpus, BalanceOptions { seed: 1, male_sample: 10 }, &ctx());
        let ids: Vec<&str> = bench.posts.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c", "d", "e"]);
        assert_eq!(report.male_sample_ids, vec!["d".to_string()]);
        assert_eq!(report.minority_emotion_ids, vec!["a".to_string(), "e".to_string()]);
    }

    #[test]
    fn male_sample_size_is_min_of_request_and_available() {
        let mut corpus: Vec<BenchmarkPost> = (0..40)
            .map(|i| post(&format!("m{i:02}"), labels("positive", "happiness", "none", "teen", "male")))
            .collect();
        corpus.push(post("x", majority()));
        let (bench, report) = balance(&corpus, BalanceOptions { seed: 9, male_sample: 10 }, &ctx());
        assert_eq!(report.male_sample_ids.len(), 10);
        assert_eq!(bench.posts.len(), 10);
        assert!(!report.male_shortfall);
        assert_eq!(report.male_available, 40);

        let (_, short) = balance(&corpus, BalanceOptions { seed: 9, male_sample: 100 }, &ctx());
        assert_eq!(short.male_sample_ids.len(), 40);
        assert!(short.male_shortfall);
    }

    #[test]
    fn output_is_invariant_to_input_shuffling() {
        let corpus: Vec<BenchmarkPost> = (0..60)
            .map(|i| {
                let gender = if i % 2 == 0 { "male" } else { "female" };
                let emotion = if i % 7 == 0 { "fear" } else { "happiness" };
                post(&format!("p{i:02}"), labels("positive", emotion, "none", "teen", gender))
            })
            .collect();
        let opts = BalanceOptions { seed: 42, male_sample: 12 };
        let (a, _) = balance(&corpus, opts, &ctx());

        let mut shuffled = corpus.clone();
        shuffled.reverse();
        shuffled.rotate_left(13);
        let (b, _) = balance(&shuffled, opts, &ctx());

        let ids_a: Vec<&str> = a.posts.iter().map(|p| p.id.as_str()).collect();
        let ids_b: Vec<&str> = b.posts.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids_a, ids_b);
    }

    #[test]
    fn different_seeds_draw_different_male_samples() {
        let corpus: Vec<BenchmarkPost> = (0..100)
            .map(|i| post(&format!("p{i:03}"), labels("positive", "happiness", "none", "teen", "male")))
            .collect();
        let (_, r1) = balance(&corpus, BalanceOptions { seed: 1, male_sample: 10 }, &ctx());
        let (_, r2) = balance(&corpus, BalanceOptions { seed: 2, male_sample: 10 }, &ctx());
        assert_ne!(r1.male_sample_ids, r2.male_sample_ids);
    }

    #[test]
    fn balance_is_idempotent_on_its_own_output() {
        let corpus: Vec<BenchmarkPost> = (0..80)
            .map(|i| {
                let gender = if i % 3 == 0 { "male" } else { "female" };
                let emotion = if i % 11 == 0 { "disgust" } else { "happiness" };
                let age = if i % 13 == 0 { "senior" } else { "adult" };
                post(&format!("p{i:02}"), labels("positive", emotion, "none", age, gender))
            })
            .collect();
        let opts = BalanceOptions { seed: 5, male_sample: 8 };
        let (first, r1) = balance(&corpus, opts, &ctx());
        let (second, r2) = balance(&first.posts, opts, &ctx());

        // Every minority-class post is selected again.
        assert_eq!(r1.minority_emotion_ids, r2.minority_emotion_ids);
        assert_eq!(r1.minority_age_ids, r2.minority_age_ids);
        assert_eq!(r1.stance_against_ids, r2.stance_against_ids);
        // The re-drawn male sample stays within the first output.
        let first_ids: BTreeSet<&str> = first.posts.iter().map(|p| p.id.as_str()).collect();
        assert!(r2.male_sample_ids.iter().all(|id| first_ids.contains(id.as_str())));
        // All second-round posts come from the first round.
        assert!(second.posts.iter().all(|p| first_ids.contains(p.id.as_str())));
    }

    #[test]
    fn every_output_post_satisfies_a_selection_rule() {
        let corpus: Vec<BenchmarkPost> = (0..50)
            .map(|i| {
                let gender = if i % 2 == 0 { "male" } else { "female" };
                let stance = if i % 9 == 0 { "against" } else { "none" };
                post(&format!("p{i:02}"), labels("positive", "happiness", stance, "teen", gender))
            })
            .collect();
        let (bench, report) = balance(&corpus, BalanceOptions { seed: 3, male_sample: 5 }, &ctx());
        let sampled: BTreeSet<&str> = report.male_sample_ids.iter().map(String::as_str).collect();
        for p in &bench.posts {
            let by_rule = is_minority_emotion(p.labels.emotion)
                || is_minority_age(p.labels.age)
                || p.labels.stance == Stance::Against
                || sampled.contains(p.id.as_str());
            assert!(by_rule, "post {} matches no rule", p.id);
        }
    }
}
