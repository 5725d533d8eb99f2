//! Property tests for corpus filtering and benchmark balancing over
//! randomized corpora.

use std::collections::BTreeSet;

use proptest::prelude::*;

use sempres_core::dataset::{balance, filter_corpus, BalanceOptions, BenchmarkPost, ManifestContext, RawPost};
use sempres_core::emoji::{Emoji, EmojiLexicon, Normalization};
use sempres_core::judge::{LabelSet, Task};

fn ctx() -> ManifestContext {
    ManifestContext {
        lexicon_version: "test".into(),
        judge_model: "mock".into(),
        created_at: "1970-01-01T00:00:00Z".into(),
    }
}

fn label_set() -> impl Strategy<Value = LabelSet> {
    let pick = |task: Task| {
        (0..task.classes().len()).prop_map(move |i| task.classes()[i].to_string())
    };
    (
        pick(Task::Sentiment),
        pick(Task::Emotion),
        pick(Task::Stance),
        pick(Task::Age),
        pick(Task::Gender),
    )
        .prop_map(|(s, e, st, a, g)| LabelSet {
            sentiment: s.parse().unwrap(),
            emotion: e.parse().unwrap(),
            stance: st.parse().unwrap(),
            age: a.parse().unwrap(),
            gender: g.parse().unwrap(),
        })
}

fn corpus(max: usize) -> impl Strategy<Value = Vec<BenchmarkPost>> {
    proptest::collection::vec(label_set(), 0..max).prop_map(|labels| {
        labels
            .into_iter()
            .enumerate()
            .map(|(i, labels)| BenchmarkPost {
                id: format!("p{i:03}"),
                text: format!("text {i}"),
                emojis: vec![Emoji::new("😂").unwrap()],
                labels,
            })
            .collect()
    })
}

fn matches_a_rule(post: &BenchmarkPost, sampled: &BTreeSet<String>) -> bool {
    matches!(post.labels.get(Task::Emotion), "disgust" | "anger" | "fear")
        || matches!(post.labels.get(Task::Age), "child" | "senior")
        || post.labels.get(Task::Stance) == "against"
        || sampled.contains(&post.id)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balance_output_satisfies_selection_rules(
        posts in corpus(120),
        seed in 0u64..1000,
        male_sample in 0usize..60,
    ) {
        let (bench, report) = balance(&posts, BalanceOptions { seed, male_sample }, &ctx());
        let sampled: BTreeSet<String> = report.male_sample_ids.iter().cloned().collect();
        prop_assert_eq!(sampled.len(), report.male_sample_ids.len());
        prop_assert_eq!(report.male_sample_ids.len(), male_sample.min(report.male_available));
        for post in &bench.posts {
            prop_assert!(matches_a_rule(post, &sampled), "{} matches no rule", post.id);
        }
        prop_assert!(bench.validate().is_ok());
    }

    #[test]
    fn balance_is_idempotent_and_shuffle_invariant(
        posts in corpus(120),
        seed in 0u64..1000,
        male_sample in 0usize..60,
        rotate in 0usize..120,
    ) {
        let opts = BalanceOptions { seed, male_sample };
        let (first, r1) = balance(&posts, opts, &ctx());
        let first_ids: BTreeSet<&str> = first.posts.iter().map(|p| p.id.as_str()).collect();

        // Shuffle invariance: same members for any input permutation.
        let mut shuffled = posts.clone();
        shuffled.reverse();
        if !shuffled.is_empty() {
            let r = rotate % shuffled.len();
            shuffled.rotate_left(r);
        }
        let (again, _) = balance(&shuffled, opts, &ctx());
        prop_assert_eq!(
            first.posts.iter().map(|p| &p.id).collect::<Vec<_>>(),
            again.posts.iter().map(|p| &p.id).collect::<Vec<_>>()
        );

        // Idempotence: re-balancing the output selects every minority post
        // again, and the male sample stays inside the first output.
        let (second, r2) = balance(&first.posts, opts, &ctx());
        prop_assert_eq!(&r1.minority_emotion_ids, &r2.minority_emotion_ids);
        prop_assert_eq!(&r1.minority_age_ids, &r2.minority_age_ids);
        prop_assert_eq!(&r1.stance_against_ids, &r2.stance_against_ids);
        for id in &r2.male_sample_ids {
            prop_assert!(first_ids.contains(id.as_str()));
        }
        for post in &second.posts {
            prop_assert!(first_ids.contains(post.id.as_str()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn filter_is_idempotent_and_duplicate_free(
        texts in proptest::collection::vec(
            prop_oneof![
                Just("love it 😂".to_string()),
                Just("plain text".to_string()),
                Just("other 😂 text".to_string()),
                Just("outside 🐌 lexicon".to_string()),
                "[a-z ]{0,20}",
            ],
            0..40,
        )
    ) {
        let lexicon = EmojiLexicon::parse("1\t😂\n2\t❤️\n").unwrap();
        let posts: Vec<RawPost> = texts
            .into_iter()
            .enumerate()
            .map(|(i, raw_text)| RawPost {
                id: format!("p{i}"),
                raw_text: if raw_text.is_empty() { "x".into() } else { raw_text },
                source_meta: Default::default(),
            })
            .collect();
        let once = filter_corpus(&posts, &lexicon, Normalization::Exact);
        let twice = filter_corpus(&once, &lexicon, Normalization::Exact);
        prop_assert_eq!(&once, &twice);

        let texts: BTreeSet<&str> = once.iter().map(|p| p.raw_text.as_str()).collect();
        prop_assert_eq!(texts.len(), once.len(), "duplicates survived");
    }
}
