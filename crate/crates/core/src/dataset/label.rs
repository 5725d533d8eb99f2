//! Judge-labeling the filtered corpus, with bounded concurrent fan-out and
//! deterministic commit order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::emoji::segment_emojis;
use crate::gateway::{ChatBackend, ModelSpec, ResponseCache};
use crate::judge::{label_all, JudgeError, LabelAllOutcome};

use super::{BenchmarkPost, DatasetError, RawPost};

#[derive(Debug, Clone, Copy)]
pub struct LabelingOptions {
    /// Upper bound on in-flight judge requests.
    pub concurrency: usize,
}

impl Default for LabelingOptions {
    fn default() -> Self {
        LabelingOptions { concurrency: 4 }
    }
}

/// A post removed during labeling, with the reason recorded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedPost {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    pub posts: Vec<BenchmarkPost>,
    pub dropped: Vec<DroppedPost>,
}

/// Labels every post on all five tasks over its raw text (emojis included,
/// original positions). Posts with any INVALID verdict are dropped with the
/// reason; a backend failure aborts with the completed prefix so the run can
/// resume through the cache.
pub fn label_corpus(
    posts: &[RawPost],
    judge_model: &ModelSpec,
    backend: &dyn ChatBackend,
    cache: &ResponseCache,
    opts: LabelingOptions,
) -> Result<LabeledCorpus, DatasetError> {
    let mut initial: Vec<Option<Result<LabelAllOutcome, JudgeError>>> =
        Vec::with_capacity(posts.len());
    initial.resize_with(posts.len(), || None);
    let slots = Mutex::new(initial);
    let next = AtomicUsize::new(0);
    let workers = opts.concurrency.clamp(1, posts.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= posts.len() {
                    break;
                }
                let outcome = label_all(&posts[i].raw_text, judge_model, backend, cache);
                slots.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    let mut labeled = Vec::new();
    let mut dropped = Vec::new();
    let results = slots.into_inner().unwrap();
    for (post, slot) in posts.iter().zip(results) {
        match slot.expect("worker filled every slot") {
            Ok(outcome) => match outcome.labels {
                Some(labels) => {
                    let seg = segment_emojis(&post.raw_text);
                    if seg.emojis.is_empty() {
                        dropped.push(DroppedPost {
                            id: post.id.clone(),
                            reason: "no emojis in raw text".into(),
                        });
                        continue;
                    }
                    labeled.push(BenchmarkPost {
                        id: post.id.clone(),
                        text: seg.plain_text,
                        emojis: seg.emojis,
                        labels,
                    });
                }
                None => {
                    let tasks: Vec<&str> =
                        outcome.invalid_tasks().iter().map(|t| t.name()).collect();
                    dropped.push(DroppedPost {
                        id: post.id.clone(),
                        reason: format!("INVALID verdict on {}", tasks.join(", ")),
                    });
                }
            },
            Err(e) => {
                return Err(DatasetError::PartialRun {
                    completed: labeled,
                    dropped,
                    failed_id: post.id.clone(),
                    message: e.to_string(),
                })
            }
        }
    }

    Ok(LabeledCorpus {
        posts: labeled,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{BackendError, ChatMessage, CompletionParams, MockBackend, MockRule};

    fn judge_model() -> ModelSpec {
        ModelSpec {
            provider_id: "mock".into(),
            model_name: "mock-judge".into(),
            endpoint: "https://mock.invalid/v1".into(),
            temperature: 0.0,
            max_retries: 0,
        }
    }

    fn full_rules() -> Vec<MockRule> {
        vec![
            MockRule { contains: vec!["sentiment".into()], reply: "positive".into() },
            MockRule { contains: vec!["emotion".into()], reply: "happiness".into() },
            MockRule { contains: vec!["stance".into()], reply: "none".into() },
            MockRule { contains: vec!["age".into()], reply: "teen".into() },
            MockRule { contains: vec!["gender".into()], reply: "female".into() },
        ]
    }

    fn raw(id: &str, text: &str) -> RawPost {
        RawPost { id: id.into(), raw_text: text.into(), source_meta: Default::default() }
    }

    #[test]
    fn labels_posts_and_splits_text_from_emojis() {
        let backend = MockBackend::new(full_rules());
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let posts = vec![raw("a", "hello 😂"), raw("b", "world 👍")];
        let out = label_corpus(&posts, &judge_model(), &backend, &cache, Default::default())
            .unwrap();
        assert_eq!(out.posts.len(), 2);
        assert_eq!(out.posts[0].text, "hello");
        assert_eq!(out.posts[0].emojis[0].as_str(), "😂");
        assert_eq!(out.posts[0].labels.get(crate::judge::Task::Sentiment), "positive");
        assert!(out.dropped.is_empty());
    }

    #[test]
    fn invalid_verdict_drops_post_with_reason() {
        let mut rules = full_rules();
        // emotion rule answers something un-canonicalizable for post "b"
        rules.insert(
            0,
            MockRule {
                contains: vec!["emotion".into(), "weird".into()],
                reply: "joyful".into(),
            },
        );
        let backend = MockBackend::new(rules);
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let posts = vec![raw("a", "hello 😂"), raw("b", "weird 👍")];
        let out = label_corpus(&posts, &judge_model(), &backend, &cache, Default::default())
            .unwrap();
        assert_eq!(out.posts.len(), 1);
        assert_eq!(out.dropped.len(), 1);
        assert_eq!(out.dropped[0].id, "b");
        assert!(out.dropped[0].reason.contains("emotion"));
    }

    #[test]
    fn empty_input_is_empty_output() {
        let backend = MockBackend::new(vec![]);
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let out = label_corpus(&[], &judge_model(), &backend, &cache, Default::default()).unwrap();
        assert!(out.posts.is_empty());
        assert!(out.dropped.is_empty());
    }

    #[test]
    fn emoji_free_post_is_dropped_not_fatal() {
        let backend = MockBackend::new(full_rules());
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let out = label_corpus(
            &[raw("a", "no emoji at all")],
            &judge_model(),
            &backend,
            &cache,
            Default::default(),
        )
        .unwrap();
        assert!(out.posts.is_empty());
        assert_eq!(out.dropped[0].reason, "no emojis in raw text");
    }

    #[test]
    fn backend_failure_returns_partial_run_with_prefix() {
        // Backend that answers post "a" but dies on post "b".
        struct Half(MockBackend);
        impl ChatBackend for Half {
            fn complete(
                &self,
                model: &str,
                messages: &[ChatMessage],
                params: &CompletionParams,
            ) -> Result<String, BackendError> {
                if messages[0].content.contains("kaboom") {
                    return Err(BackendError::Auth("down".into()));
                }
                self.0.complete(model, messages, params)
            }
        }
        let backend = Half(MockBackend::new(full_rules()));
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let posts = vec![raw("a", "fine 😂"), raw("b", "kaboom 😂"), raw("c", "also fine 😂")];
        let err = label_corpus(&posts, &judge_model(), &backend, &cache, LabelingOptions { concurrency: 1 })
            .unwrap_err();
        match err {
            DatasetError::PartialRun { completed, failed_id, .. } => {
                assert_eq!(completed.len(), 1);
                assert_eq!(completed[0].id, "a");
                assert_eq!(failed_id, "b");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn interrupted_run_resumes_from_cache_without_rebilling() {
        struct Dying {
            inner: MockBackend,
            poisoned: bool,
        }
        impl ChatBackend for Dying {
            fn complete(
                &self,
                model: &str,
                messages: &[ChatMessage],
                params: &CompletionParams,
            ) -> Result<String, BackendError> {
                if self.poisoned && messages[0].content.contains("later") {
                    return Err(BackendError::Auth("outage".into()));
                }
                self.inner.complete(model, messages, params)
            }
        }

        let dir = tempfile::tempdir().unwrap();
        let posts = vec![raw("a", "early 😂"), raw("b", "later 😂"), raw("c", "later still 😂")];
        let opts = LabelingOptions { concurrency: 1 };

        let cache = ResponseCache::open(dir.path()).unwrap();
        let broken = Dying { inner: MockBackend::new(full_rules()), poisoned: true };
        let err = label_corpus(&posts, &judge_model(), &broken, &cache, opts).unwrap_err();
        assert!(matches!(err, DatasetError::PartialRun { ref failed_id, .. } if failed_id == "b"));

        // Post "a" is fully cached (5 tasks x 3 votes); the resumed run bills
        // only the remaining posts.
        let cache = ResponseCache::open(dir.path()).unwrap();
        let healthy = Dying { inner: MockBackend::new(full_rules()), poisoned: false };
        let out = label_corpus(&posts, &judge_model(), &healthy, &cache, opts).unwrap();
        assert_eq!(out.posts.len(), 3);
        let (hits, misses) = cache.stats();
        assert_eq!(hits, 15, "the completed prefix must replay from cache");
        assert_eq!(misses, 30);
    }

    #[test]
    fn concurrent_fanout_commits_in_input_order() {
        let backend = MockBackend::new(full_rules());
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let posts: Vec<RawPost> =
            (0..25).map(|i| raw(&format!("p{i:02}"), &format!("text {i} 😂"))).collect();
        let out = label_corpus(
            &posts,
            &judge_model(),
            &backend,
            &cache,
            LabelingOptions { concurrency: 8 },
        )
        .unwrap();
        let ids: Vec<&str> = out.posts.iter().map(|p| p.id.as_str()).collect();
        let expected: Vec<String> = (0..25).map(|i| format!("p{i:02}")).collect();
        assert_eq!(ids, expected.iter().map(String::as_str).collect::<Vec<_>>());
    }
}
