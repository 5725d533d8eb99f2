//! Drawing recommendations: cache-aware backend calls parsed into exactly
//! three emojis, and the seeded random baseline.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

use crate::emoji::{segment_emojis, Emoji, EmojiLexicon};

use super::{
    build_prompt, response_key, CachedResponse, ChatBackend, ChatMessage, CompletionParams,
    ModelSpec, PromptStrategy, Recommendation, RecommendationFailure, RecommendOutcome,
    ResponseCache,
};

/// Extracts the first three emoji clusters from a model response. Lenient:
/// any surrounding prose is ignored, only the cluster count matters.
pub fn parse_recommendation(response: &str) -> Option<[Emoji; 3]> {
    let mut emojis = segment_emojis(response).emojis;
    if emojis.len() < 3 {
        return None;
    }
    emojis.truncate(3);
    let [a, b, c]: [Emoji; 3] = emojis.try_into().ok()?;
    Some([a, b, c])
}

/// Requests three emojis for one post.
///
/// Attempt `i` is keyed into the cache as `(model, temperature, prompt, i)`;
/// a cache hit replays the stored raw response. Parse failures advance the
/// attempt index (drawing a fresh completion), transport failures retry the
/// same attempt. After `max_retries + 1` attempts the post is reported as a
/// failure record, not an error: the caller counts it and keeps going.
pub fn recommend(
    post_id: &str,
    text: &str,
    model: &ModelSpec,
    strategy: &PromptStrategy,
    backend: &dyn ChatBackend,
    cache: &ResponseCache,
) -> RecommendOutcome {
    let prompt = match build_prompt(text, strategy) {
        Ok(p) => p,
        Err(e) => {
            return RecommendOutcome::Failed(RecommendationFailure {
                post_id: post_id.to_string(),
                strategy: strategy.kind(),
                reason: e.to_string(),
                attempts: 0,
            })
        }
    };
    let params = CompletionParams {
        temperature: model.temperature,
        max_tokens: None,
    };
    let messages = [ChatMessage::user(prompt.clone())];

    let mut last_reason = String::new();
    for attempt in 0..=model.max_retries {
        let key = response_key(&model.model_name, model.temperature, &prompt, attempt);
        let (raw, from_cache) = match cache.get(&key) {
            Some(hit) => (hit.raw_response, true),
            None => {
                match super::complete_with_retry(
                    backend,
                    &model.model_name,
                    &messages,
                    &params,
                    model.max_retries,
                ) {
                    Ok(raw) => {
                        let entry = CachedResponse {
                            raw_response: raw.clone(),
                            timestamp: chrono::Utc::now().to_rfc3339(),
                            params: serde_json::json!({
                                "model": model.model_name,
                                "temperature": model.temperature,
                                "attempt": attempt,
                            }),
                        };
                        // A failed write only costs a re-bill on resume.
                        let _ = cache.put(&key, &entry);
                        (raw, false)
                    }
                    // Transport exhaustion or a permanent error: further
                    // attempt indices would hit the same backend, so record
                    // the failure with its cause and move on.
                    Err(e) => {
                        return RecommendOutcome::Failed(RecommendationFailure {
                            post_id: post_id.to_string(),
                            strategy: strategy.kind(),
                            reason: e.to_string(),
                            attempts: attempt + 1,
                        })
                    }
                }
            }
        };

        match parse_recommendation(&raw) {
            Some(emojis) => {
                return RecommendOutcome::Ok(Recommendation {
                    post_id: post_id.to_string(),
                    model: model.clone(),
                    strategy: strategy.kind(),
                    emojis,
                    raw_response: raw,
                    cached: from_cache,
                })
            }
            None => {
                last_reason = format!(
                    "fewer than 3 emojis in response {:?}",
                    raw.chars().take(80).collect::<String>()
                );
            }
        }
    }

    RecommendOutcome::Failed(RecommendationFailure {
        post_id: post_id.to_string(),
        strategy: strategy.kind(),
        reason: last_reason,
        attempts: model.max_retries + 1,
    })
}

/// Draws `count` distinct indices from `0..n` with a partial Fisher-Yates
/// shuffle. Self-contained so pinned test values survive RNG library
/// upgrades.
pub fn seeded_sample(rng: &mut ChaCha12Rng, n: usize, count: usize) -> Vec<usize> {
    let count = count.min(n);
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = i + uniform_below(rng, (n - i) as u64) as usize;
        indices.swap(i, j);
    }
    indices.truncate(count);
    indices
}

/// Unbiased integer in `0..bound` via rejection sampling.
fn uniform_below(rng: &mut ChaCha12Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

/// RNG streams are derived per `(seed, label)` so each post (or pipeline
/// stage) gets an independent, reproducible stream.
pub fn derive_rng(seed: u64, label: &str) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha12Rng::from_seed(key)
}

/// The random baseline: three lexicon emojis drawn uniformly without
/// replacement, seeded per `(seed, post_id)` so a whole corpus reproduces.
pub fn random_baseline(post_id: &str, lexicon: &EmojiLexicon, seed: u64) -> Recommendation {
    assert!(lexicon.size() >= 3, "random baseline needs a lexicon of at least 3 emojis");
    let mut rng = derive_rng(seed, post_id);
    let picks = seeded_sample(&mut rng, lexicon.size(), 3);
    let emojis: Vec<Emoji> = picks
        .iter()
        .map(|&i| lexicon.get(i).unwrap().clone())
        .collect();
    let raw_response: String = emojis.iter().map(|e| e.as_str()).collect();
    let [a, b, c]: [Emoji; 3] = emojis.try_into().unwrap();

    Recommendation {
        post_id: post_id.to_string(),
        model: ModelSpec {
            provider_id: "random".into(),
            model_name: "random-baseline".into(),
            endpoint: String::new(),
            temperature: 0.0,
            max_retries: 0,
        },
        strategy: super::StrategyKind::Random,
        emojis: [a, b, c],
        raw_response,
        cached: false,
    }
}
