//! Provider-agnostic chat-completion access: prompt construction for the
//! recommendation strategies, response parsing into exactly three emojis,
//! the random baseline, retries, and the persistent response cache.

mod backend;
mod cache;
mod prompt;
mod recommend;

pub use backend::{
    complete_with_retry, BackendError, ChatBackend, ChatMessage, CompletionParams, HttpBackend,
    MockBackend, MockRule, RateLimiter,
};
pub use cache::{response_key, CacheKey, CachedResponse, ResponseCache};
pub use prompt::{build_prompt, default_exemplars, Exemplar};
pub use recommend::{derive_rng, parse_recommendation, random_baseline, recommend, seeded_sample};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emoji::Emoji;
use crate::judge::{AgeGroup, Gender};

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid model spec: {0}")]
    InvalidModelSpec(String),
    #[error("conditional strategy requires age and gender demographics")]
    MissingDemographics,
    #[error("few-shot strategy requires at least one exemplar")]
    NoExemplars,
}

/// One chat-completion endpoint and its sampling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub provider_id: String,
    pub model_name: String,
    /// Base URL of the OpenAI-compatible API, e.g. `https://api.openai.com/v1`.
    pub endpoint: String,
    pub temperature: f64,
    pub max_retries: u32,
}

impl ModelSpec {
    /// Checks the invariants needed before this model can back live calls.
    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.temperature < 0.0 || !self.temperature.is_finite() {
            return Err(GatewayError::InvalidModelSpec(format!(
                "temperature {} must be a finite non-negative number",
                self.temperature
            )));
        }
        let rest = self
            .endpoint
            .strip_prefix("https://")
            .or_else(|| self.endpoint.strip_prefix("http://"))
            .ok_or_else(|| {
                GatewayError::InvalidModelSpec(format!(
                    "endpoint {:?} must be an http(s) URL",
                    self.endpoint
                ))
            })?;
        if rest.is_empty() || rest.starts_with('/') {
            return Err(GatewayError::InvalidModelSpec(format!(
                "endpoint {:?} has no host",
                self.endpoint
            )));
        }
        Ok(())
    }

    /// Environment variable holding this provider's API key.
    pub fn api_key_env_var(&self) -> String {
        format!(
            "SEMPRES_API_KEY_{}",
            self.provider_id.to_uppercase().replace('-', "_")
        )
    }
}

/// How the recommendation prompt is built.
#[derive(Debug, Clone, PartialEq)]
pub enum PromptStrategy {
    ZeroShot,
    FewShot(Vec<Exemplar>),
    Conditional { age: AgeGroup, gender: Gender },
}

impl PromptStrategy {
    /// The five pinned exemplars.
    pub fn few_shot_default() -> Self {
        PromptStrategy::FewShot(default_exemplars())
    }

    pub fn conditional(age: Option<AgeGroup>, gender: Option<Gender>) -> Result<Self, GatewayError> {
        match (age, gender) {
            (Some(age), Some(gender)) => Ok(PromptStrategy::Conditional { age, gender }),
            _ => Err(GatewayError::MissingDemographics),
        }
    }

    pub fn kind(&self) -> StrategyKind {
        match self {
            PromptStrategy::ZeroShot => StrategyKind::ZeroShot,
            PromptStrategy::FewShot(_) => StrategyKind::FewShot,
            PromptStrategy::Conditional { .. } => StrategyKind::Conditional,
        }
    }
}

/// Strategy tag carried on every recommendation record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    ZeroShot,
    FewShot,
    Conditional,
    Random,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::ZeroShot => "zero_shot",
            StrategyKind::FewShot => "few_shot",
            StrategyKind::Conditional => "conditional",
            StrategyKind::Random => "random",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A successful recommendation: exactly three emojis for one post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub post_id: String,
    pub model: ModelSpec,
    pub strategy: StrategyKind,
    pub emojis: [Emoji; 3],
    pub raw_response: String,
    /// True when served from the response cache. Not persisted: output
    /// files must be byte-identical across cold and warm runs.
    #[serde(skip)]
    pub cached: bool,
}

/// A post excluded from scoring because no valid triple could be extracted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationFailure {
    pub post_id: String,
    pub strategy: StrategyKind,
    pub reason: String,
    pub attempts: u32,
}

/// Per-post result of the recommendation stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RecommendOutcome {
    Ok(Recommendation),
    Failed(RecommendationFailure),
}

impl RecommendOutcome {
    pub fn post_id(&self) -> &str {
        match self {
            RecommendOutcome::Ok(r) => &r.post_id,
            RecommendOutcome::Failed(f) => &f.post_id,
        }
    }

    pub fn as_ok(&self) -> Option<&Recommendation> {
        match self {
            RecommendOutcome::Ok(r) => Some(r),
            RecommendOutcome::Failed(_) => None,
        }
    }
}
