//! Triple-query majority voting over a chat backend at temperature 0.

use thiserror::Error;

use crate::gateway::{
    complete_with_retry, response_key, BackendError, CachedResponse, ChatBackend, ChatMessage,
    CompletionParams, ModelSpec, ResponseCache,
};

use super::{canonicalize_label, JudgeLabel, JudgeVerdict, LabelSet, Task};

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("judge backend failed on task {task}: {source}")]
    Backend {
        task: Task,
        #[source]
        source: BackendError,
    },
}

/// Renders the classification instruction for one task.
///
/// The sentiment and gender wordings are fixed reference prompts; the
/// remaining tasks reuse the matching sentence frame with their own class
/// lists (tweet-property frame for emotion and stance, author-profile frame
/// for age).
pub fn judge_prompt(task: Task, text: &str) -> String {
    match task {
        Task::Sentiment => format!(
            "I will provide you a tweet. Please classify the sentiment of the tweet as \
             positive, negative, or neutral. Please only output the answer without \
             justification. Here is the tweet:{text}"
        ),
        Task::Emotion => format!(
            "I will provide you a tweet. Please classify the emotion of the tweet as \
             happiness, sadness, fear, anger, surprise, or disgust. Please only output the \
             answer without justification. Here is the tweet:{text}"
        ),
        Task::Stance => format!(
            "I will provide you a tweet. Please classify the stance of the tweet as \
             favor, none, or against. Please only output the answer without justification. \
             Here is the tweet:{text}"
        ),
        Task::Age => format!(
            "I will provide you a tweet. Please classify the likely age of the person who \
             wrote the tweet as 'child', 'teen', 'adult', or 'senior'. Please only output \
             the answer without justification. Here is the tweet: {text}"
        ),
        Task::Gender => format!(
            "I will provide you a tweet. Please classify the likely gender of the person \
             who wrote the tweet as 'male' or 'female'. Please only output the answer \
             without justification. Here is the tweet: {text}"
        ),
    }
}

/// Queries the judge three times and returns the majority label.
///
/// Each vote is cached under its own attempt index. A label needs at least
/// two votes to win; a three-way split is INVALID rather than re-queried,
/// since disagreement at temperature 0 signals genuine instability.
pub fn classify(
    text: &str,
    task: Task,
    model: &ModelSpec,
    backend: &dyn ChatBackend,
    cache: &ResponseCache,
) -> Result<JudgeVerdict, JudgeError> {
    let prompt = judge_prompt(task, text);
    let params = CompletionParams {
        temperature: model.temperature,
        max_tokens: None,
    };
    let messages = [ChatMessage::user(prompt.clone())];

    let mut votes = Vec::with_capacity(3);
    for attempt in 0..3u32 {
        let key = response_key(&model.model_name, model.temperature, &prompt, attempt);
        let raw = match cache.get(&key) {
            Some(hit) => hit.raw_response,
            None => {
                let raw = complete_with_retry(
                    backend,
                    &model.model_name,
                    &messages,
                    &params,
                    model.max_retries,
                )
                .map_err(|source| JudgeError::Backend { task, source })?;
                let _ = cache.put(
                    &key,
                    &CachedResponse {
                        raw_response: raw.clone(),
                        timestamp: chrono::Utc::now().to_rfc3339(),
                        params: serde_json::json!({
                            "model": model.model_name,
                            "temperature": model.temperature,
                            "attempt": attempt,
                        }),
                    },
                );
                raw
            }
        };
        votes.push(canonicalize_label(&raw, task));
    }

    Ok(verdict_from_votes(task, votes))
}

/// Majority rule over exactly three canonicalized votes.
fn verdict_from_votes(task: Task, votes: Vec<JudgeLabel>) -> JudgeVerdict {
    let unanimous = votes[1] == votes[0] && votes[2] == votes[0];
    let majority = if votes[1] == votes[0] || votes[2] == votes[0] {
        votes[0].clone()
    } else if votes[2] == votes[1] {
        votes[1].clone()
    } else {
        JudgeLabel::Invalid
    };
    JudgeVerdict {
        task,
        label: majority,
        votes,
        unanimous,
    }
}

/// Verdicts for all five tasks over the same text, plus the assembled
/// LabelSet when every task produced a valid label.
#[derive(Debug, Clone)]
pub struct LabelAllOutcome {
    pub verdicts: Vec<JudgeVerdict>,
    pub labels: Option<LabelSet>,
}

impl LabelAllOutcome {
    /// Names of tasks whose verdict is INVALID.
    pub fn invalid_tasks(&self) -> Vec<Task> {
        self.verdicts
            .iter()
            .filter(|v| v.label.is_invalid())
            .map(|v| v.task)
            .collect()
    }
}

/// Classifies `text` on all five tasks. The text must already carry its
/// emojis (original or recommended).
pub fn label_all(
    text: &str,
    model: &ModelSpec,
    backend: &dyn ChatBackend,
    cache: &ResponseCache,
) -> Result<LabelAllOutcome, JudgeError> {
    let mut verdicts = Vec::with_capacity(5);
    for task in Task::ALL {
        verdicts.push(classify(text, task, model, backend, cache)?);
    }
    let labels = LabelSet::from_verdicts(&verdicts);
    Ok(LabelAllOutcome { verdicts, labels })
}
