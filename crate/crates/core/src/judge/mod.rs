//! The downstream-task classifier: five fixed classification tasks judged by
//! an LLM at temperature 0 with triple-query majority voting.

mod classify;
mod sensitivity;

pub use classify::{classify, judge_prompt, label_all, JudgeError, LabelAllOutcome};
pub use sensitivity::{
    compose_with_emojis, sensitivity_experiment, ExcludedPost, SensitivityError,
    SensitivityOptions, SensitivityPost, SensitivityReport,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The five downstream classification tasks used as semantic probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Sentiment,
    Emotion,
    Stance,
    Age,
    Gender,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::Sentiment,
        Task::Emotion,
        Task::Stance,
        Task::Age,
        Task::Gender,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Sentiment => "sentiment",
            Task::Emotion => "emotion",
            Task::Stance => "stance",
            Task::Age => "age",
            Task::Gender => "gender",
        }
    }

    /// The closed, lowercase class list for this task.
    pub fn classes(self) -> &'static [&'static str] {
        match self {
            Task::Sentiment => &["positive", "negative", "neutral"],
            Task::Emotion => &["happiness", "sadness", "fear", "anger", "surprise", "disgust"],
            Task::Stance => &["favor", "none", "against"],
            Task::Age => &["child", "teen", "adult", "senior"],
            Task::Gender => &["male", "female"],
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! label_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(()),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

label_enum!(Sentiment { Positive => "positive", Negative => "negative", Neutral => "neutral" });
label_enum!(Emotion {
    Happiness => "happiness",
    Sadness => "sadness",
    Fear => "fear",
    Anger => "anger",
    Surprise => "surprise",
    Disgust => "disgust",
});
label_enum!(Stance { Favor => "favor", None => "none", Against => "against" });
label_enum!(AgeGroup { Child => "child", Teen => "teen", Adult => "adult", Senior => "senior" });
label_enum!(Gender { Male => "male", Female => "female" });

/// One label per task; complete and valid by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelSet {
    pub sentiment: Sentiment,
    pub emotion: Emotion,
    pub stance: Stance,
    pub age: AgeGroup,
    pub gender: Gender,
}

impl LabelSet {
    /// Canonical class name of this set's label for `task`.
    pub fn get(&self, task: Task) -> &'static str {
        match task {
            Task::Sentiment => self.sentiment.as_str(),
            Task::Emotion => self.emotion.as_str(),
            Task::Stance => self.stance.as_str(),
            Task::Age => self.age.as_str(),
            Task::Gender => self.gender.as_str(),
        }
    }

    /// Builds a complete set from five task verdicts; `None` when any task
    /// is missing or INVALID.
    pub fn from_verdicts(verdicts: &[JudgeVerdict]) -> Option<LabelSet> {
        let find = |task: Task| -> Option<&str> {
            verdicts
                .iter()
                .find(|v| v.task == task)
                .and_then(|v| v.label.as_valid())
        };
        Some(LabelSet {
            sentiment: find(Task::Sentiment)?.parse().ok()?,
            emotion: find(Task::Emotion)?.parse().ok()?,
            stance: find(Task::Stance)?.parse().ok()?,
            age: find(Task::Age)?.parse().ok()?,
            gender: find(Task::Gender)?.parse().ok()?,
        })
    }
}

/// A vote or verdict outcome: a valid class name, or INVALID.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum JudgeLabel {
    Valid(String),
    Invalid,
}

impl JudgeLabel {
    pub fn as_valid(&self) -> Option<&str> {
        match self {
            JudgeLabel::Valid(s) => Some(s),
            JudgeLabel::Invalid => None,
        }
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, JudgeLabel::Invalid)
    }
}

impl From<String> for JudgeLabel {
    fn from(s: String) -> Self {
        if s == "INVALID" {
            JudgeLabel::Invalid
        } else {
            JudgeLabel::Valid(s)
        }
    }
}

impl From<JudgeLabel> for String {
    fn from(l: JudgeLabel) -> String {
        match l {
            JudgeLabel::Valid(s) => s,
            JudgeLabel::Invalid => "INVALID".to_string(),
        }
    }
}

impl fmt::Display for JudgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JudgeLabel::Valid(s) => f.write_str(s),
            JudgeLabel::Invalid => f.write_str("INVALID"),
        }
    }
}

/// Majority-vote result for one (text, task) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub task: Task,
    pub label: JudgeLabel,
    /// The three canonicalized responses, in query order.
    pub votes: Vec<JudgeLabel>,
    pub unanimous: bool,
}

/// Lowercases, trims whitespace and trailing punctuation, applies the
/// `joy → happiness` synonym, then tests membership in the task's classes.
pub fn canonicalize_label(raw: &str, task: Task) -> JudgeLabel {
    let lowered = raw.to_lowercase();
    let trimmed = lowered
        .trim()
        .trim_end_matches(|c: char| c.is_ascii_punctuation())
        .trim_end();
    let mapped = if trimmed == "joy" { "happiness" } else { trimmed };
    match task.classes().iter().find(|c| **c == mapped) {
        Some(class) => JudgeLabel::Valid((*class).to_string()),
        None => JudgeLabel::Invalid,
    }
}
