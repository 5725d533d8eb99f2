//! Unicode-correct emoji extraction, normalization, and comparison, plus the
//! pinned popularity lexicon used for corpus filtering and random baselines.

mod lexicon;
mod properties;
mod segment;

pub use lexicon::{contains_lexicon_emoji, EmojiLexicon, LexiconError};
pub use segment::{segment_emojis, segment_emojis_bytes, SegmentedText};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_segmentation::UnicodeSegmentation;

#[derive(Debug, Error)]
pub enum EmojiError {
    #[error("input is not valid UTF-8 at byte {0}")]
    InvalidEncoding(usize),
    #[error("{0:?} is not a single grapheme cluster")]
    NotSingleCluster(String),
    #[error("{0:?} is not an emoji cluster")]
    NotEmoji(String),
}

/// One emoji: a single extended grapheme cluster with emoji presentation.
///
/// ZWJ sequences, flags, keycaps, and skin-tone variants are each one
/// `Emoji`. Equality is code-point-sequence equality; apply [`normalize`]
/// first when comparing under a looser mode.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Emoji(String);

impl Emoji {
    pub fn new(s: &str) -> Result<Self, EmojiError> {
        let mut clusters = s.graphemes(true);
        match (clusters.next(), clusters.next()) {
            (Some(c), None) if c == s => {}
            _ => return Err(EmojiError::NotSingleCluster(s.to_string())),
        }
        if !properties::is_emoji_cluster(s) {
            return Err(EmojiError::NotEmoji(s.to_string()));
        }
        Ok(Emoji(s.to_string()))
    }

    /// Wraps a cluster the segmenter has already classified.
    pub(crate) fn from_cluster_unchecked(cluster: String) -> Self {
        Emoji(cluster)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn code_points(&self) -> impl Iterator<Item = char> + '_ {
        self.0.chars()
    }
}

impl fmt::Display for Emoji {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Emoji {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Emoji({}", self.0)?;
        for c in self.0.chars() {
            write!(f, " U+{:04X}", c as u32)?;
        }
        f.write_str(")")
    }
}

impl TryFrom<String> for Emoji {
    type Error = EmojiError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Emoji::new(&s)
    }
}

impl From<Emoji> for String {
    fn from(e: Emoji) -> String {
        e.0
    }
}

/// Equality mode for emoji comparison.
///
/// `Exact` compares fully-qualified code-point sequences. `Base` first strips
/// VS16 and skin-tone modifiers, so 👍🏽 and 👍 compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    Exact,
    Base,
}

/// Normalizes an emoji under the given mode. Idempotent in both modes.
pub fn normalize(e: &Emoji, mode: Normalization) -> Emoji {
    match mode {
        Normalization::Exact => e.clone(),
        Normalization::Base => {
            let stripped: String = e
                .code_points()
                .filter(|&c| c != properties::VS16 && !properties::is_skin_tone_modifier(c))
                .collect();
            if stripped.is_empty() {
                // A lone VS16/skin-tone cluster has no base form to reduce to.
                e.clone()
            } else {
                Emoji(stripped)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emoji(s: &str) -> Emoji {
        Emoji::new(s).unwrap()
    }

    #[test]
    fn new_rejects_multi_cluster_and_non_emoji() {
        assert!(matches!(Emoji::new("ab"), Err(EmojiError::NotSingleCluster(_))));
        assert!(matches!(Emoji::new("🎉🏆"), Err(EmojiError::NotSingleCluster(_))));
        assert!(matches!(Emoji::new("a"), Err(EmojiError::NotEmoji(_))));
        assert!(matches!(Emoji::new(""), Err(EmojiError::NotSingleCluster(_))));
        assert!(Emoji::new("👨‍👩‍👧").is_ok());
    }

    #[test]
    fn normalize_exact_is_identity() {
        let e = emoji("👍🏽");
        assert_eq!(normalize(&e, Normalization::Exact), e);
    }

    #[test]
    fn normalize_base_strips_skin_tone() {
        // 👍🏽 = U+1F44D U+1F3FD
        let toned = emoji("👍🏽");
        assert_eq!(normalize(&toned, Normalization::Base).as_str(), "👍");
    }

    #[test]
    fn normalize_base_strips_vs16() {
        // ❤️ = U+2764 U+FE0F → bare U+2764
        let heart = emoji("\u{2764}\u{FE0F}");
        assert_eq!(normalize(&heart, Normalization::Base).as_str(), "\u{2764}");
    }

    #[test]
    fn normalize_base_is_idempotent() {
        for s in ["👍🏽", "\u{2764}\u{FE0F}", "👨‍👩‍👧", "🇺🇸", "1\u{FE0F}\u{20E3}"] {
            let once = normalize(&emoji(s), Normalization::Base);
            let twice = normalize(&once, Normalization::Base);
            assert_eq!(once, twice, "not idempotent for {s:?}");
        }
    }

    #[test]
    fn serde_round_trip_validates() {
        let e = emoji("🎉");
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, "\"🎉\"");
        let back: Emoji = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<Emoji>("\"not emoji\"").is_err());
    }
}
