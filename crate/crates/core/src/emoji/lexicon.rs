//! The pinned emoji popularity lexicon (rank-ordered, tab-separated file).

use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

use super::{normalize, segment_emojis, Emoji, Normalization};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Rank-ordered emoji list, immutable after load and shareable across
/// threads. Ranks are 1-based, unique, and contiguous.
#[derive(Debug, Clone)]
pub struct EmojiLexicon {
    entries: Vec<(Emoji, u32)>,
    exact: HashSet<Emoji>,
    base: HashSet<Emoji>,
    version: String,
}

impl EmojiLexicon {
    /// Loads a lexicon file: UTF-8 lines of `<rank>\t<emoji sequence>`,
    /// `#` comments. A `# version:` comment names the pinned revision.
    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let content = std::fs::read_to_string(path)?;
        Self::parse(&content)
    }

    pub fn parse(content: &str) -> Result<Self, LexiconError> {
        let format_err = |line: usize, message: String| LexiconError::Format { line, message };

        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        let mut version = String::from("unversioned");

        for (idx, raw) in content.lines().enumerate() {
            let line_no = idx + 1;
            if let Some(comment) = raw.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("version:") {
                    version = v.trim().to_string();
                }
                continue;
            }
            if raw.trim().is_empty() {
                continue;
            }
            let (rank_str, seq) = raw
                .split_once('\t')
                .ok_or_else(|| format_err(line_no, "expected `<rank>\\t<emoji>`".into()))?;
            let rank: u32 = rank_str
                .trim()
                .parse()
                .map_err(|_| format_err(line_no, format!("invalid rank {rank_str:?}")))?;
            let expected = entries.len() as u32 + 1;
            if rank != expected {
                return Err(format_err(
                    line_no,
                    format!("rank {rank} out of order, expected {expected}"),
                ));
            }
            let emoji = Emoji::new(seq.trim_end_matches(['\r']))
                .map_err(|e| format_err(line_no, e.to_string()))?;
            if !seen.insert(emoji.clone()) {
                return Err(format_err(line_no, format!("duplicate emoji {emoji}")));
            }
            entries.push((emoji, rank));
        }

        if entries.is_empty() {
            return Err(format_err(0, "lexicon is empty".into()));
        }

        let exact = entries.iter().map(|(e, _)| e.clone()).collect();
        let base = entries
            .iter()
            .map(|(e, _)| normalize(e, Normalization::Base))
            .collect();
        Ok(EmojiLexicon {
            entries,
            exact,
            base,
            version,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(Emoji, u32)] {
        &self.entries
    }

    /// Emoji at 0-based index (i.e. rank `index + 1`).
    pub fn get(&self, index: usize) -> Option<&Emoji> {
        self.entries.get(index).map(|(e, _)| e)
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Membership under the given equality mode.
    pub fn contains(&self, e: &Emoji, mode: Normalization) -> bool {
        match mode {
            Normalization::Exact => self.exact.contains(e),
            Normalization::Base => self.base.contains(&normalize(e, mode)),
        }
    }
}

/// True iff `text` contains at least one lexicon emoji under `mode`.
pub fn contains_lexicon_emoji(text: &str, lex: &EmojiLexicon, mode: Normalization) -> bool {
    segment_emojis(text)
        .emojis
        .iter()
        .any(|e| lex.contains(e, mode))
}
