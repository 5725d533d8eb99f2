//! Corpus filtering: lexicon-emoji requirement, then duplicate removal.

use std::collections::HashSet;

use unicode_normalization::UnicodeNormalization;

use crate::emoji::{contains_lexicon_emoji, EmojiLexicon, Normalization};

use super::RawPost;

/// Keeps posts containing at least one lexicon emoji, then removes exact
/// raw-text duplicates (compared after Unicode NFC normalization), keeping
/// the first occurrence. Order is preserved. Filtering runs before
/// deduplication.
pub fn filter_corpus(posts: &[RawPost], lexicon: &EmojiLexicon, mode: Normalization) -> Vec<RawPost> {
    let mut seen: HashSet<String> = HashSet::new();
    posts
        .iter()
        .filter(|post| contains_lexicon_emoji(&post.raw_text, lexicon, mode))
        .filter(|post| seen.insert(post.raw_text.nfc().collect::<String>()))
        .cloned()
        .collect()
}
