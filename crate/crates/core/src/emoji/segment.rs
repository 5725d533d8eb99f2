//! Splitting a post into its plain text and its emoji clusters.

use unicode_segmentation::UnicodeSegmentation;

use super::properties::is_emoji_cluster;
use super::{Emoji, EmojiError};

/// A post split into plain text and emojis.
///
/// `spans` are byte ranges of each removed cluster in the original string;
/// [`SegmentedText::reconstruct`] splices the emojis back for a byte-exact
/// round trip. `plain_text` is the residual with the whitespace around each
/// removed cluster collapsed to one space and the ends trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedText {
    pub plain_text: String,
    pub emojis: Vec<Emoji>,
    pub spans: Vec<std::ops::Range<usize>>,
    /// Raw gap strings between clusters (`emojis.len() + 1` entries).
    segments: Vec<String>,
}

impl SegmentedText {
    /// Rebuilds the original string byte-for-byte.
    pub fn reconstruct(&self) -> String {
        let mut out = self.segments[0].clone();
        for (emoji, seg) in self.emojis.iter().zip(&self.segments[1..]) {
            out.push_str(emoji.as_str());
            out.push_str(seg);
        }
        out
    }
}

/// Extracts every maximal emoji grapheme cluster from `text`, in document
/// order. ZWJ sequences, variation selectors, skin tones, flags, and keycaps
/// stay intact as single clusters.
pub fn segment_emojis(text: &str) -> SegmentedText {
    let mut emojis = Vec::new();
    let mut spans = Vec::new();
    let mut segments = Vec::new();
    let mut gap = String::new();

    for (offset, cluster) in text.grapheme_indices(true) {
        if is_emoji_cluster(cluster) {
            emojis.push(Emoji::from_cluster_unchecked(cluster.to_string()));
            spans.push(offset..offset + cluster.len());
            segments.push(std::mem::take(&mut gap));
        } else {
            gap.push_str(cluster);
        }
    }
    segments.push(gap);

    SegmentedText {
        plain_text: collapse_gaps(&segments),
        emojis,
        spans,
        segments,
    }
}

/// Byte-slice entry point for callers that have not validated their input.
pub fn segment_emojis_bytes(bytes: &[u8]) -> Result<SegmentedText, EmojiError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| EmojiError::InvalidEncoding(e.valid_up_to()))?;
    Ok(segment_emojis(text))
}

/// Joins the inter-cluster gaps, collapsing whitespace that surrounded a
/// removed cluster to a single space, then trims the ends.
fn collapse_gaps(segments: &[String]) -> String {
    let mut out = segments[0].clone();
    for seg in &segments[1..] {
        let trimmed_end = out.trim_end().len();
        let had_ws = trimmed_end < out.len() || seg.starts_with(char::is_whitespace);
        if had_ws {
            out.truncate(trimmed_end);
            out.push(' ');
            out.push_str(seg.trim_start());
        } else {
            out.push_str(seg);
        }
    }
    out.trim().to_string()
}
