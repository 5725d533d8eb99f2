//! Core library for the semantics-preserving emoji recommendation harness.
//!
//! The pipeline evaluates whether emojis recommended for a social-media post
//! keep the post's inferred meaning intact: an LLM judge labels the post with
//! its original emojis and again with the recommended ones, across five
//! classification tasks (sentiment, emotion, stance, age, gender), and the
//! metrics module scores how often those labels agree.

pub mod dataset;
pub mod emoji;
pub mod gateway;
pub mod judge;
pub mod metrics;

pub use emoji::{segment_emojis, Emoji, EmojiLexicon, Normalization, SegmentedText};
pub use judge::{LabelSet, Task};
