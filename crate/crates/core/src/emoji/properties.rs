//! Character-level emoji classification (UTS #51 properties) and the rule
//! deciding whether a grapheme cluster is an emoji cluster.

use unicode_properties::emoji::EmojiStatus;
use unicode_properties::UnicodeEmoji;

pub(crate) const VS16: char = '\u{FE0F}';
pub(crate) const COMBINING_KEYCAP: char = '\u{20E3}';

/// `Emoji=Yes` in the UCD emoji data.
pub(crate) fn is_emoji_scalar(c: char) -> bool {
    !matches!(
        c.emoji_status(),
        EmojiStatus::NonEmoji | EmojiStatus::NonEmojiButEmojiComponent
    )
}

/// `Emoji_Presentation=Yes`: renders as emoji without a variation selector.
pub(crate) fn has_default_emoji_presentation(c: char) -> bool {
    matches!(
        c.emoji_status(),
        EmojiStatus::EmojiPresentation
            | EmojiStatus::EmojiPresentationAndModifierBase
            | EmojiStatus::EmojiPresentationAndEmojiComponent
            | EmojiStatus::EmojiPresentationAndModifierAndEmojiComponent
    )
}

/// Keycap bases (`0`-`9`, `#`, `*`) are emoji only inside a full keycap
/// sequence, never on their own.
pub(crate) fn is_keycap_base(c: char) -> bool {
    matches!(c, '0'..='9' | '#' | '*')
}

/// Fitzpatrick skin-tone modifiers.
pub(crate) fn is_skin_tone_modifier(c: char) -> bool {
    ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

/// Decides whether one extended grapheme cluster is an emoji cluster.
///
/// A cluster qualifies when it is a keycap sequence, or contains a scalar
/// with default emoji presentation, or contains an `Emoji=Yes` scalar
/// promoted to emoji presentation by VS16. Bare keycap bases and
/// text-presentation symbols (e.g. `#`, `1`, `©` without VS16) do not
/// qualify.
pub(crate) fn is_emoji_cluster(cluster: &str) -> bool {
    let mut chars = cluster.chars().peekable();
    let mut first = true;
    while let Some(c) = chars.next() {
        if is_keycap_base(c) {
            // Only the full sequence <base, (VS16), U+20E3> counts.
            if first && cluster.chars().any(|k| k == COMBINING_KEYCAP) {
                return true;
            }
            first = false;
            continue;
        }
        if has_default_emoji_presentation(c) {
            return true;
        }
        if is_emoji_scalar(c) && chars.peek() == Some(&VS16) {
            return true;
        }
        first = false;
    }
    false
}
