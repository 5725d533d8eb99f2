//! Prompt construction for the three recommendation strategies.
//!
//! The zero-shot template and the five few-shot exemplar texts are frozen
//! verbatim; tests pin them byte-for-byte. The conditional prefix wording is
//! likewise fixed so runs stay comparable.

use super::{GatewayError, PromptStrategy};

/// The fixed instruction, split around the `{text}` slot.
const INSTRUCTION_HEAD: &str =
    "As a social media user, find three emojis that best fit the context: ";
const INSTRUCTION_TAIL: &str =
    ". Do not include any words or explanations\u{2014}only three emojis.";

const FEW_SHOT_PREAMBLE: &str =
    "Here are five examples of pairing a text with three fitting emojis:";

/// One worked example shown to the model under the few-shot strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Exemplar {
    pub context: &'static str,
    pub emojis: [&'static str; 3],
}

/// The five pinned exemplars, in their fixed order. The contexts come from
/// real posts outside the benchmark; the triples are part of the frozen
/// harness configuration.
pub fn default_exemplars() -> Vec<Exemplar> {
    vec![
        Exemplar {
            context: "After the success of  's walima vid, we're back at it again for  's wedding celebrations!",
            emojis: ["🎉", "💍", "👰"],
        },
        Exemplar {
            context: ". finally being played in the right position as well. Great performance!",
            emojis: ["⚽", "🔥", "👏"],
        },
        Exemplar {
            context: "I NEED THE WILSON BLADE 104 IN MY LIFE!!!",
            emojis: ["🎾", "😭", "🙏"],
        },
        Exemplar {
            context: "Just broke me tooth into bits eating a lid of a bottle",
            emojis: ["😬", "🦷", "😡"],
        },
        Exemplar {
            context: "It's not even 9am and it's already 30 degrees",
            emojis: ["🥵", "☀️", "😅"],
        },
    ]
}

fn zero_shot(text: &str) -> String {
    format!("{INSTRUCTION_HEAD}{text}{INSTRUCTION_TAIL}")
}

/// Renders the full prompt for one post under the given strategy.
pub fn build_prompt(text: &str, strategy: &PromptStrategy) -> Result<String, GatewayError> {
    match strategy {
        PromptStrategy::ZeroShot => Ok(zero_shot(text)),
        PromptStrategy::FewShot(exemplars) => {
            if exemplars.is_empty() {
                return Err(GatewayError::NoExemplars);
            }
            let mut prompt = String::from(FEW_SHOT_PREAMBLE);
            for (i, ex) in exemplars.iter().enumerate() {
                prompt.push_str(&format!(
                    "\n{}. Context: \"{}\"\n   Emojis: {}{}{}",
                    i + 1,
                    ex.context,
                    ex.emojis[0],
                    ex.emojis[1],
                    ex.emojis[2]
                ));
            }
            prompt.push_str("\n\n");
            prompt.push_str(&zero_shot(text));
            Ok(prompt)
        }
        PromptStrategy::Conditional { age, gender } => Ok(format!(
            "The author of this post is a {age} {gender} social media user. {}",
            zero_shot(text)
        )),
    }
}
