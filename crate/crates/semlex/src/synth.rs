//! Synthetic treebank generator for exercising the pipeline.
//!
//! Sentences are drawn from four templates: conjunction lists, appositive
//! NPs, compound NPs, and distractor clauses. Every list and appositive
//! draws all of its nouns from a single category, so co-occurrence never
//! crosses category boundaries; distractor clauses put their nouns in
//! separate NPs and pair nothing. That makes generated corpora ground
//! truth for containment tests: seeds from one category can only ever
//! reach that category's members.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::morph::Morphology;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid corpus spec: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid corpus spec: {0}")]
    Invalid(String),
}

fn default_list_len() -> ListLen {
    ListLen { min: 2, max: 4 }
}

/// Inclusive bounds on conjunction-list length.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
pub struct ListLen {
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CategorySpec {
    pub name: String,
    pub members: Vec<String>,
}

/// Generator parameters, read from a TOML file.
#[derive(Debug, Clone, Deserialize)]
pub struct SynthSpec {
    pub sentences: usize,
    #[serde(default = "default_list_len")]
    pub list_len: ListLen,
    #[serde(default)]
    pub distractors: Vec<String>,
    #[serde(rename = "category")]
    pub categories: Vec<CategorySpec>,
}

/// Tokens go into trees and come back out through the lemmatizer, so they
/// must be plain lowercase words whose "+s" plural strips back to the
/// token itself.
fn check_token(token: &str, morph: &Morphology) -> Result<(), SynthError> {
    let shape_ok = !token.is_empty()
        && token.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-');
    if !shape_ok {
        return Err(SynthError::Invalid(format!(
            "token {token:?} must be lowercase ascii letters, digits, or hyphens"
        )));
    }
    let plural = format!("{token}s");
    if morph.lemmatize(&plural, "NNS").map_err(|e| SynthError::Invalid(e.to_string()))? != token {
        return Err(SynthError::Invalid(format!(
            "token {token:?} does not survive pluralization; its plural {plural:?} lemmatizes elsewhere"
        )));
    }
    Ok(())
}

/// Parses and validates a generator spec.
pub fn parse_spec(text: &str) -> Result<SynthSpec, SynthError> {
    let spec: SynthSpec = toml::from_str(text)?;
    if spec.categories.is_empty() {
        return Err(SynthError::Invalid("at least one category is required".into()));
    }
    if spec.list_len.min < 2 || spec.list_len.min > spec.list_len.max {
        return Err(SynthError::Invalid(format!(
            "list_len must satisfy 2 <= min <= max, got {}..{}",
            spec.list_len.min, spec.list_len.max
        )));
    }
    let morph = Morphology::default();
    for category in &spec.categories {
        if category.members.len() < 2 {
            return Err(SynthError::Invalid(format!(
                "category {:?} needs at least two members",
                category.name
            )));
        }
        for member in &category.members {
            check_token(member, &morph)?;
        }
    }
    for distractor in &spec.distractors {
        check_token(distractor, &morph)?;
    }
    Ok(spec)
}

const VERBS: [&str; 5] = ["arrived", "appeared", "moved", "returned", "worked"];

/// One noun leaf, pluralized half the time.
fn noun_leaf(rng: &mut ChaCha8Rng, word: &str) -> String {
    if word.len() >= 3 && rng.random_bool(0.5) {
        format!("(NNS {word}s)")
    } else {
        format!("(NN {word})")
    }
}

fn verb_phrase(rng: &mut ChaCha8Rng) -> String {
    let verb = VERBS[rng.random_range(0..VERBS.len())];
    format!("(VP (VBD {verb}))")
}

/// Distinct member indices, in draw order.
fn draw_members(rng: &mut ChaCha8Rng, pool: usize, count: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, pool, count.min(pool)).into_vec()
}

/// Deterministically renders `spec.sentences` bracketed sentences.
pub fn generate(spec: &SynthSpec, rng_seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = String::new();
    for _ in 0..spec.sentences {
        let category = &spec.categories[rng.random_range(0..spec.categories.len())];
        let members = &category.members;
        let roll = if spec.distractors.is_empty() {
            rng.random_range(0..85)
        } else {
            rng.random_range(0..100)
        };
        let sentence = if roll < 50 {
            // Conjunction list: "(NP a (, ,) b (CC and) c)".
            let want = rng.random_range(spec.list_len.min..=spec.list_len.max);
            let picked = draw_members(&mut rng, members.len(), want);
            let mut np = String::from("(NP ");
            for (i, &m) in picked.iter().enumerate() {
                if i + 1 == picked.len() && i > 0 {
                    np.push_str("(CC and) ");
                } else if i > 0 {
                    np.push_str("(, ,) ");
                }
                np.push_str(&noun_leaf(&mut rng, &members[m]));
                np.push(' ');
            }
            np.pop();
            np.push(')');
            format!("(S {np} {})", verb_phrase(&mut rng))
        } else if roll < 70 {
            // Appositive: "the X , a Y" with both nouns category-internal.
            let picked = draw_members(&mut rng, members.len(), 2);
            format!(
                "(S (NP (NP (DT the) {}) (, ,) (NP (DT a) {})) {})",
                noun_leaf(&mut rng, &members[picked[0]]),
                noun_leaf(&mut rng, &members[picked[1 % picked.len()]]),
                verb_phrase(&mut rng)
            )
        } else if roll < 85 {
            // Compound NP headed by a category member.
            let picked = draw_members(&mut rng, members.len(), 2);
            let head = &members[picked[0]];
            let modifier = if !spec.distractors.is_empty() && rng.random_bool(0.5) {
                &spec.distractors[rng.random_range(0..spec.distractors.len())]
            } else {
                &members[picked[1 % picked.len()]]
            };
            format!(
                "(S (NP (DT the) (NN {modifier}) {}) {})",
                noun_leaf(&mut rng, head),
                verb_phrase(&mut rng)
            )
        } else {
            // Distractor clause: two NPs split by the verb, no pairs.
            let a = &spec.distractors[rng.random_range(0..spec.distractors.len())];
            let b = &spec.distractors[rng.random_range(0..spec.distractors.len())];
            let verb = VERBS[rng.random_range(0..VERBS.len())];
            format!(
                "(S (NP (DT the) {}) (VP (VBD {verb}) (NP (DT the) {})))",
                noun_leaf(&mut rng, a),
                noun_leaf(&mut rng, b)
            )
        };
        out.push_str(&sentence);
        out.push('\n');
    }
    out
}
