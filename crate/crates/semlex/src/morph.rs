//! Lemma keys, plural handling, and display forms.
//!
//! Counting happens on lowercase lemma keys so that singular and plural
//! mentions of a noun merge. The rules are deliberately small: `-ies` to
//! `-y`, `-es` after a sibilant stem, bare `-s`, in that order; anything
//! else keeps its surface. An exceptions file supplies irregulars the rules
//! miss. Display forms fold the observed plural back in, as in `car(s)` or
//! `bus(es)`, and proper nouns keep their original casing.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

pub const NOUN_TAGS: [&str; 4] = ["NN", "NNS", "NNP", "NNPS"];

pub fn is_noun_tag(tag: &str) -> bool {
    NOUN_TAGS.contains(&tag)
}

pub fn is_plural_tag(tag: &str) -> bool {
    tag == "NNS" || tag == "NNPS"
}

pub fn is_proper_tag(tag: &str) -> bool {
    tag == "NNP" || tag == "NNPS"
}

/// Adjectives and cardinal numbers may join noun compounds.
pub fn is_modifier_tag(tag: &str) -> bool {
    tag == "JJ" || tag == "CD"
}

pub fn is_compound_tag(tag: &str) -> bool {
    is_noun_tag(tag) || is_modifier_tag(tag)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphError {
    #[error("empty surface form")]
    EmptySurface,
    #[error("{path}:{line}: {message}")]
    BadLine { path: String, line: usize, message: String },
}

/// Which plural spelling a key was seen with; orders by display precedence
/// so that merging two observations keeps the stronger claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum Suffix {
    #[default]
    None,
    /// Bare `-s`, also used for exceptions-file irregulars.
    S,
    /// `-es` after a sibilant, and `-ies` over `-y`; both render as `(es)`.
    Es,
}

/// Result of one lemmatizer run: the counting key plus what the suffix rule
/// saw, which the lexicon folds into display state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub key: String,
    pub suffix: Suffix,
    pub plural: bool,
}

/// Irregular plural map loaded from a `plural<TAB>singular` file.
#[derive(Debug, Clone, Default)]
pub struct Exceptions {
    map: HashMap<String, String>,
}

impl Exceptions {
    pub fn parse(text: &str, path: &str) -> Result<Self, MorphError> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((plural, singular)) = line.split_once('\t') else {
                return Err(MorphError::BadLine {
                    path: path.to_string(),
                    line: i + 1,
                    message: "expected plural<TAB>singular".to_string(),
                });
            };
            let plural = plural.trim().to_lowercase();
            let singular = singular.trim().to_lowercase();
            if plural.is_empty() || singular.is_empty() || singular.contains(char::is_whitespace) {
                return Err(MorphError::BadLine {
                    path: path.to_string(),
                    line: i + 1,
                    message: "expected plural<TAB>singular".to_string(),
                });
            }
            map.insert(plural, singular);
        }
        Ok(Exceptions { map })
    }

    pub fn load(path: &Path) -> Result<Self, MorphError> {
        let text = fs::read_to_string(path).map_err(|e| MorphError::BadLine {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn lookup(&self, lowercase_surface: &str) -> Option<&str> {
        self.map.get(lowercase_surface).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Lemmatizer configuration: currently just the exceptions table.
#[derive(Debug, Clone, Default)]
pub struct Morphology {
    pub exceptions: Exceptions,
}

impl Morphology {
    pub fn new(exceptions: Exceptions) -> Self {
        Morphology { exceptions }
    }

    /// Lowercase counting key for a surface form. Plural tags run the
    /// suffix rules; all other tags only case-fold, so the function is
    /// idempotent on singular nouns.
    pub fn lemmatize(&self, surface: &str, tag: &str) -> Result<String, MorphError> {
        Ok(self.analyze(surface, tag)?.key)
    }

    pub fn analyze(&self, surface: &str, tag: &str) -> Result<Analysis, MorphError> {
        if surface.is_empty() {
            return Err(MorphError::EmptySurface);
        }
        let lower = surface.to_lowercase();
        if !is_plural_tag(tag) {
            return Ok(Analysis { key: lower, suffix: Suffix::None, plural: false });
        }
        if let Some(singular) = self.exceptions.lookup(&lower) {
            return Ok(Analysis { key: singular.to_string(), suffix: Suffix::S, plural: true });
        }
        let (key, suffix) = match strip_plural(&lower) {
            Some(parts) => parts,
            None => (lower, Suffix::None),
        };
        Ok(Analysis { key, suffix, plural: true })
    }
}

/// Suffix rules in order; returns the singular key and the display class,
/// or `None` when no rule applies.
fn strip_plural(lower: &str) -> Option<(String, Suffix)> {
    if lower.len() > 4 {
        if let Some(stem) = lower.strip_suffix("ies") {
            return Some((format!("{stem}y"), Suffix::Es));
        }
    }
    if let Some(stem) = lower.strip_suffix("es") {
        if stem.ends_with(['s', 'x', 'z']) || stem.ends_with("ch") || stem.ends_with("sh") {
            return Some((stem.to_string(), Suffix::Es));
        }
    }
    if lower.len() > 3 {
        if let Some(stem) = lower.strip_suffix('s') {
            return Some((stem.to_string(), Suffix::S));
        }
    }
    None
}

/// Display state for one lemma key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaEntry {
    seen_singular: bool,
    seen_plural: bool,
    suffix: Suffix,
    /// Original-cased stem, kept only for NNP/NNPS observations; ties pick
    /// the lexicographically least so merging stays order-free.
    cased: Option<String>,
}

impl LemmaEntry {
    fn absorb(&mut self, other: &LemmaEntry) {
        self.seen_singular |= other.seen_singular;
        self.seen_plural |= other.seen_plural;
        self.suffix = self.suffix.max(other.suffix);
        match (&self.cased, &other.cased) {
            (None, Some(_)) => self.cased = other.cased.clone(),
            (Some(a), Some(b)) if b < a => self.cased = other.cased.clone(),
            _ => {}
        }
    }
}

/// Per-corpus map from lemma key to display state. Merging two lexica is
/// commutative, so observation order never shows in output.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, LemmaEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// Records one token and returns its key.
    pub fn observe(&mut self, surface: &str, tag: &str, morph: &Morphology) -> Result<String, MorphError> {
        let analysis = morph.analyze(surface, tag)?;
        let entry = self.entries.entry(analysis.key.clone()).or_default();
        if analysis.plural {
            entry.seen_plural = true;
            entry.suffix = entry.suffix.max(analysis.suffix);
        } else {
            entry.seen_singular = true;
        }
        if is_proper_tag(tag) {
            let cased = cased_stem(surface, &analysis.key);
            match &entry.cased {
                Some(existing) if existing <= &cased => {}
                _ => entry.cased = Some(cased),
            }
        }
        Ok(analysis.key)
    }

    /// Records a seed-file entry so its display form round-trips.
    pub fn observe_seed(&mut self, seed: &SeedEntry) {
        let incoming = LemmaEntry {
            seen_singular: true,
            seen_plural: seed.suffix != Suffix::None,
            suffix: seed.suffix,
            cased: None,
        };
        self.entries.entry(seed.key.clone()).or_default().absorb(&incoming);
    }

    pub fn merge(&mut self, other: Lexicon) {
        for (key, incoming) in other.entries {
            self.entries.entry(key).or_default().absorb(&incoming);
        }
    }

    /// Display form with the plural convention folded in: `car(s)`,
    /// `bus(es)`, bare key when only a singular was seen, and the surface
    /// itself for irregular plurals the rules never matched.
    pub fn display(&self, key: &str) -> String {
        let Some(entry) = self.entries.get(key) else {
            return key.to_string();
        };
        let base = entry.cased.as_deref().unwrap_or(key);
        if entry.seen_plural {
            match entry.suffix {
                Suffix::Es => return format!("{base}(es)"),
                Suffix::S => return format!("{base}(s)"),
                Suffix::None if entry.seen_singular => return format!("{base}(s)"),
                Suffix::None => {}
            }
        }
        base.to_string()
    }

    /// Display form without the plural marker; used for the non-head
    /// members of a compound.
    pub fn display_bare(&self, key: &str) -> String {
        match self.entries.get(key) {
            Some(entry) => entry.cased.clone().unwrap_or_else(|| key.to_string()),
            None => key.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Applies the same suffix cut to the original casing; `Mirages` stems to
/// `Mirage` while its key is `mirage`.
fn cased_stem(surface: &str, key: &str) -> String {
    let lower = surface.to_lowercase();
    if lower == *key {
        return surface.to_string();
    }
    // Redo the suffix cut on the original casing; anything that does not
    // line up byte-for-byte just falls back to the key.
    if lower.len() == surface.len() && key.len() < lower.len() {
        if let Some(stem) = lower.strip_suffix("ies") {
            if key.strip_suffix('y') == Some(stem) && surface.is_char_boundary(surface.len() - 3) {
                return format!("{}y", &surface[..surface.len() - 3]);
            }
        }
        let cut = lower.len() - key.len();
        if lower.starts_with(key) && surface.is_char_boundary(surface.len() - cut) {
            return surface[..surface.len() - cut].to_string();
        }
    }
    key.to_string()
}

/// One seed-list line: the key plus the display suffix it was written with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedEntry {
    pub key: String,
    pub suffix: Suffix,
}

impl fmt::Display for SeedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.suffix {
            Suffix::None => write!(f, "{}", self.key),
            Suffix::S => write!(f, "{}(s)", self.key),
            Suffix::Es => write!(f, "{}(es)", self.key),
        }
    }
}

/// Parses a seed list: one display form per line, `car(s)` style, `#`
/// comment lines and blanks skipped.
pub fn parse_seed_file(text: &str, path: &str) -> Result<Vec<SeedEntry>, MorphError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (form, suffix) = if let Some(stripped) = line.strip_suffix("(es)") {
            (stripped, Suffix::Es)
        } else if let Some(stripped) = line.strip_suffix("(s)") {
            (stripped, Suffix::S)
        } else {
            (line, Suffix::None)
        };
        if form.is_empty() || form.contains(char::is_whitespace) || form.contains(['(', ')']) {
            return Err(MorphError::BadLine {
                path: path.to_string(),
                line: i + 1,
                message: format!("bad seed form {line:?}"),
            });
        }
        out.push(SeedEntry { key: form.to_lowercase(), suffix });
    }
    Ok(out)
}

pub fn load_seed_file(path: &Path) -> Result<Vec<SeedEntry>, MorphError> {
    let text = fs::read_to_string(path).map_err(|e| MorphError::BadLine {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    parse_seed_file(&text, &path.display().to_string())
}
