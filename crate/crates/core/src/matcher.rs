//! Text normalization, character-level edit distance and lexicon matching.
//!
//! Two classification modes are supported. Exact mode accepts a hypothesis
//! only when its normalized form is a lexicon surface. Fuzzy mode computes
//! the edit distance from the hypothesis to every candidate surface and
//! picks the closest one, breaking ties by lexicon order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::action::{ActionClass, Language, UnknownLabel};
use crate::lexicon::{Lexicon, LexiconEntry};

/// Text that is lowercased, trimmed, whitespace-collapsed and NFC composed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormalizedText(String);

impl NormalizedText {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Length in Unicode scalar values, the unit the edit distance counts.
    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }
}

impl fmt::Display for NormalizedText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NormalizedText {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Drop combining marks after decomposition ("atrás" becomes "atras").
    pub strip_diacritics: bool,
}

pub fn normalize(raw: &str) -> NormalizedText {
    normalize_with(raw, NormalizeOptions::default())
}

pub fn normalize_with(raw: &str, options: NormalizeOptions) -> NormalizedText {
    let composed: String = raw.nfc().collect::<String>().to_lowercase();
    let collapsed = composed.split_whitespace().collect::<Vec<_>>().join(" ");
    let out = if options.strip_diacritics {
        collapsed.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
    } else {
        collapsed.nfc().collect()
    };
    NormalizedText(out)
}

/// Minimum number of unit-cost character substitutions, insertions and
/// deletions turning `a` into `b`.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

/// Two-row evaluation of the edit-distance recurrence.
pub fn levenshtein_chars<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    // keep the shorter sequence on the row axis
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            cur[j + 1] = substitution.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Exact,
    Fuzzy,
}

impl MatchMode {
    pub const ALL: [MatchMode; 2] = [MatchMode::Exact, MatchMode::Fuzzy];

    pub fn label(self) -> &'static str {
        match self {
            MatchMode::Exact => "exact",
            MatchMode::Fuzzy => "fuzzy",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MatchMode {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(MatchMode::Exact),
            "fuzzy" => Ok(MatchMode::Fuzzy),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub action_class: ActionClass,
    pub matched_entry: LexiconEntry,
    /// Position of `matched_entry` in the lexicon.
    pub entry_index: usize,
    pub distance: usize,
    pub mode: MatchMode,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchOptions {
    /// Only consider entries of this language.
    pub language: Option<Language>,
    /// Fuzzy mode only: reject the best candidate when its distance exceeds this.
    pub reject_above: Option<usize>,
    pub strip_diacritics: bool,
}

impl MatchOptions {
    fn normalize_options(&self) -> NormalizeOptions {
        NormalizeOptions {
            strip_diacritics: self.strip_diacritics,
        }
    }

    fn admits(&self, entry: &LexiconEntry) -> bool {
        self.language.is_none_or(|l| l == entry.language)
    }
}

/// Runs the matcher selected by `mode`.
pub fn classify(hypothesis: &str, lexicon: &Lexicon, mode: MatchMode, options: &MatchOptions) -> Option<MatchResult> {
    match mode {
        MatchMode::Exact => match_exact(hypothesis, lexicon, options),
        MatchMode::Fuzzy => match_fuzzy(hypothesis, lexicon, options),
    }
}

pub fn match_exact(hypothesis: &str, lexicon: &Lexicon, options: &MatchOptions) -> Option<MatchResult> {
    let text = normalize_with(hypothesis, options.normalize_options());
    if text.is_empty() {
        return None;
    }
    let index = if options.strip_diacritics {
        lexicon
            .entries()
            .iter()
            .position(|e| options.admits(e) && surface_key(e, options).as_str() == text.as_str())?
    } else {
        let index = lexicon.position(text.as_str())?;
        if !options.admits(&lexicon.entries()[index]) {
            return None;
        }
        index
    };
    let entry = &lexicon.entries()[index];
    Some(MatchResult {
        action_class: entry.action_class,
        matched_entry: entry.clone(),
        entry_index: index,
        distance: 0,
        mode: MatchMode::Exact,
    })
}

pub fn match_fuzzy(hypothesis: &str, lexicon: &Lexicon, options: &MatchOptions) -> Option<MatchResult> {
    let text: Vec<char> = normalize_with(hypothesis, options.normalize_options())
        .as_str()
        .chars()
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for (index, entry) in lexicon.entries().iter().enumerate() {
        if !options.admits(entry) {
            continue;
        }
        let surface: Vec<char> = surface_key(entry, options).as_str().chars().collect();
        let distance = levenshtein_chars(&text, &surface);
        // strict comparison keeps the earliest entry on ties
        if best.is_none_or(|(_, d)| distance < d) {
            best = Some((index, distance));
            if distance == 0 {
                break;
            }
        }
    }
    let (index, distance) = best?;
    if options.reject_above.is_some_and(|limit| distance > limit) {
        return None;
    }
    let entry = &lexicon.entries()[index];
    Some(MatchResult {
        action_class: entry.action_class,
        matched_entry: entry.clone(),
        entry_index: index,
        distance,
        mode: MatchMode::Fuzzy,
    })
}

fn surface_key(entry: &LexiconEntry, options: &MatchOptions) -> NormalizedText {
    if options.strip_diacritics {
        normalize_with(entry.surface.as_str(), options.normalize_options())
    } else {
        entry.surface.clone()
    }
}
