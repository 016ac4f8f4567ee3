//! The bilingual command lexicon: surface sentences tagged with a language
//! and the action class they trigger.
//!
//! File format, one record per line, UTF-8:
//!
//! ```text
//! # comment
//! name: default
//! version: 1
//! go_left<TAB>en<TAB>go left
//! ```
//!
//! `version:` is required, `name:` is optional. Entry order is significant:
//! the fuzzy matcher breaks distance ties in favour of the earlier entry.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionClass, Language};
use crate::matcher::{normalize, NormalizedText};

const BUILTIN: &str = include_str!("../data/default.lexicon");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown action class `{label}`")]
    UnknownClass { line: usize, label: String },
    #[error("line {line}: unknown language `{label}`")]
    UnknownLanguage { line: usize, label: String },
    #[error("duplicate surface `{surface}`{}", at(.line))]
    DuplicateSurface { surface: String, line: Option<usize> },
    #[error("surface `{surface}` is not normalized (expected `{expected}`){}", at(.line))]
    NotNormalized {
        surface: String,
        expected: String,
        line: Option<usize>,
    },
    #[error("empty surface{}", at(.line))]
    EmptySurface { line: Option<usize> },
    #[error("no {language} entry for action class {class}")]
    MissingCoverage { class: ActionClass, language: Language },
    #[error("missing `version:` header")]
    MissingVersion,
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

fn at(line: &Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub surface: NormalizedText,
    pub language: Language,
    pub action_class: ActionClass,
}

impl LexiconEntry {
    /// Builds an entry, rejecting surfaces that are empty or not already normalized.
    pub fn new(surface: &str, language: Language, action_class: ActionClass) -> Result<Self, LexiconError> {
        Self::checked(surface, language, action_class, None)
    }

    fn checked(
        surface: &str,
        language: Language,
        action_class: ActionClass,
        line: Option<usize>,
    ) -> Result<Self, LexiconError> {
        let normalized = normalize(surface);
        if normalized.is_empty() {
            return Err(LexiconError::EmptySurface { line });
        }
        if normalized.as_str() != surface {
            return Err(LexiconError::NotNormalized {
                surface: surface.to_string(),
                expected: normalized.into_string(),
                line,
            });
        }
        Ok(Self {
            surface: normalized,
            language,
            action_class,
        })
    }
}

/// A validated, immutable lexicon.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LexiconDoc", into = "LexiconDoc")]
pub struct Lexicon {
    name: String,
    version: String,
    entries: Vec<LexiconEntry>,
    by_surface: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct LexiconDoc {
    name: String,
    version: String,
    entries: Vec<LexiconEntry>,
}

impl TryFrom<LexiconDoc> for Lexicon {
    type Error = LexiconError;

    fn try_from(doc: LexiconDoc) -> Result<Self, Self::Error> {
        for e in &doc.entries {
            LexiconEntry::new(e.surface.as_str(), e.language, e.action_class)?;
        }
        Lexicon::new(doc.name, doc.version, doc.entries)
    }
}

impl From<Lexicon> for LexiconDoc {
    fn from(lexicon: Lexicon) -> Self {
        LexiconDoc {
            name: lexicon.name,
            version: lexicon.version,
            entries: lexicon.entries,
        }
    }
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.version == other.version && self.entries == other.entries
    }
}

impl Eq for Lexicon {}

impl Lexicon {
    pub fn new(
        name: impl Into<String>,
        version: impl Into<String>,
        entries: Vec<LexiconEntry>,
    ) -> Result<Self, LexiconError> {
        Self::build(name.into(), version.into(), entries, None)
    }

    fn build(
        name: String,
        version: String,
        entries: Vec<LexiconEntry>,
        lines: Option<&[usize]>,
    ) -> Result<Self, LexiconError> {
        let mut by_surface = HashMap::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
            if by_surface.insert(entry.surface.as_str().to_string(), i).is_some() {
                return Err(LexiconError::DuplicateSurface {
                    surface: entry.surface.as_str().to_string(),
                    line: lines.map(|l| l[i]),
                });
            }
        }
        for class in ActionClass::ALL {
            for language in Language::ALL {
                if !entries
                    .iter()
                    .any(|e| e.action_class == class && e.language == language)
                {
                    return Err(LexiconError::MissingCoverage { class, language });
                }
            }
        }
        Ok(Self {
            name,
            version,
            entries,
            by_surface,
        })
    }

    /// The lexicon shipped with the crate (48 entries).
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("bundled lexicon is valid")
    }

    pub fn builtin_source() -> &'static str {
        BUILTIN
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| LexiconError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(source: &str) -> Result<Self, LexiconError> {
        let mut name = None;
        let mut version = None;
        let mut entries = Vec::new();
        let mut lines = Vec::new();

        for (i, raw) in source.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim_end_matches('\r');
            if content.trim().is_empty() {
                continue;
            }
            if !content.contains('\t') {
                let (key, value) = content.split_once(':').ok_or_else(|| LexiconError::Parse {
                    line,
                    message: "expected `class<TAB>language<TAB>surface` or a header".into(),
                })?;
                let slot = match key.trim() {
                    "version" => &mut version,
                    "name" => &mut name,
                    other => {
                        return Err(LexiconError::Parse {
                            line,
                            message: format!("unknown header `{other}`"),
                        })
                    }
                };
                if slot.is_some() {
                    return Err(LexiconError::Parse {
                        line,
                        message: format!("repeated `{}` header", key.trim()),
                    });
                }
                let value = value.trim();
                if value.is_empty() {
                    return Err(LexiconError::Parse {
                        line,
                        message: format!("empty `{}` header", key.trim()),
                    });
                }
                *slot = Some(value.to_string());
                continue;
            }

            let fields: Vec<&str> = content.split('\t').collect();
            let [class, language, surface] = fields[..] else {
                return Err(LexiconError::Parse {
                    line,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            };
            let action_class = class
                .trim()
                .parse::<ActionClass>()
                .map_err(|e| LexiconError::UnknownClass { line, label: e.0 })?;
            let language = language
                .trim()
                .parse::<Language>()
                .map_err(|e| LexiconError::UnknownLanguage { line, label: e.0 })?;
            entries.push(LexiconEntry::checked(surface, language, action_class, Some(line))?);
            lines.push(line);
        }

        let version = version.ok_or(LexiconError::MissingVersion)?;
        let name = name.unwrap_or_else(|| "unnamed".to_string());
        Self::build(name, version, entries, Some(&lines))
    }

    /// Renders the lexicon in its file format. Parsing the output yields an equal lexicon.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# class\tlanguage\tsurface\n");
        let _ = writeln!(out, "name: {}", self.name);
        let _ = writeln!(out, "version: {}", self.version);
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}\t{}", e.action_class.label(), e.language.code(), e.surface);
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index of the entry whose surface equals `text`.
    pub fn position(&self, text: &str) -> Option<usize> {
        self.by_surface.get(text).copied()
    }

    pub fn contains_surface(&self, text: &str) -> bool {
        self.by_surface.contains_key(text)
    }

    /// Class of the entry whose surface equals the already-normalized `text`.
    pub fn exact_lookup(&self, text: &str) -> Option<ActionClass> {
        self.position(text).map(|i| self.entries[i].action_class)
    }

    /// Entries of one language in lexicon order, or all entries.
    pub fn entries_for(&self, language: Option<Language>) -> Vec<&LexiconEntry> {
        self.entries
            .iter()
            .filter(|e| language.is_none_or(|l| e.language == l))
            .collect()
    }
}
