//! Utterance fixture files: `utterance_id<TAB>language<TAB>true_class<TAB>hypothesis_text`.
//!
//! The same file serves as the replay provider's recordings and as the
//! labeled corpus for evaluation. Lines starting with `#` and blank lines
//! are skipped; the hypothesis field may be empty.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionClass, Language};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixtureError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate utterance id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub utterance_id: String,
    pub language: Language,
    pub true_class: ActionClass,
    pub hypothesis: String,
}

pub fn parse_fixture(source: &str) -> Result<Vec<FixtureRecord>, FixtureError> {
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.splitn(4, '\t').collect();
        let [id, language, class, hypothesis] = fields[..] else {
            return Err(FixtureError::Parse {
                line,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        };
        if hypothesis.contains('\t') {
            return Err(FixtureError::Parse {
                line,
                message: "hypothesis must not contain tabs".into(),
            });
        }
        let id = id.trim();
        if id.is_empty() {
            return Err(FixtureError::Parse {
                line,
                message: "empty utterance id".into(),
            });
        }
        let language = language.trim().parse::<Language>().map_err(|e| FixtureError::Parse {
            line,
            message: format!("unknown language `{}`", e.0),
        })?;
        let true_class = class.trim().parse::<ActionClass>().map_err(|e| FixtureError::Parse {
            line,
            message: format!("unknown action class `{}`", e.0),
        })?;
        if !seen.insert(id.to_string()) {
            return Err(FixtureError::DuplicateId {
                line,
                id: id.to_string(),
            });
        }
        records.push(FixtureRecord {
            utterance_id: id.to_string(),
            language,
            true_class,
            hypothesis: hypothesis.to_string(),
        });
    }
    Ok(records)
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<Vec<FixtureRecord>, FixtureError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| FixtureError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_fixture(&text)
}

pub fn render_fixture(records: &[FixtureRecord]) -> String {
    let mut out = String::from("# utterance_id\tlanguage\ttrue_class\thypothesis\n");
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.utterance_id,
            r.language.code(),
            r.true_class.label(),
            r.hypothesis
        );
    }
    out
}
