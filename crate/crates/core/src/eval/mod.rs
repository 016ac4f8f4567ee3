//! Recognition accuracy evaluation: per class, per language and per mode,
//! with confusion matrices that carry a "no class" column, and degradation
//! sweeps over transcript edits or waveform noise.

mod corpus;
mod report;
mod sweep;

use std::collections::HashSet;

use thiserror::Error;

pub use corpus::{
    balanced_corpus, corpus_from_records, surface_corpus, with_synthetic_audio, LabeledUtterance, Payload,
};
pub use report::{
    accuracy, emit_report, CellTally, ConfusionMatrix, EvaluationReport, GroupAccuracy, GroupMean, OverallAccuracy,
    ReportFormat, Scope, NO_CLASS_COLUMN, REPORT_SCHEMA_VERSION,
};
pub use sweep::{degradation_sweep, format_accuracy_table, parse_levels, DegradationLevel, SweepPoint};

use crate::audio::{InputKind, ProviderInput, SpeechProvider};
use crate::controller::{interpret, ControllerConfig};
use crate::lexicon::Lexicon;
use crate::matcher::MatchMode;
use report::ReportBuilder;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no matching modes selected")]
    NoModes,
    #[error("no degradation levels given")]
    NoLevels,
    #[error("duplicate utterance id `{0}` in corpus")]
    DuplicateId(String),
    #[error("utterance `{id}` carries {found:?} payload but provider expects {expected:?}")]
    PayloadMismatch {
        id: String,
        found: InputKind,
        expected: InputKind,
    },
    #[error("level {level} cannot be applied to a {corpus} corpus")]
    LevelMismatch { level: String, corpus: &'static str },
    #[error("corpus mixes text and audio payloads")]
    MixedCorpus,
    #[error("invalid level: {0}")]
    InvalidLevel(String),
}

fn validate_corpus(corpus: &[LabeledUtterance]) -> Result<(), EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let mut seen = HashSet::with_capacity(corpus.len());
    for u in corpus {
        if !seen.insert(u.utterance_id.as_str()) {
            return Err(EvalError::DuplicateId(u.utterance_id.clone()));
        }
    }
    Ok(())
}

fn provider_input(u: &LabeledUtterance) -> ProviderInput<'_> {
    match &u.payload {
        Payload::Text(_) => ProviderInput::Utterance(&u.utterance_id),
        Payload::Audio { waveform, .. } => ProviderInput::Audio {
            utterance_id: &u.utterance_id,
            waveform,
        },
    }
}

/// Transcribes every utterance once and classifies the hypothesis in each
/// requested mode. A prediction is correct when the class equals the label;
/// misses, rejections, exit words and provider failures land in the
/// "no class" column.
pub fn evaluate<P: SpeechProvider + ?Sized>(
    corpus: &[LabeledUtterance],
    lexicon: &Lexicon,
    provider: &P,
    base: &ControllerConfig,
    modes: &[MatchMode],
) -> Result<EvaluationReport, EvalError> {
    validate_corpus(corpus)?;
    if modes.is_empty() {
        return Err(EvalError::NoModes);
    }
    let mut builder = ReportBuilder::new(provider.provider_id(), modes);
    let configs: Vec<ControllerConfig> = modes
        .iter()
        .map(|&mode| {
            let mut c = base.clone();
            c.mode = mode;
            c
        })
        .collect();
    for u in corpus {
        let input = provider_input(u);
        if input.kind() != provider.input_kind() {
            return Err(EvalError::PayloadMismatch {
                id: u.utterance_id.clone(),
                found: input.kind(),
                expected: provider.input_kind(),
            });
        }
        let hypothesis = match provider.transcribe(input) {
            Ok(h) => Some(h),
            Err(_) => {
                builder.record_failure(u.language);
                None
            }
        };
        for config in &configs {
            let predicted = hypothesis
                .as_ref()
                .and_then(|h| interpret(h, lexicon, config).result.map(|r| r.action_class));
            builder.record(config.mode, u.language, u.true_class, predicted, u.group());
        }
    }
    Ok(builder.finish())
}
