use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{evaluate, validate_corpus, EvalError, EvaluationReport, LabeledUtterance, Payload, Scope};
use crate::audio::{
    derive_seed, inject_noise, AcousticChannelProvider, ChannelModel, EditNoiseProvider, NoiseSpec, ReplayProvider,
};
use crate::controller::ControllerConfig;
use crate::lexicon::Lexicon;
use crate::matcher::MatchMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradationLevel {
    /// Character edits per transcript.
    Edits(usize),
    /// Uniform waveform noise amplitude relative to full scale.
    Noise(f64),
}

impl fmt::Display for DegradationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegradationLevel::Edits(0) | DegradationLevel::Noise(0.0) => f.write_str("raw"),
            DegradationLevel::Edits(1) => f.write_str("1 edit"),
            DegradationLevel::Edits(k) => write!(f, "{k} edits"),
            DegradationLevel::Noise(n) => write!(f, "noise {}%", n * 100.0),
        }
    }
}

/// Parses a comma-separated level list: edit counts for text corpora,
/// noise amplitudes in [0, 1) for audio corpora.
pub fn parse_levels(spec: &str, audio: bool) -> Result<Vec<DegradationLevel>, EvalError> {
    let mut levels = Vec::new();
    for raw in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let level = if audio {
            let n: f64 = raw.parse().map_err(|_| EvalError::InvalidLevel(raw.to_string()))?;
            NoiseSpec::new(n, 0).map_err(|e| EvalError::InvalidLevel(e.to_string()))?;
            DegradationLevel::Noise(n)
        } else {
            DegradationLevel::Edits(raw.parse().map_err(|_| {
                EvalError::InvalidLevel(format!("`{raw}` is not an edit count (text corpora take integers)"))
            })?)
        };
        levels.push(level);
    }
    if levels.is_empty() {
        return Err(EvalError::NoLevels);
    }
    Ok(levels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub level: DegradationLevel,
    pub report: EvaluationReport,
}

enum CorpusKind {
    Text,
    Audio,
}

fn corpus_kind(corpus: &[LabeledUtterance]) -> Result<CorpusKind, EvalError> {
    let audio = corpus
        .iter()
        .filter(|u| matches!(u.payload, Payload::Audio { .. }))
        .count();
    match audio {
        0 => Ok(CorpusKind::Text),
        n if n == corpus.len() => Ok(CorpusKind::Audio),
        _ => Err(EvalError::MixedCorpus),
    }
}

/// Evaluates the corpus at every level, in order. Text corpora pass through
/// the edit-noise provider; audio corpora get seeded uniform noise per
/// utterance and then the acoustic channel provider.
pub fn degradation_sweep(
    corpus: &[LabeledUtterance],
    lexicon: &Lexicon,
    base: &ControllerConfig,
    modes: &[MatchMode],
    levels: &[DegradationLevel],
    seed: u64,
    channel: ChannelModel,
) -> Result<Vec<SweepPoint>, EvalError> {
    validate_corpus(corpus)?;
    if levels.is_empty() {
        return Err(EvalError::NoLevels);
    }
    match corpus_kind(corpus)? {
        CorpusKind::Text => {
            let replay = ReplayProvider::new(
                corpus
                    .iter()
                    .map(|u| (u.utterance_id.clone(), u.transcript().to_string()))
                    .collect(),
            );
            levels
                .iter()
                .map(|&level| {
                    let DegradationLevel::Edits(k) = level else {
                        return Err(EvalError::LevelMismatch {
                            level: level.to_string(),
                            corpus: "text",
                        });
                    };
                    let provider = EditNoiseProvider::new(&replay, k, seed);
                    Ok(SweepPoint {
                        level,
                        report: evaluate(corpus, lexicon, &provider, base, modes)?,
                    })
                })
                .collect()
        }
        CorpusKind::Audio => {
            let references: HashMap<_, _> = corpus
                .iter()
                .filter_map(|u| match &u.payload {
                    Payload::Audio { waveform, transcript } => {
                        Some((u.utterance_id.clone(), (transcript.clone(), (**waveform).clone())))
                    }
                    Payload::Text(_) => None,
                })
                .collect();
            let provider = AcousticChannelProvider::new(references, ChannelModel { seed, ..channel });
            levels
                .iter()
                .map(|&level| {
                    let DegradationLevel::Noise(n) = level else {
                        return Err(EvalError::LevelMismatch {
                            level: level.to_string(),
                            corpus: "audio",
                        });
                    };
                    let noisy = corpus
                        .iter()
                        .map(|u| noisy_copy(u, n, seed))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(SweepPoint {
                        level,
                        report: evaluate(&noisy, lexicon, &provider, base, modes)?,
                    })
                })
                .collect()
        }
    }
}

fn noisy_copy(u: &LabeledUtterance, amplitude: f64, seed: u64) -> Result<LabeledUtterance, EvalError> {
    let spec = NoiseSpec::new(amplitude, derive_seed(seed, &u.utterance_id))
        .map_err(|e| EvalError::InvalidLevel(e.to_string()))?;
    let payload = match &u.payload {
        Payload::Audio { waveform, transcript } => Payload::Audio {
            waveform: Arc::new(inject_noise(waveform, &spec)),
            transcript: transcript.clone(),
        },
        Payload::Text(t) => Payload::Text(t.clone()),
    };
    Ok(LabeledUtterance { payload, ..u.clone() })
}

/// Accuracy table: one row per (mode, language slice), one column per level.
pub fn format_accuracy_table(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    let Some(first) = points.first() else {
        return out;
    };
    let _ = write!(out, "{:<10}{:<10}", "approach", "language");
    for p in points {
        let _ = write!(out, "{:>12}", p.level.to_string());
    }
    out.push('\n');
    for &mode in &first.report.modes {
        for scope in Scope::ALL {
            let _ = write!(out, "{:<10}{:<10}", mode.label(), scope.label());
            for p in points {
                let cell = p
                    .report
                    .accuracy(mode, scope)
                    .map(|a| format!("{:.2}%", a * 100.0))
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, "{cell:>12}");
            }
            out.push('\n');
        }
    }
    out
}
