use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{ActionClass, Language};
use crate::audio::{FixtureRecord, Waveform};
use crate::lexicon::Lexicon;

/// What the provider receives for an utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    /// Recorded transcript, replayed by utterance id.
    Text(String),
    /// Audio plus the transcript an ideal recognizer returns for it.
    Audio {
        waveform: Arc<Waveform>,
        transcript: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledUtterance {
    pub utterance_id: String,
    pub language: Language,
    pub true_class: ActionClass,
    pub payload: Payload,
}

impl LabeledUtterance {
    /// Speaker or session group, taken from an `group/` prefix of the id.
    pub fn group(&self) -> Option<&str> {
        self.utterance_id
            .split_once('/')
            .map(|(g, _)| g)
            .filter(|g| !g.is_empty())
    }

    pub fn transcript(&self) -> &str {
        match &self.payload {
            Payload::Text(t) => t,
            Payload::Audio { transcript, .. } => transcript,
        }
    }
}

impl From<FixtureRecord> for LabeledUtterance {
    fn from(r: FixtureRecord) -> Self {
        Self {
            utterance_id: r.utterance_id,
            language: r.language,
            true_class: r.true_class,
            payload: Payload::Text(r.hypothesis),
        }
    }
}

pub fn corpus_from_records(records: Vec<FixtureRecord>) -> Vec<LabeledUtterance> {
    records.into_iter().map(LabeledUtterance::from).collect()
}

/// One utterance per lexicon entry whose hypothesis is the surface itself.
pub fn surface_corpus(lexicon: &Lexicon) -> Vec<FixtureRecord> {
    lexicon
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| FixtureRecord {
            utterance_id: format!("{}-{}-{:02}", e.language.code(), e.action_class.label(), i),
            language: e.language,
            true_class: e.action_class,
            hypothesis: e.surface.as_str().to_string(),
        })
        .collect()
}

/// `per_cell` utterances for every (class, language) pair, cycling through
/// that pair's surfaces and spreading them over `speakers` groups. With 15
/// per cell this gives 270 utterances, 135 per language.
pub fn balanced_corpus(lexicon: &Lexicon, per_cell: usize, speakers: usize) -> Vec<FixtureRecord> {
    let speakers = speakers.max(1);
    let mut out = Vec::with_capacity(per_cell * 18);
    for class in ActionClass::ALL {
        for language in Language::ALL {
            let surfaces: Vec<&str> = lexicon
                .entries()
                .iter()
                .filter(|e| e.action_class == class && e.language == language)
                .map(|e| e.surface.as_str())
                .collect();
            for k in 0..per_cell {
                out.push(FixtureRecord {
                    utterance_id: format!(
                        "p{}/{}-{}-{:02}",
                        k % speakers + 1,
                        language.code(),
                        class.label(),
                        k + 1
                    ),
                    language,
                    true_class: class,
                    hypothesis: surfaces[k % surfaces.len()].to_string(),
                });
            }
        }
    }
    out
}

/// Attaches a synthetic tone to every text utterance so the corpus can be
/// run through waveform noise. Each class gets its own pitch.
pub fn with_synthetic_audio(corpus: &[LabeledUtterance], sample_rate: u32, len: usize) -> Vec<LabeledUtterance> {
    corpus
        .iter()
        .map(|u| {
            let frequency = 200.0 + 40.0 * f64::from(u.true_class.ordinal());
            let waveform = Waveform::tone(sample_rate, frequency, 0.5, len).expect("amplitude 0.5 is in range");
            LabeledUtterance {
                payload: Payload::Audio {
                    waveform: Arc::new(waveform),
                    transcript: u.transcript().to_string(),
                },
                ..u.clone()
            }
        })
        .collect()
}
