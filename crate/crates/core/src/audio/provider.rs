//! Speech provider contract and the offline providers bundled with the crate.
//!
//! A provider turns one utterance into a [`Hypothesis`]. Bundled providers
//! are deterministic and hold no mutable state, so they can be shared
//! across threads and called concurrently. A networked recognizer would
//! implement the same trait but is not part of this crate.

use std::collections::HashMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::fixture::{load_fixture, parse_fixture, FixtureError, FixtureRecord};
use super::noise::{degrade_text, derive_seed};
use super::waveform::snr_from_energies;
use super::Waveform;

/// A transcript returned by a provider for one utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub text: String,
    pub provider_id: String,
    pub utterance_id: String,
}

impl Hypothesis {
    pub fn new(text: impl Into<String>, provider_id: impl Into<String>, utterance_id: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            provider_id: provider_id.into(),
            utterance_id: utterance_id.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    UtteranceId,
    Waveform,
}

#[derive(Debug, Clone, Copy)]
pub enum ProviderInput<'a> {
    Utterance(&'a str),
    Audio {
        utterance_id: &'a str,
        waveform: &'a Waveform,
    },
}

impl ProviderInput<'_> {
    pub fn utterance_id(&self) -> &str {
        match self {
            ProviderInput::Utterance(id) => id,
            ProviderInput::Audio { utterance_id, .. } => utterance_id,
        }
    }

    pub fn kind(&self) -> InputKind {
        match self {
            ProviderInput::Utterance(_) => InputKind::UtteranceId,
            ProviderInput::Audio { .. } => InputKind::Waveform,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProviderError {
    #[error("unknown utterance `{0}`")]
    UnknownUtterance(String),
    #[error("provider `{provider}` expects {expected:?} input")]
    UnsupportedInput { provider: String, expected: InputKind },
    #[error("audio: {0}")]
    Audio(#[from] super::AudioError),
}

pub trait SpeechProvider: Send + Sync {
    fn provider_id(&self) -> &str;

    fn input_kind(&self) -> InputKind;

    fn transcribe(&self, input: ProviderInput<'_>) -> Result<Hypothesis, ProviderError>;
}

impl<P: SpeechProvider + ?Sized> SpeechProvider for &P {
    fn provider_id(&self) -> &str {
        (**self).provider_id()
    }

    fn input_kind(&self) -> InputKind {
        (**self).input_kind()
    }

    fn transcribe(&self, input: ProviderInput<'_>) -> Result<Hypothesis, ProviderError> {
        (**self).transcribe(input)
    }
}

impl<P: SpeechProvider + ?Sized> SpeechProvider for Box<P> {
    fn provider_id(&self) -> &str {
        (**self).provider_id()
    }

    fn input_kind(&self) -> InputKind {
        (**self).input_kind()
    }

    fn transcribe(&self, input: ProviderInput<'_>) -> Result<Hypothesis, ProviderError> {
        (**self).transcribe(input)
    }
}

/// Replays recorded transcripts keyed by utterance id.
#[derive(Debug, Clone)]
pub struct ReplayProvider {
    id: String,
    transcripts: HashMap<String, String>,
}

impl ReplayProvider {
    pub const ID: &'static str = "replay";

    pub fn new(transcripts: HashMap<String, String>) -> Self {
        Self {
            id: Self::ID.to_string(),
            transcripts,
        }
    }

    pub fn from_records(records: &[FixtureRecord]) -> Self {
        Self::new(
            records
                .iter()
                .map(|r| (r.utterance_id.clone(), r.hypothesis.clone()))
                .collect(),
        )
    }

    pub fn from_fixture_text(source: &str) -> Result<Self, FixtureError> {
        Ok(Self::from_records(&parse_fixture(source)?))
    }

    pub fn from_fixture_file(path: impl AsRef<Path>) -> Result<Self, FixtureError> {
        Ok(Self::from_records(&load_fixture(path)?))
    }

    pub fn len(&self) -> usize {
        self.transcripts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transcripts.is_empty()
    }
}

impl SpeechProvider for ReplayProvider {
    fn provider_id(&self) -> &str {
        &self.id
    }

    fn input_kind(&self) -> InputKind {
        InputKind::UtteranceId
    }

    fn transcribe(&self, input: ProviderInput<'_>) -> Result<Hypothesis, ProviderError> {
        let ProviderInput::Utterance(id) = input else {
            return Err(ProviderError::UnsupportedInput {
                provider: self.id.clone(),
                expected: InputKind::UtteranceId,
            });
        };
        let text = self
            .transcripts
            .get(id)
            .ok_or_else(|| ProviderError::UnknownUtterance(id.to_string()))?;
        Ok(Hypothesis::new(text.clone(), self.id.clone(), id))
    }
}

/// Wraps a provider and applies exactly `edits` random character edits to
/// every transcript. The edits depend only on the utterance id and seed.
#[derive(Debug, Clone)]
pub struct EditNoiseProvider<P> {
    base: P,
    edits: usize,
    seed: u64,
    id: String,
}

impl<P: SpeechProvider> EditNoiseProvider<P> {
    pub fn new(base: P, edits: usize, seed: u64) -> Self {
        let id = format!("{}+edits{}", base.provider_id(), edits);
        Self { base, edits, seed, id }
    }

    pub fn edits(&self) -> usize {
        self.edits
    }
}

impl<P: SpeechProvider> SpeechProvider for EditNoiseProvider<P> {
    fn provider_id(&self) -> &str {
        &self.id
    }

    fn input_kind(&self) -> InputKind {
        self.base.input_kind()
    }

    fn transcribe(&self, input: ProviderInput<'_>) -> Result<Hypothesis, ProviderError> {
        let mut hypothesis = self.base.transcribe(input)?;
        if self.edits > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, &hypothesis.utterance_id));
            hypothesis.text = degrade_text(&hypothesis.text, self.edits, &mut rng);
        }
        hypothesis.provider_id = self.id.clone();
        Ok(hypothesis)
    }
}

/// Tuning for [`AcousticChannelProvider`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    /// At or above this SNR the transcript is returned untouched.
    pub clean_snr_db: f64,
    /// Each further `db_per_edit` below `clean_snr_db` costs one more edit.
    pub db_per_edit: f64,
    pub max_edits: usize,
    pub seed: u64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            clean_snr_db: 20.0,
            db_per_edit: 6.0,
            max_edits: 4,
            seed: 0,
        }
    }
}

impl ChannelModel {
    /// Number of transcript edits charged for a given SNR.
    pub fn edits_for_snr(&self, snr_db: f64) -> usize {
        if snr_db >= self.clean_snr_db {
            return 0;
        }
        let deficit = (self.clean_snr_db - snr_db) / self.db_per_edit;
        (deficit.ceil() as usize).min(self.max_edits)
    }
}

/// Offline stand-in for a recognizer fed with audio.
///
/// Each known utterance has a reference transcript and a clean reference
/// waveform. The incoming waveform is compared with the reference; the SNR
/// of the difference decides how many character edits the transcript
/// suffers. This gives waveform-level noise a deterministic, monotone
/// effect on recognition without any acoustic model.
#[derive(Debug, Clone)]
pub struct AcousticChannelProvider {
    id: String,
    references: HashMap<String, (String, Waveform)>,
    model: ChannelModel,
}

impl AcousticChannelProvider {
    pub const ID: &'static str = "acoustic-channel";

    pub fn new(references: HashMap<String, (String, Waveform)>, model: ChannelModel) -> Self {
        Self {
            id: Self::ID.to_string(),
            references,
            model,
        }
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }
}

impl SpeechProvider for AcousticChannelProvider {
    fn provider_id(&self) -> &str {
        &self.id
    }

    fn input_kind(&self) -> InputKind {
        InputKind::Waveform
    }

    fn transcribe(&self, input: ProviderInput<'_>) -> Result<Hypothesis, ProviderError> {
        let ProviderInput::Audio { utterance_id, waveform } = input else {
            return Err(ProviderError::UnsupportedInput {
                provider: self.id.clone(),
                expected: InputKind::Waveform,
            });
        };
        let (transcript, reference) = self
            .references
            .get(utterance_id)
            .ok_or_else(|| ProviderError::UnknownUtterance(utterance_id.to_string()))?;
        let residual = waveform.residual(reference)?;
        let noise_energy: f64 = residual.iter().map(|r| r * r).sum();
        let edits = if noise_energy == 0.0 {
            0
        } else {
            self.model
                .edits_for_snr(snr_from_energies(reference.energy(), noise_energy)?)
        };
        let text = if edits == 0 {
            transcript.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.model.seed, utterance_id));
            degrade_text(transcript, edits, &mut rng)
        };
        Ok(Hypothesis::new(text, self.id.clone(), utterance_id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::{inject_noise, NoiseSpec};
    use crate::matcher::levenshtein;

    fn replay() -> ReplayProvider {
        ReplayProvider::from_fixture_text("u1\ten\tgo_left\tgo left\nu2\ten\tstop\tstop\n").unwrap()
    }

    #[test]
    fn replay_returns_recorded_text() {
        let p = replay();
        let h = p.transcribe(ProviderInput::Utterance("u1")).unwrap();
        assert_eq!(h, Hypothesis::new("go left", "replay", "u1"));
        assert_eq!(
            p.transcribe(ProviderInput::Utterance("u3")),
            Err(ProviderError::UnknownUtterance("u3".into()))
        );
        let w = Waveform::silence(8000, 4).unwrap();
        assert!(matches!(
            p.transcribe(ProviderInput::Audio {
                utterance_id: "u1",
                waveform: &w
            }),
            Err(ProviderError::UnsupportedInput { .. })
        ));
    }

    #[test]
    fn replay_rejects_duplicate_fixture_ids() {
        assert!(ReplayProvider::from_fixture_text("u1\ten\tup\tup\nu1\ten\tup\tgo up\n").is_err());
    }

    #[test]
    fn zero_edits_is_transparent() {
        let p = EditNoiseProvider::new(replay(), 0, 5);
        for id in ["u1", "u2"] {
            let a = p.transcribe(ProviderInput::Utterance(id)).unwrap();
            let b = replay().transcribe(ProviderInput::Utterance(id)).unwrap();
            assert_eq!(a.text, b.text);
        }
    }

    #[test]
    fn single_edit_on_stop() {
        for seed in 0..50 {
            let p = EditNoiseProvider::new(replay(), 1, seed);
            let h = p.transcribe(ProviderInput::Utterance("u2")).unwrap();
            assert!(levenshtein("stop", &h.text) <= 1);
            assert_eq!(h, p.transcribe(ProviderInput::Utterance("u2")).unwrap());
            assert_eq!(h.utterance_id, "u2");
        }
    }

    #[test]
    fn edit_noise_propagates_base_errors() {
        let p = EditNoiseProvider::new(replay(), 2, 5);
        assert_eq!(
            p.transcribe(ProviderInput::Utterance("nope")),
            Err(ProviderError::UnknownUtterance("nope".into()))
        );
    }

    #[test]
    fn channel_edits_grow_with_noise() {
        let model = ChannelModel::default();
        assert_eq!(model.edits_for_snr(30.0), 0);
        assert_eq!(model.edits_for_snr(20.0), 0);
        assert_eq!(model.edits_for_snr(19.0), 1);
        assert_eq!(model.edits_for_snr(8.0), 2);
        assert_eq!(model.edits_for_snr(-100.0), 4);

        let clean = Waveform::tone(8000, 220.0, 0.5, 8000).unwrap();
        let mut refs = HashMap::new();
        refs.insert("u1".to_string(), ("go forward".to_string(), clean.clone()));
        let p = AcousticChannelProvider::new(refs, model);
        let h = p
            .transcribe(ProviderInput::Audio {
                utterance_id: "u1",
                waveform: &clean,
            })
            .unwrap();
        assert_eq!(h.text, "go forward");
        let noisy = inject_noise(&clean, &NoiseSpec::new(0.15, 1).unwrap());
        let h = p
            .transcribe(ProviderInput::Audio {
                utterance_id: "u1",
                waveform: &noisy,
            })
            .unwrap();
        assert!(levenshtein("go forward", &h.text) <= model.max_edits);
        assert!(p.transcribe(ProviderInput::Utterance("u1")).is_err());
    }
}
