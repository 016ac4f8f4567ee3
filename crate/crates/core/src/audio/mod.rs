//! Audio-side plumbing: waveforms, uniform noise, SNR, transcript
//! degradation and speech providers.

mod fixture;
mod noise;
mod provider;
mod waveform;

use thiserror::Error;

pub use fixture::{load_fixture, parse_fixture, render_fixture, FixtureError, FixtureRecord};
pub use noise::{degrade_text, derive_seed, inject_noise, NoiseSpec, EDIT_ALPHABET};
pub use provider::{
    AcousticChannelProvider, ChannelModel, EditNoiseProvider, Hypothesis, InputKind, ProviderError, ProviderInput,
    ReplayProvider, SpeechProvider,
};
pub use waveform::{compute_snr, Waveform};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AudioError {
    #[error("sample rate must be positive")]
    InvalidSampleRate,
    #[error("sample {index} = {value} outside [-1, 1]")]
    SampleOutOfRange { index: usize, value: f64 },
    #[error("noise amplitude {0} outside [0, 1)")]
    InvalidNoiseAmplitude(f64),
    #[error("length mismatch: {0} vs {1} samples")]
    LengthMismatch(usize, usize),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),
    #[error("noise has zero power")]
    ZeroNoisePower,
    #[error("unsupported wav format: {0}")]
    UnsupportedFormat(String),
    #[error("wav: {0}")]
    Wav(String),
}
