use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AudioError;

/// Mono audio with samples normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    sample_rate: u32,
    samples: Vec<f64>,
}

impl Waveform {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidSampleRate);
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, s)| !(-1.0..=1.0).contains(*s)) {
            return Err(AudioError::SampleOutOfRange { index, value });
        }
        Ok(Self { sample_rate, samples })
    }

    pub fn silence(sample_rate: u32, len: usize) -> Result<Self, AudioError> {
        Self::new(sample_rate, vec![0.0; len])
    }

    /// A sine tone, handy for synthetic fixtures.
    pub fn tone(sample_rate: u32, frequency: f64, amplitude: f64, len: usize) -> Result<Self, AudioError> {
        let step = std::f64::consts::TAU * frequency / f64::from(sample_rate.max(1));
        let samples = (0..len).map(|i| amplitude * (step * i as f64).sin()).collect();
        Self::new(sample_rate, samples)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }

    /// Sample-wise difference `self - other`, unclamped.
    pub fn residual(&self, other: &Waveform) -> Result<Vec<f64>, AudioError> {
        check_compatible(self, other)?;
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect())
    }

    /// Reads a single-channel 16-bit PCM RIFF/WAVE file.
    pub fn read_wav(path: impl AsRef<Path>) -> Result<Self, AudioError> {
        let reader = hound::WavReader::open(path.as_ref()).map_err(wav_err)?;
        let spec = reader.spec();
        if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
            return Err(AudioError::UnsupportedFormat(format!(
                "{} channel(s), {} bits, {:?}",
                spec.channels, spec.bits_per_sample, spec.sample_format
            )));
        }
        let samples = reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<Result<Vec<_>, _>>()
            .map_err(wav_err)?;
        Self::new(spec.sample_rate, samples)
    }

    /// Writes a single-channel 16-bit PCM RIFF/WAVE file.
    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<(), AudioError> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(path.as_ref(), spec).map_err(wav_err)?;
        for &s in &self.samples {
            writer.write_sample(to_pcm16(s)).map_err(wav_err)?;
        }
        writer.finalize().map_err(wav_err)
    }
}

fn to_pcm16(sample: f64) -> i16 {
    (sample * 32768.0)
        .round()
        .clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16
}

fn wav_err(e: hound::Error) -> AudioError {
    AudioError::Wav(e.to_string())
}

pub(crate) fn check_compatible(a: &Waveform, b: &Waveform) -> Result<(), AudioError> {
    if a.sample_rate != b.sample_rate {
        return Err(AudioError::SampleRateMismatch(a.sample_rate, b.sample_rate));
    }
    if a.len() != b.len() {
        return Err(AudioError::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// Signal-to-noise ratio in dB: `10 * log10(energy(signal) / energy(noise))`.
pub fn compute_snr(signal: &Waveform, noise: &Waveform) -> Result<f64, AudioError> {
    check_compatible(signal, noise)?;
    snr_from_energies(signal.energy(), noise.energy())
}

pub(crate) fn snr_from_energies(signal: f64, noise: f64) -> Result<f64, AudioError> {
    if noise == 0.0 {
        return Err(AudioError::ZeroNoisePower);
    }
    Ok(10.0 * (signal / noise).log10())
}
