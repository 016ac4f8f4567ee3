use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AudioError, Waveform};

/// Uniform additive noise `U(-amplitude, amplitude)` relative to full scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    amplitude: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(amplitude: f64, seed: u64) -> Result<Self, AudioError> {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(AudioError::InvalidNoiseAmplitude(amplitude));
        }
        Ok(Self { amplitude, seed })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Adds i.i.d. uniform noise to every sample and clips to [-1, 1].
pub fn inject_noise(waveform: &Waveform, spec: &NoiseSpec) -> Waveform {
    let n = spec.amplitude;
    if n == 0.0 {
        return waveform.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dist = Uniform::new_inclusive(-n, n).expect("amplitude validated");
    let samples = waveform
        .samples()
        .iter()
        .map(|s| (s + dist.sample(&mut rng).clamp(-n, n)).clamp(-1.0, 1.0))
        .collect();
    Waveform::new(waveform.sample_rate(), samples).expect("clipped samples stay in range")
}

/// Characters used for transcript edits: lowercase Latin, Spanish
/// diacritics and space.
pub const EDIT_ALPHABET: &[char] = &[
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r', 's', 't', 'u', 'v', 'w',
    'x', 'y', 'z', 'á', 'é', 'í', 'ó', 'ú', 'ü', 'ñ', ' ',
];

/// Applies exactly `edits` random character edits (substitution, insertion
/// or deletion) to `text`. Substitutions always change the character, so
/// each edit moves the string by one, though later edits may undo earlier ones.
pub fn degrade_text<R: Rng + ?Sized>(text: &str, edits: usize, rng: &mut R) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..edits {
        let op = if chars.is_empty() { 1 } else { rng.random_range(0..3) };
        match op {
            0 => {
                let at = rng.random_range(0..chars.len());
                let current = chars[at];
                let replacement = loop {
                    let c = EDIT_ALPHABET[rng.random_range(0..EDIT_ALPHABET.len())];
                    if c != current {
                        break c;
                    }
                };
                chars[at] = replacement;
            }
            1 => {
                let at = rng.random_range(0..=chars.len());
                chars.insert(at, EDIT_ALPHABET[rng.random_range(0..EDIT_ALPHABET.len())]);
            }
            _ => {
                let at = rng.random_range(0..chars.len());
                chars.remove(at);
            }
        }
    }
    chars.into_iter().collect()
}

/// Stable per-key seed: FNV-1a over the key bytes, mixed with `seed`
/// through a splitmix64 finalizer.
pub fn derive_seed(seed: u64, key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = h ^ seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
