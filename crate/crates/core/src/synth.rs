//! Seeded synthetic corpus generator.
//!
//! Each class draws tokens from its own multinomial distribution
//!
//! ```text
//! p_c = (1 - separation) * shared + separation * specific_c
//! ```
//!
//! where `shared` is a Zipf law over the whole token set (ranks shuffled) and
//! `specific_real` / `specific_fake` are Zipf laws over the first and second
//! halves of the token set. `separation = 0` makes the classes
//! indistinguishable; `separation = 1` gives disjoint supports.
//!
//! Tokens are short strings of Bangla consonants and vowel signs, so they pass
//! the default character filter untouched.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Label, LabeledCorpus};

pub const MIN_DOC_TOKENS: usize = 20;
pub const MAX_DOC_TOKENS: usize = 200;

/// Fake share of the scraped dataset (993 of 2541 articles).
pub const DEFAULT_FAKE_FRACTION: f64 = 0.3908;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub fake_fraction: f64,
    pub vocab_size: usize,
    pub separation: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_docs: 2541,
            fake_fraction: DEFAULT_FAKE_FRACTION,
            vocab_size: 2000,
            separation: 0.8,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidParameter(msg));
        if self.n_docs < 4 {
            return bad(format!("n_docs must be at least 4, got {}", self.n_docs));
        }
        if self.vocab_size < 4 {
            return bad(format!("vocab_size must be at least 4, got {}", self.vocab_size));
        }
        if !(self.fake_fraction > 0.0 && self.fake_fraction < 1.0) {
            return bad(format!("fake_fraction must lie in (0, 1), got {}", self.fake_fraction));
        }
        if !(0.0..=1.0).contains(&self.separation) {
            return bad(format!("separation must lie in [0, 1], got {}", self.separation));
        }
        Ok(())
    }

    /// Exact number of fake documents: `round(n * fake_fraction)`, kept in
    /// `1..n` so both classes appear.
    pub fn n_fake(&self) -> usize {
        ((self.n_docs as f64 * self.fake_fraction).round() as usize).clamp(1, self.n_docs - 1)
    }
}

const CONSONANTS: &[char] = &[
    'ক', 'খ', 'গ', 'ঘ', 'ঙ', 'চ', 'ছ', 'জ', 'ঝ', 'ঞ', 'ট', 'ঠ', 'ড', 'ঢ', 'ণ', 'ত', 'থ', 'দ', 'ধ', 'ন', 'প',
    'ফ', 'ব', 'ভ', 'ম', 'য', 'র', 'ল', 'শ', 'ষ', 'স', 'হ',
];
const VOWEL_SIGNS: &[Option<char>] = &[
    None,
    Some('া'),
    Some('ি'),
    Some('ী'),
    Some('ু'),
    Some('ূ'),
    Some('ে'),
    Some('ো'),
];

/// Distinct pseudo-word for `index`. Each syllable is a consonant plus an
/// optional vowel sign, so a word parses back into its syllables uniquely.
pub fn synthetic_word(index: usize, min_syllables: usize) -> String {
    let base = CONSONANTS.len() * VOWEL_SIGNS.len();
    let mut digits = Vec::new();
    let mut rest = index;
    while rest > 0 || digits.len() < min_syllables.max(1) {
        digits.push(rest % base);
        rest /= base;
    }
    let mut word = String::new();
    for d in digits.into_iter().rev() {
        word.push(CONSONANTS[d % CONSONANTS.len()]);
        if let Some(sign) = VOWEL_SIGNS[d / CONSONANTS.len()] {
            word.push(sign);
        }
    }
    word
}

fn zipf(len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (1..=len).map(|r| 1.0 / r as f64).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Token distributions for `[Real, Fake]`.
fn class_distributions(config: &SynthConfig, rng: &mut ChaCha8Rng) -> [Vec<f64>; 2] {
    let v = config.vocab_size;
    let half = v / 2;

    let mut ranks: Vec<usize> = (0..v).collect();
    ranks.shuffle(rng);
    let mut shared = vec![0.0; v];
    for (weight, &term) in zipf(v).into_iter().zip(&ranks) {
        shared[term] = weight;
    }

    let specific = |range: std::ops::Range<usize>| {
        let mut p = vec![0.0; v];
        for (weight, term) in zipf(range.len()).into_iter().zip(range) {
            p[term] = weight;
        }
        p
    };
    let s = config.separation;
    [specific(0..half), specific(half..v)].map(|spec| {
        shared
            .iter()
            .zip(spec)
            .map(|(&a, b)| (1.0 - s) * a + s * b)
            .collect()
    })
}

pub fn generate(config: &SynthConfig) -> Result<LabeledCorpus, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let min_syllables = 2;
    let words: Vec<String> = (0..config.vocab_size).map(|i| synthetic_word(i, min_syllables)).collect();
    let samplers = class_distributions(config, &mut rng).map(|p| {
        WeightedIndex::new(&p).expect("class distribution has positive mass")
    });

    let n_fake = config.n_fake();
    let mut labels: Vec<Label> = std::iter::repeat_n(Label::Fake, n_fake)
        .chain(std::iter::repeat_n(Label::Real, config.n_docs - n_fake))
        .collect();
    labels.shuffle(&mut rng);

    let width = config.n_docs.to_string().len();
    let documents = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let len = rng.random_range(MIN_DOC_TOKENS..=MAX_DOC_TOKENS);
            let sampler = &samplers[label.index()];
            let text = (0..len)
                .map(|_| words[sampler.sample(&mut rng)].as_str())
                .collect::<Vec<_>>()
                .join(" ");
            Document {
                id: format!("synth-{i:0width$}"),
                text,
                label,
            }
        })
        .collect();
    Ok(LabeledCorpus::new(documents).expect("generated ids are unique"))
}
