use serde::{Deserialize, Serialize};

use crate::{AudioError, Result, Sample};

/// Mono samples in `[-1, 1]` at `rate` Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer<T> {
    samples: Vec<T>,
    rate: u32,
}

impl<T: Sample> AudioBuffer<T> {
    pub fn new(samples: Vec<T>, rate: u32) -> Result<Self> {
        if rate == 0 {
            return Err(AudioError::InvalidBuffer("sample rate is zero".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite() || s.abs() > T::one()) {
            return Err(AudioError::InvalidBuffer(format!(
                "sample {i} is not finite or outside [-1, 1]"
            )));
        }
        Ok(Self { samples, rate })
    }

    pub fn silence(len: usize, rate: u32) -> Result<Self> {
        Self::new(vec![T::zero(); len], rate)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn rate(&self) -> u32 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> T {
        self.samples.iter().fold(T::zero(), |acc, &s| acc + s * s)
    }

    pub fn rms(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        (self.energy() / T::from_usize(self.len()).expect("length")).sqrt()
    }

    /// Same rate, new samples clamped into `[-1, 1]`.
    pub(crate) fn with_samples(&self, samples: Vec<T>) -> Self {
        let one = T::one();
        Self {
            samples: samples.into_iter().map(|s| s.max(-one).min(one)).collect(),
            rate: self.rate,
        }
    }
}

/// Half-open sample range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VoiceInterval {
    pub start: usize,
    pub end: usize,
}

impl VoiceInterval {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}
