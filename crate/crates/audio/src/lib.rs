//! Speech cleaning: energy-based voice activity detection, a noise profile
//! taken from the non-voice regions, spectral gating and reconstruction.
//!
//! Processing is generic over the sample type ([`Sample`]: `f32` or `f64`);
//! the crate-root aliases fix it to `f64`.

mod gate;
mod pipeline;
mod signal;
mod stft;
mod vad;
mod wav;

use num_traits::{Float, FromPrimitive};

pub use gate::{noise_profile, spectral_gate, NoiseProfile, Window};
pub use pipeline::{clean, clean_with_voice, CleanOutcome, CleanParams};
pub use signal::{AudioBuffer, VoiceInterval};
pub use stft::{hann, istft, stft, Stft};
pub use vad::{complement, detect_voice, VadParams};
pub use wav::{read_intervals_json, read_wav, write_intervals_json, write_wav, WavInfo};

/// Floating-point sample type usable with the FFT.
pub trait Sample: rustfft::FftNum + Float + FromPrimitive {}

impl<T: rustfft::FftNum + Float + FromPrimitive> Sample for T {}

pub(crate) fn lit<T: Sample>(x: f64) -> T {
    T::from_f64(x).expect("constant representable")
}

pub type Buffer = AudioBuffer<f64>;
pub type Profile = NoiseProfile<f64>;
pub type Outcome = CleanOutcome<f64>;

#[derive(Debug, thiserror::Error)]
pub enum AudioError {
    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("not enough non-voice audio for a noise profile (need {needed} samples in one region)")]
    InsufficientNoise { needed: usize },
    #[error("unsupported wav format: {0}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Wav(#[from] hound::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = AudioError> = std::result::Result<T, E>;
