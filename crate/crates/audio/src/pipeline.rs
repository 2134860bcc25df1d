use serde::{Deserialize, Serialize};

use crate::{
    complement, detect_voice, noise_profile, spectral_gate, AudioBuffer, AudioError, Result, Sample, VadParams,
    VoiceInterval,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleanParams {
    pub vad: VadParams,
    pub fft_size: usize,
    pub hop: usize,
    pub reduction_db: f64,
    pub gate_factor: f64,
}

impl Default for CleanParams {
    fn default() -> Self {
        Self {
            vad: VadParams::default(),
            fft_size: 1024,
            hop: 256,
            reduction_db: 30.0,
            gate_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanOutcome<T> {
    pub audio: AudioBuffer<T>,
    /// True when there was too little non-voice audio to estimate noise and
    /// the input was returned unchanged.
    pub passthrough: bool,
    pub voice: Vec<VoiceInterval>,
    pub noise_windows: usize,
}

/// Detect voice, profile the remaining audio as noise and gate it out.
pub fn clean<T: Sample>(buf: &AudioBuffer<T>, params: &CleanParams) -> Result<CleanOutcome<T>> {
    let voice = detect_voice(buf, &params.vad)?;
    clean_with_voice(buf, voice, params)
}

/// [`clean`] with voice intervals supplied by an external detector.
pub fn clean_with_voice<T: Sample>(
    buf: &AudioBuffer<T>,
    mut voice: Vec<VoiceInterval>,
    params: &CleanParams,
) -> Result<CleanOutcome<T>> {
    voice.sort();
    let nonvoice = complement(&voice, buf.len());
    let profile = match noise_profile(buf, &nonvoice, params.fft_size, params.hop) {
        Ok(p) => p,
        Err(AudioError::InsufficientNoise { .. }) => {
            return Ok(CleanOutcome {
                audio: buf.clone(),
                passthrough: true,
                voice,
                noise_windows: 0,
            })
        }
        Err(e) => return Err(e),
    };
    let audio = spectral_gate(buf, &profile, params.reduction_db, params.gate_factor)?;
    Ok(CleanOutcome {
        audio,
        passthrough: false,
        voice,
        noise_windows: profile.windows,
    })
}
