use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::stft::check_params;
use crate::{hann, istft, lit, stft, AudioBuffer, AudioError, Result, Sample, VoiceInterval};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    HannPeriodic,
}

/// Mean magnitude per frequency bin of the noise-only material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile<T> {
    pub magnitudes: Vec<T>,
    pub fft_size: usize,
    pub hop: usize,
    pub window: Window,
    /// Analysis windows averaged into the estimate.
    pub windows: usize,
}

impl<T: Sample> NoiseProfile<T> {
    pub fn zero(fft_size: usize, hop: usize) -> Result<Self> {
        check_params(fft_size, hop)?;
        Ok(Self {
            magnitudes: vec![T::zero(); fft_size / 2 + 1],
            fft_size,
            hop,
            window: Window::HannPeriodic,
            windows: 0,
        })
    }
}

/// Average windowed magnitude spectrum over every analysis window lying
/// entirely inside one of the `nonvoice` intervals.
pub fn noise_profile<T: Sample>(
    buf: &AudioBuffer<T>,
    nonvoice: &[VoiceInterval],
    fft_size: usize,
    hop: usize,
) -> Result<NoiseProfile<T>> {
    check_params(fft_size, hop)?;
    let window = hann::<T>(fft_size);
    let fft = FftPlanner::<T>::new().plan_fft_forward(fft_size);
    let bins = fft_size / 2 + 1;
    let mut sum = vec![T::zero(); bins];
    let mut count = 0usize;
    let mut frame = vec![Complex::new(T::zero(), T::zero()); fft_size];
    let samples = buf.samples();
    for iv in nonvoice {
        let end = iv.end.min(samples.len());
        let mut start = iv.start;
        while start + fft_size <= end {
            for (i, slot) in frame.iter_mut().enumerate() {
                *slot = Complex::new(samples[start + i] * window[i], T::zero());
            }
            fft.process(&mut frame);
            for (acc, x) in sum.iter_mut().zip(&frame[..bins]) {
                *acc = *acc + x.norm();
            }
            count += 1;
            start += hop;
        }
    }
    if count == 0 {
        return Err(AudioError::InsufficientNoise { needed: fft_size });
    }
    let n = T::from_usize(count).expect("window count");
    Ok(NoiseProfile {
        magnitudes: sum.into_iter().map(|s| s / n).collect(),
        fft_size,
        hop,
        window: Window::HannPeriodic,
        windows: count,
    })
}

/// Attenuate by `reduction_db` every time-frequency bin whose magnitude is
/// below `gate_factor` times the profile. Phase is kept; output length
/// equals input length.
pub fn spectral_gate<T: Sample>(
    buf: &AudioBuffer<T>,
    profile: &NoiseProfile<T>,
    reduction_db: f64,
    gate_factor: f64,
) -> Result<AudioBuffer<T>> {
    if profile.magnitudes.len() != profile.fft_size / 2 + 1 {
        return Err(AudioError::InvalidParam(
            "profile bin count does not match its fft_size".into(),
        ));
    }
    if !(reduction_db.is_finite() && reduction_db >= 0.0) {
        return Err(AudioError::InvalidParam(format!(
            "reduction_db {reduction_db} must be finite and >= 0"
        )));
    }
    if !(gate_factor.is_finite() && gate_factor >= 0.0) {
        return Err(AudioError::InvalidParam(format!(
            "gate_factor {gate_factor} must be finite and >= 0"
        )));
    }
    let mut spec = stft(buf.samples(), profile.fft_size, profile.hop)?;
    let gain = lit::<T>(10f64.powf(-reduction_db / 20.0));
    let thresholds: Vec<T> = profile.magnitudes.iter().map(|&m| m * lit(gate_factor)).collect();
    for frame in &mut spec.frames {
        for (x, &t) in frame.iter_mut().zip(&thresholds) {
            if x.norm() < t {
                *x = *x * gain;
            }
        }
    }
    Ok(buf.with_samples(istft(&spec)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complement;

    #[test]
    fn silent_region_gives_zero_profile() {
        let b = AudioBuffer::<f64>::silence(4096, 16_000).unwrap();
        let p = noise_profile(&b, &complement(&[], b.len()), 1024, 256).unwrap();
        assert_eq!(p.magnitudes.len(), 513);
        assert!(p.magnitudes.iter().all(|&m| m == 0.0));
        assert_eq!(p.windows, 13);
    }

    #[test]
    fn too_little_noise_is_an_error() {
        let b = AudioBuffer::<f64>::silence(4096, 16_000).unwrap();
        assert!(matches!(
            noise_profile(&b, &[], 1024, 256),
            Err(AudioError::InsufficientNoise { .. })
        ));
        assert!(noise_profile(&b, &[VoiceInterval::new(0, 1000)], 1024, 256).is_err());
    }

    #[test]
    fn zero_profile_passes_signal() {
        let x: Vec<f64> = (0..3000).map(|i| 0.3 * (i as f64 * 0.05).sin()).collect();
        let b = AudioBuffer::new(x.clone(), 16_000).unwrap();
        let y = spectral_gate(&b, &NoiseProfile::zero(1024, 256).unwrap(), 60.0, 4.0).unwrap();
        let err = x
            .iter()
            .zip(y.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6);
    }

    #[test]
    fn mismatched_profile_is_rejected() {
        let b = AudioBuffer::<f64>::silence(100, 16_000).unwrap();
        let mut p = NoiseProfile::zero(1024, 256).unwrap();
        p.magnitudes.pop();
        assert!(spectral_gate(&b, &p, 10.0, 1.0).is_err());
        let p = NoiseProfile::zero(1024, 256).unwrap();
        assert!(spectral_gate(&b, &p, -1.0, 1.0).is_err());
    }
}
