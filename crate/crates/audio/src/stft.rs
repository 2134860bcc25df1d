use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::{lit, AudioError, Result, Sample};

/// Periodic Hann window of length `n`.
pub fn hann<T: Sample>(n: usize) -> Vec<T> {
    let two_pi = lit::<T>(std::f64::consts::TAU);
    let half = lit::<T>(0.5);
    let nf = T::from_usize(n).expect("window length");
    (0..n)
        .map(|i| half - half * (two_pi * T::from_usize(i).expect("index") / nf).cos())
        .collect()
}

/// Half-spectrum short-time Fourier transform of a zero-padded signal.
///
/// The signal is preceded by `fft_size` zeros, so every original sample is
/// covered by the same number of frames.
#[derive(Debug, Clone, PartialEq)]
pub struct Stft<T> {
    pub fft_size: usize,
    pub hop: usize,
    /// Original signal length.
    pub len: usize,
    /// `fft_size / 2 + 1` bins per frame.
    pub frames: Vec<Vec<Complex<T>>>,
}

pub(crate) fn check_params(fft_size: usize, hop: usize) -> Result<()> {
    if fft_size < 4 || !fft_size.is_multiple_of(2) {
        return Err(AudioError::InvalidParam(format!(
            "fft_size {fft_size} must be even and at least 4"
        )));
    }
    if hop == 0 || hop > fft_size / 2 {
        return Err(AudioError::InvalidParam(format!(
            "hop {hop} must be in 1..={}",
            fft_size / 2
        )));
    }
    Ok(())
}

fn frame_count(len: usize, fft_size: usize, hop: usize) -> usize {
    // Last original sample sits at fft_size + len - 1; frames start at k*hop
    // until one starts on or after it.
    (fft_size + len.max(1) - 1) / hop + 1
}

pub fn stft<T: Sample>(samples: &[T], fft_size: usize, hop: usize) -> Result<Stft<T>> {
    check_params(fft_size, hop)?;
    let window = hann::<T>(fft_size);
    let count = frame_count(samples.len(), fft_size, hop);
    let padded_len = (count - 1) * hop + fft_size;
    let mut padded = vec![T::zero(); padded_len.max(fft_size + samples.len())];
    padded[fft_size..fft_size + samples.len()].copy_from_slice(samples);

    let fft = FftPlanner::<T>::new().plan_fft_forward(fft_size);
    let bins = fft_size / 2 + 1;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); fft_size];
    let frames = (0..count)
        .map(|k| {
            let start = k * hop;
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = Complex::new(padded[start + i] * window[i], T::zero());
            }
            fft.process(&mut buf);
            buf[..bins].to_vec()
        })
        .collect();
    Ok(Stft {
        fft_size,
        hop,
        len: samples.len(),
        frames,
    })
}

/// Weighted overlap-add inverse of [`stft`], normalized per sample by the
/// summed squared window.
pub fn istft<T: Sample>(spec: &Stft<T>) -> Result<Vec<T>> {
    let (n, hop) = (spec.fft_size, spec.hop);
    check_params(n, hop)?;
    let bins = n / 2 + 1;
    if spec.frames.iter().any(|f| f.len() != bins) {
        return Err(AudioError::InvalidParam(format!("frames must have {bins} bins")));
    }
    let window = hann::<T>(n);
    let ifft = FftPlanner::<T>::new().plan_fft_inverse(n);
    let out_len = (spec.frames.len().saturating_sub(1)) * hop + n;
    let mut acc = vec![T::zero(); out_len.max(n + spec.len)];
    let mut norm = vec![T::zero(); acc.len()];
    let scale = T::one() / T::from_usize(n).expect("fft size");
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for (k, frame) in spec.frames.iter().enumerate() {
        buf[..bins].copy_from_slice(frame);
        for i in bins..n {
            buf[i] = frame[n - i].conj();
        }
        ifft.process(&mut buf);
        let start = k * hop;
        for i in 0..n {
            acc[start + i] = acc[start + i] + buf[i].re * scale * window[i];
            norm[start + i] = norm[start + i] + window[i] * window[i];
        }
    }
    let eps = lit::<T>(1e-10);
    Ok((n..n + spec.len)
        .map(|i| if norm[i] > eps { acc[i] / norm[i] } else { T::zero() })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chirp(n: usize) -> Vec<f64> {
        (0..n).map(|i| (0.001 * (i * i) as f64).sin() * 0.8).collect()
    }

    #[test]
    fn round_trip_f64() {
        for len in [0, 1, 255, 1024, 5000] {
            let x = chirp(len);
            let y = istft(&stft(&x, 1024, 256).unwrap()).unwrap();
            assert_eq!(y.len(), len);
            let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "len {len}: {err}");
        }
    }

    #[test]
    fn round_trip_f32_and_other_hops() {
        let x: Vec<f32> = chirp(3000).into_iter().map(|v| v as f32).collect();
        for (n, hop) in [(1024, 256), (512, 256), (256, 100)] {
            let y = istft(&stft(&x, n, hop).unwrap()).unwrap();
            let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
            assert!(err < 1e-5, "{n}/{hop}: {err}");
        }
    }

    #[test]
    fn window_is_periodic_hann() {
        let w = hann::<f64>(4);
        assert_eq!(w[0], 0.0);
        assert!((w[1] - 0.5).abs() < 1e-15 && (w[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(stft(&[0.0f64; 10], 1023, 256).is_err());
        assert!(stft(&[0.0f64; 10], 1024, 0).is_err());
        assert!(stft(&[0.0f64; 10], 1024, 600).is_err());
    }
}
