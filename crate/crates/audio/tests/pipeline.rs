use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use rand_pcg::Pcg64;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use veilkit_audio::{
    clean, complement, detect_voice, istft, noise_profile, read_wav, spectral_gate, stft, write_wav, AudioBuffer,
    Buffer, CleanParams, NoiseProfile, VadParams,
};

const RATE: u32 = 16_000;
const TONE_HZ: f64 = 440.0;

fn noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let dist = Normal::new(0.0, sigma).unwrap();
    (0..n).map(|_| dist.sample(&mut rng).clamp(-1.0, 1.0)).collect()
}

fn tone(n: usize, amp: f64) -> Vec<f64> {
    (0..n)
        .map(|i| amp * (std::f64::consts::TAU * TONE_HZ * i as f64 / f64::from(RATE)).sin())
        .collect()
}

/// 1 s of noise, then 2 s of tone plus noise.
fn tone_in_noise() -> Buffer {
    let n = RATE as usize;
    let mut x = noise(3 * n, 0.05, 7);
    for (s, t) in x[n..].iter_mut().zip(tone(2 * n, 0.5)) {
        *s += t;
    }
    AudioBuffer::new(x, RATE).unwrap()
}

/// Energy within ±20 Hz of the tone against everything else, in dB.
fn snr_db(x: &[f64]) -> f64 {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let hz_per_bin = f64::from(RATE) / buf.len() as f64;
    let (mut band, mut rest) = (0.0, 0.0);
    for (k, c) in buf[..buf.len() / 2].iter().enumerate() {
        if (k as f64 * hz_per_bin - TONE_HZ).abs() <= 20.0 {
            band += c.norm_sqr();
        } else {
            rest += c.norm_sqr();
        }
    }
    10.0 * (band / rest).log10()
}

#[test]
fn stft_round_trip_is_exact_to_1e6() {
    let x = tone_in_noise();
    let y = istft(&stft(x.samples(), 1024, 256).unwrap()).unwrap();
    let err = x
        .samples()
        .iter()
        .zip(&y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn clean_improves_snr_by_10_db() {
    let x = tone_in_noise();
    let out = clean(&x, &CleanParams::default()).unwrap();
    assert!(!out.passthrough);
    assert_eq!(out.audio.len(), x.len());
    let (before, after) = (snr_db(x.samples()), snr_db(out.audio.samples()));
    assert!(after - before >= 10.0, "before {before:.2} dB, after {after:.2} dB");
}

#[test]
fn vad_finds_the_tone_in_noise() {
    let x = tone_in_noise();
    let voice = detect_voice(&x, &VadParams::default()).unwrap();
    assert_eq!(voice.len(), 1);
    let frame = VadParams::default().frame_len(RATE).unwrap();
    assert!(voice[0].start.abs_diff(RATE as usize) <= 2 * frame);
    assert_eq!(voice[0].end, x.len());
}

#[test]
fn pure_noise_gated_by_its_own_profile() {
    let x = AudioBuffer::new(noise(2 * RATE as usize, 0.1, 11), RATE).unwrap();
    let profile = noise_profile(&x, &complement(&[], x.len()), 1024, 256).unwrap();
    let y = spectral_gate(&x, &profile, 60.0, 4.0).unwrap();
    assert!(y.rms() <= 0.05 * x.rms(), "{} vs {}", y.rms(), x.rms());
}

#[test]
fn white_noise_profile_is_roughly_flat() {
    let x = AudioBuffer::new(noise(4 * RATE as usize, 0.1, 3), RATE).unwrap();
    let p = noise_profile(&x, &complement(&[], x.len()), 1024, 256).unwrap();
    // Ignore DC and Nyquist, whose magnitudes follow a different law.
    let inner = &p.magnitudes[1..512];
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    assert!(inner.iter().all(|m| (m / mean - 1.0).abs() < 0.35));
}

#[test]
fn silence_in_silence_out() {
    let x = Buffer::silence(RATE as usize, RATE).unwrap();
    let out = clean(&x, &CleanParams::default()).unwrap();
    assert!(out.audio.samples().iter().all(|&s| s == 0.0));
    assert_eq!(out.audio.len(), x.len());
}

#[test]
fn all_voiced_input_passes_through() {
    let x = AudioBuffer::new(tone(RATE as usize, 0.5), RATE).unwrap();
    let out = clean(&x, &CleanParams::default()).unwrap();
    assert!(out.passthrough);
    assert_eq!(out.audio, x);
}

#[test]
fn lengths_are_preserved_and_energy_never_grows() {
    for (i, len) in [1usize, 100, 1023, 1024, 1025, 4000, 17_001].into_iter().enumerate() {
        let x = AudioBuffer::new(noise(len, 0.2, i as u64), RATE).unwrap();
        let profile = NoiseProfile {
            magnitudes: noise(513, 1.0, 100 + i as u64).into_iter().map(f64::abs).collect(),
            ..NoiseProfile::zero(1024, 256).unwrap()
        };
        for factor in [0.0, 1.0, 4.0, 50.0] {
            let y = spectral_gate(&x, &profile, 20.0, factor).unwrap();
            assert_eq!(y.len(), len);
            assert!(y.energy() <= x.energy() * (1.0 + 1e-9), "len {len} factor {factor}");
        }
        assert_eq!(clean(&x, &CleanParams::default()).unwrap().audio.len(), len);
    }
}

#[test]
fn processing_is_deterministic() {
    let x = tone_in_noise();
    let a = clean(&x, &CleanParams::default()).unwrap();
    let b = clean(&x, &CleanParams::default()).unwrap();
    assert_eq!(a.audio.samples(), b.audio.samples());
}

#[test]
fn f32_pipeline_matches_f64_closely() {
    let x = tone_in_noise();
    let x32 = AudioBuffer::<f32>::new(x.samples().iter().map(|&v| v as f32).collect(), RATE).unwrap();
    let a = clean(&x, &CleanParams::default()).unwrap();
    let b = clean(&x32, &CleanParams::default()).unwrap();
    assert_eq!(a.voice, b.voice);
    let err = a
        .audio
        .samples()
        .iter()
        .zip(b.audio.samples())
        .map(|(p, q)| (p - f64::from(*q)).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err}");
}

#[test]
fn wav_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.wav"), dir.path().join("b.wav"));
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: RATE,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let raw: Vec<i16> = (0..5000).map(|i| ((i * 7919) % 65536 - 32768) as i16).collect();
    let mut w = hound::WavWriter::create(&a, spec).unwrap();
    for &s in &raw {
        w.write_sample(s).unwrap();
    }
    w.finalize().unwrap();

    let (buf, info) = read_wav::<f64>(&a).unwrap();
    assert_eq!((info.channels, info.rate), (1, RATE));
    write_wav(&b, &buf).unwrap();
    let back: Vec<i16> = hound::WavReader::open(&b)
        .unwrap()
        .samples::<i16>()
        .map(Result::unwrap)
        .collect();
    assert_eq!(back, raw);
}

#[test]
fn stereo_is_averaged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.wav");
    let spec = hound::WavSpec {
        channels: 2,
        sample_rate: 8_000,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(&path, spec).unwrap();
    for (l, r) in [(16384i16, 0i16), (-16384, -16384)] {
        w.write_sample(l).unwrap();
        w.write_sample(r).unwrap();
    }
    w.finalize().unwrap();
    let (buf, info) = read_wav::<f64>(&path).unwrap();
    assert_eq!(info.channels, 2);
    assert_eq!(buf.samples(), [0.25, -0.5]);
}
