use serde::{Deserialize, Serialize};

use crate::{lit, AudioBuffer, AudioError, Result, Sample, VoiceInterval};

/// Energy VAD settings.
///
/// A frame is voiced when its RMS exceeds `reference · 10^(threshold_db/20)`,
/// where `reference` is the median frame RMS capped at
/// `10^(max_noise_floor_db/20)`. The cap keeps recordings that are voiced
/// throughout from raising the reference to the speech level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VadParams {
    pub frame_ms: f64,
    pub threshold_db: f64,
    pub hangover_frames: usize,
    pub max_noise_floor_db: f64,
}

impl Default for VadParams {
    fn default() -> Self {
        Self {
            frame_ms: 20.0,
            threshold_db: 6.0,
            hangover_frames: 2,
            max_noise_floor_db: -30.0,
        }
    }
}

impl VadParams {
    pub fn frame_len(&self, rate: u32) -> Result<usize> {
        let n = (self.frame_ms * f64::from(rate) / 1000.0).round();
        if !n.is_finite() || n < 1.0 {
            return Err(AudioError::InvalidParam(format!(
                "frame of {} ms at {rate} Hz holds no samples",
                self.frame_ms
            )));
        }
        Ok(n as usize)
    }
}

fn median<T: Sample>(values: &[T]) -> T {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / lit(2.0)
    }
}

/// Voiced regions of `buf`, merged and sorted.
pub fn detect_voice<T: Sample>(buf: &AudioBuffer<T>, params: &VadParams) -> Result<Vec<VoiceInterval>> {
    let frame = params.frame_len(buf.rate())?;
    let samples = buf.samples();
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    let rms: Vec<T> = samples
        .chunks(frame)
        .map(|c| {
            let e = c.iter().fold(T::zero(), |acc, &s| acc + s * s);
            (e / T::from_usize(c.len()).expect("frame")).sqrt()
        })
        .collect();
    let cap = lit::<T>(10f64.powf(params.max_noise_floor_db / 20.0));
    let reference = median(&rms).min(cap);
    let threshold = reference * lit(10f64.powf(params.threshold_db / 20.0));

    let mut voiced: Vec<bool> = rms.iter().map(|&r| r > threshold).collect();
    let mut hold = 0;
    for (i, v) in voiced.iter_mut().enumerate() {
        if rms[i] > threshold {
            hold = params.hangover_frames;
        } else if hold > 0 {
            *v = true;
            hold -= 1;
        }
    }

    let mut out: Vec<VoiceInterval> = Vec::new();
    for (i, _) in voiced.iter().enumerate().filter(|(_, v)| **v) {
        let (start, end) = (i * frame, ((i + 1) * frame).min(samples.len()));
        match out.last_mut() {
            Some(last) if last.end == start => last.end = end,
            _ => out.push(VoiceInterval::new(start, end)),
        }
    }
    Ok(out)
}

/// Gaps between sorted, non-overlapping `intervals` within `[0, len)`.
pub fn complement(intervals: &[VoiceInterval], len: usize) -> Vec<VoiceInterval> {
    let mut out = Vec::new();
    let mut cursor = 0;
    for iv in intervals {
        let start = iv.start.min(len);
        if start > cursor {
            out.push(VoiceInterval::new(cursor, start));
        }
        cursor = cursor.max(iv.end.min(len));
    }
    if cursor < len {
        out.push(VoiceInterval::new(cursor, len));
    }
    out
}
