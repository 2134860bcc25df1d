use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{lit, AudioBuffer, AudioError, Result, Sample, VoiceInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavInfo {
    pub channels: u16,
    pub rate: u32,
}

/// Read a 16-bit PCM WAV, averaging channels down to mono.
pub fn read_wav<T: Sample>(path: impl AsRef<Path>) -> Result<(AudioBuffer<T>, WavInfo)> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(AudioError::UnsupportedFormat(format!(
            "{:?} {}-bit, expected 16-bit PCM",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    let channels = usize::from(spec.channels.max(1));
    let raw: Vec<i16> = reader.samples::<i16>().collect::<std::result::Result<_, _>>()?;
    let scale = lit::<T>(1.0 / 32768.0);
    let divisor = T::from_usize(channels).expect("channel count");
    let samples = raw
        .chunks(channels)
        .map(|frame| {
            let sum = frame
                .iter()
                .fold(T::zero(), |acc, &s| acc + T::from_i16(s).expect("i16") * scale);
            sum / divisor
        })
        .collect();
    let info = WavInfo {
        channels: spec.channels,
        rate: spec.sample_rate,
    };
    Ok((AudioBuffer::new(samples, spec.sample_rate)?, info))
}

/// Write mono 16-bit PCM. Samples are scaled by 32768, rounded and clamped,
/// so a buffer read from a 16-bit file is written back bit-exact.
pub fn write_wav<T: Sample>(path: impl AsRef<Path>, buf: &AudioBuffer<T>) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: buf.rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    let scale = lit::<T>(32768.0);
    for &s in buf.samples() {
        let v = (s * scale).round().to_f64().unwrap_or(0.0).clamp(-32768.0, 32767.0);
        writer.write_sample(v as i16)?;
    }
    writer.finalize()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SecondsInterval {
    start: f64,
    end: f64,
}

/// Voice intervals as JSON `[{"start": s, "end": s}]` in seconds, converted
/// to sample indices at `rate` and clipped to `len`.
pub fn read_intervals_json(reader: impl Read, rate: u32, len: usize) -> Result<Vec<VoiceInterval>> {
    let raw: Vec<SecondsInterval> = serde_json::from_reader(reader)?;
    let mut out = Vec::with_capacity(raw.len());
    for (i, iv) in raw.iter().enumerate() {
        if !(iv.start.is_finite() && iv.end.is_finite() && 0.0 <= iv.start && iv.start < iv.end) {
            return Err(AudioError::InvalidParam(format!(
                "interval {i}: need 0 <= start < end, got {}..{}",
                iv.start, iv.end
            )));
        }
        let to_index = |t: f64| ((t * f64::from(rate)).round() as usize).min(len);
        let (start, end) = (to_index(iv.start), to_index(iv.end));
        if start < end {
            out.push(VoiceInterval::new(start, end));
        }
    }
    out.sort();
    Ok(out)
}

pub fn write_intervals_json(writer: impl Write, intervals: &[VoiceInterval], rate: u32) -> Result<()> {
    let secs: Vec<SecondsInterval> = intervals
        .iter()
        .map(|iv| SecondsInterval {
            start: iv.start as f64 / f64::from(rate),
            end: iv.end as f64 / f64::from(rate),
        })
        .collect();
    serde_json::to_writer(writer, &secs)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_round_trip_through_seconds() {
        let iv = vec![VoiceInterval::new(1600, 3200), VoiceInterval::new(8000, 16000)];
        let mut json = Vec::new();
        write_intervals_json(&mut json, &iv, 16_000).unwrap();
        assert_eq!(read_intervals_json(json.as_slice(), 16_000, 16_000).unwrap(), iv);
    }

    #[test]
    fn intervals_are_validated_and_clipped() {
        let read = |s: &str| read_intervals_json(s.as_bytes(), 100, 50);
        assert_eq!(
            read(r#"[{"start":0.2,"end":9}]"#).unwrap(),
            [VoiceInterval::new(20, 50)]
        );
        assert!(read(r#"[{"start":1,"end":0.5}]"#).is_err());
        assert!(read(r#"[{"start":-1,"end":0.5}]"#).is_err());
        assert!(read(r#"[{"from":0,"to":1}]"#).is_err());
    }
}
