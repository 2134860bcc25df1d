//! The smaller subcommands: WER, synthetic corpora, ingest helpers and audio.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use veilkit_audio::{
    clean, clean_with_voice, read_intervals_json, read_wav, write_intervals_json, write_wav, CleanParams,
};
use veilkit_core::corpus::write_standoff;
use veilkit_core::metrics::{weighted_wer, WerWeights};
use veilkit_core::synth::{gen_corpus, SynthSpec};
use veilkit_core::WerBreakdown;

use crate::error::{CliError, Result};
use crate::jsonl::{create_writer, ensure_parent};

/// Environment variable that supplies the anonymization salt.
pub const SALT_ENV: &str = "VEILKIT_SALT";

/// Parse `ins,del,sub`.
pub fn parse_weights(s: &str) -> std::result::Result<WerWeights<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [i, d, sub] = parts[..] else {
        return Err(format!("expected three comma-separated weights ins,del,sub, got {s:?}"));
    };
    let num = |x: &str| match x.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("weight {x:?} is not a finite non-negative number")),
    };
    Ok(WerWeights::new(num(i)?, num(d)?, num(sub)?))
}

/// Weighted WER between two texts, split into words on whitespace.
pub fn wer_texts(reference: &str, hypothesis: &str, weights: &WerWeights<f64>) -> Result<WerBreakdown> {
    let r: Vec<&str> = reference.split_whitespace().collect();
    let h: Vec<&str> = hypothesis.split_whitespace().collect();
    weighted_wer(&r, &h, weights).map_err(|e| CliError::data("wer", e))
}

pub fn read_text(stage: &'static str, path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::data(stage, format!("cannot read {}: {e}", path.display())))
}

/// Load a synth spec (defaults when `path` is `None`); `seed` overrides the
/// spec's own seed.
pub fn load_synth_spec(path: Option<&Path>, seed: Option<u64>) -> Result<SynthSpec> {
    let mut spec = match path {
        Some(p) => serde_json::from_str(&read_text("synth", p)?).map_err(|e| CliError::usage("synth", e))?,
        None => SynthSpec::default(),
    };
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    spec.validate().map_err(|e| CliError::usage("synth", e))?;
    Ok(spec)
}

pub fn write_synth(spec: &SynthSpec, out: impl Write) -> Result<usize> {
    let docs = gen_corpus(spec).map_err(|e| CliError::data("synth", e))?;
    write_standoff(out, &docs).map_err(|e| CliError::data("synth", e))?;
    Ok(docs.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AudioSummary {
    pub rate: u32,
    pub channels: u16,
    pub samples: usize,
    pub passthrough: bool,
    pub voice_intervals: usize,
    pub noise_windows: usize,
}

/// Read a WAV, clean it and write mono 16-bit PCM. Voice intervals come from
/// `intervals` when given, else from the built-in detector; the ones used
/// are written to `voice_out` if asked.
pub fn audio_clean(
    input: &Path,
    output: &Path,
    intervals: Option<&Path>,
    voice_out: Option<&Path>,
    params: &CleanParams,
) -> Result<AudioSummary> {
    const STAGE: &str = "audio-clean";
    let (buf, info) = read_wav::<f64>(input).map_err(|e| CliError::data(STAGE, format!("{}: {e}", input.display())))?;
    let outcome = match intervals {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| CliError::data(STAGE, format!("{}: {e}", path.display())))?;
            let voice = read_intervals_json(std::io::BufReader::new(file), buf.rate(), buf.len())
                .map_err(|e| CliError::data(STAGE, format!("{}: {e}", path.display())))?;
            clean_with_voice(&buf, voice, params)
        }
        None => clean(&buf, params),
    }
    .map_err(|e| CliError::data(STAGE, e))?;
    ensure_parent(STAGE, output)?;
    write_wav(output, &outcome.audio).map_err(|e| CliError::data(STAGE, format!("{}: {e}", output.display())))?;
    if let Some(path) = voice_out {
        let file = create_writer(STAGE, path)?;
        write_intervals_json(file, &outcome.voice, buf.rate()).map_err(|e| CliError::data(STAGE, e))?;
    }
    Ok(AudioSummary {
        rate: info.rate,
        channels: info.channels,
        samples: outcome.audio.len(),
        passthrough: outcome.passthrough,
        voice_intervals: outcome.voice.len(),
        noise_windows: outcome.noise_windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse_and_reject() {
        let w = parse_weights("1, 1,1").unwrap();
        assert_eq!((w.ins, w.del, w.sub), (1.0, 1.0, 1.0));
        assert!(parse_weights("1,1").is_err());
        assert!(parse_weights("1,-1,1").is_err());
        assert!(parse_weights("a,b,c").is_err());
    }

    #[test]
    fn wer_of_identical_texts_is_zero() {
        let b = wer_texts("a b c", "a  b\nc", &WerWeights::standard()).unwrap();
        assert_eq!(b.wer, 0.0);
        assert!(wer_texts("", "x", &WerWeights::standard()).is_err());
    }

    #[test]
    fn seed_flag_overrides_spec() {
        let spec = load_synth_spec(None, Some(7)).unwrap();
        assert_eq!(spec.seed, 7);
        assert_eq!(load_synth_spec(None, None).unwrap().seed, 12345);
    }
}
