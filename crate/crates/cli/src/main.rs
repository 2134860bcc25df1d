use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use veilkit_audio::CleanParams;
use veilkit_cli::error::{CliError, Result};
use veilkit_cli::jsonl::create_writer;
use veilkit_cli::pipeline::{check_alpha, write_report};
use veilkit_cli::tools::{self, SALT_ENV};
use veilkit_cli::{
    anonymize_stage, check_report, evaluate_stage, read_mapping, recognize_stage, run_pipeline, PipelineConfig,
    RecognizeOptions, Stage,
};
use veilkit_core::corpus::OffsetUnit;
use veilkit_core::metrics::{EvalOptions, WerWeights, WordRule};
use veilkit_core::{AnonymizerConfig, RecognizerConfig, Strategy};
use veilkit_ingest::{build_dorks, classify_link, extract_messages, Selectors};

#[derive(Parser)]
#[command(
    name = "veilkit",
    version,
    about = "Recognize, anonymize and evaluate PII in text corpora"
)]
struct Cli {
    /// Seed for every randomized component.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

fn serde_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Find entity spans in a standoff JSONL file.
    Recognize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Recognizer configuration (JSON); built-in patterns when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// code-point, byte or utf16.
        #[arg(long, value_parser = serde_enum::<OffsetUnit>, default_value = "code-point")]
        offset_unit: OffsetUnit,
        /// Keep the input's own entities, merged with the recognizers' output.
        #[arg(long)]
        keep_input_spans: bool,
    },
    /// Replace annotated spans with placeholders, redactions or masks.
    Anonymize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Anonymizer configuration (JSON); flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// substitute, redact or mask.
        #[arg(long, value_parser = serde_enum::<Strategy>)]
        strategy: Option<Strategy>,
        #[arg(long)]
        hash_len: Option<usize>,
        /// Salt every occurrence separately, imitating per-mention hashing.
        #[arg(long)]
        simulate_inline: bool,
        /// Write the placeholder mapping here. It contains the original values.
        #[arg(long)]
        export_mapping: Option<PathBuf>,
    },
    /// Score an anonymized file against its annotated source.
    Evaluate {
        /// Annotated standoff JSONL the anonymized file was made from.
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        anonymized: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// whitespace, lowercase or alphanumeric.
        #[arg(long, value_parser = serde_enum::<WordRule>, default_value = "whitespace")]
        word_rule: WordRule,
        /// Exported mapping used as ground truth for consistency.
        #[arg(long)]
        reference_mapping: Option<PathBuf>,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run recognize, anonymize and evaluate from one config file.
    #[command(alias = "pipeline")]
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Resume from this stage using saved intermediates.
        #[arg(long, value_enum, default_value = "recognize")]
        from: Stage,
    },
    /// Weighted word error rate between two text files.
    Wer {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        /// ins,del,sub
        #[arg(long, value_parser = tools::parse_weights)]
        weights: Option<WerWeights<f64>>,
    },
    /// Generate an annotated synthetic corpus.
    Synth {
        /// Generator spec (JSON); defaults when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output standoff JSONL; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search queries surfacing channels that mention a term.
    Dork {
        #[arg(long)]
        term: String,
    },
    /// Classify a t.me link as public channel or private invite.
    Classify {
        #[arg(long)]
        url: String,
    },
    /// Extract messages from a saved channel preview page.
    ParseTelegram {
        #[arg(long)]
        html: PathBuf,
        /// Selector overrides (JSON).
        #[arg(long)]
        selectors: Option<PathBuf>,
    },
    /// Voice detection and spectral-gating noise reduction for a WAV file.
    AudioClean {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Voice intervals in seconds, replacing the built-in detector.
        #[arg(long)]
        vad_intervals: Option<PathBuf>,
        /// Write the voice intervals used here.
        #[arg(long)]
        voice_out: Option<PathBuf>,
        /// Cleaning parameters (JSON).
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Validate a metrics report file.
    CheckReport {
        #[arg(long)]
        report: PathBuf,
    },
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::data("output", e))?;
    writeln!(out).map_err(|e| CliError::data("output", e))
}

fn warn(message: &str) {
    eprintln!("{}", json!({ "warning": message }));
}

fn load_json<T: DeserializeOwned>(stage: &'static str, path: &Path) -> Result<T> {
    serde_json::from_str(&tools::read_text(stage, path)?)
        .map_err(|e| CliError::usage(stage, format!("{}: {e}", path.display())))
}

fn salt_from_env() -> Option<String> {
    std::env::var(SALT_ENV).ok()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Recognize {
            input,
            out,
            config,
            offset_unit,
            keep_input_spans,
        } => {
            let cfg: RecognizerConfig = match config {
                Some(p) => load_json("recognize", &p)?,
                None => RecognizerConfig::default(),
            };
            let opts = RecognizeOptions {
                offset_unit,
                keep_input_spans,
            };
            print_json(&recognize_stage(&input, &out, &cfg, opts)?)
        }
        Command::Anonymize {
            input,
            out,
            config,
            strategy,
            hash_len,
            simulate_inline,
            export_mapping,
        } => {
            let mut cfg: AnonymizerConfig = match config {
                Some(p) => load_json("anonymize", &p)?,
                None => AnonymizerConfig::default(),
            };
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if let Some(n) = hash_len {
                cfg.hash_len = n;
            }
            cfg.simulate_inline |= simulate_inline;
            if let Some(salt) = salt_from_env() {
                cfg.salt = salt;
            }
            print_json(&anonymize_stage(&input, &out, &cfg, export_mapping.as_deref())?)
        }
        Command::Evaluate {
            original,
            anonymized,
            alpha,
            word_rule,
            reference_mapping,
            out,
        } => {
            check_alpha(alpha).map_err(|_| CliError::usage("evaluate", format!("alpha {alpha} outside [0, 1]")))?;
            let opts = EvalOptions {
                alpha,
                word_rule,
                reference: reference_mapping.as_deref().map(read_mapping).transpose()?,
            };
            let evaluation = evaluate_stage(&original, &anonymized, &opts)?;
            evaluation.warnings.iter().for_each(|w| warn(w));
            if let Some(path) = out {
                write_report(&path, &evaluation)?;
            }
            print_json(&evaluation.report)
        }
        Command::Run { config, from } => {
            let mut cfg = PipelineConfig::load(&config)?;
            cfg.apply_salt(salt_from_env());
            let outcome = run_pipeline(&cfg, from)?;
            outcome.evaluation.warnings.iter().for_each(|w| warn(w));
            print_json(&json!({
                "stages": outcome.stages,
                "report": outcome.evaluation.report,
                "correlation": outcome.evaluation.correlation,
            }))
        }
        Command::Wer {
            reference,
            hyp,
            weights,
        } => {
            let r = tools::read_text("wer", &reference)?;
            let h = tools::read_text("wer", &hyp)?;
            print_json(&tools::wer_texts(&r, &h, &weights.unwrap_or_default())?)
        }
        Command::Synth { spec, out } => {
            let spec = tools::load_synth_spec(spec.as_deref(), cli.seed)?;
            match out {
                Some(path) => {
                    let mut w = create_writer("synth", &path)?;
                    let n = tools::write_synth(&spec, &mut w)?;
                    w.flush().map_err(|e| CliError::data("synth", e))?;
                    print_json(&json!({ "documents": n, "seed": spec.seed }))
                }
                None => tools::write_synth(&spec, io::stdout().lock()).map(|_| ()),
            }
        }
        Command::Dork { term } => print_json(&build_dorks(&term).map_err(|e| CliError::usage("dork", e))?),
        Command::Classify { url } => print_json(&classify_link(&url).map_err(|e| CliError::data("classify", e))?),
        Command::ParseTelegram { html, selectors } => {
            let sel: Selectors = match selectors {
                Some(p) => load_json("parse-telegram", &p)?,
                None => Selectors::default(),
            };
            let extraction = extract_messages(&tools::read_text("parse-telegram", &html)?, &sel);
            extraction.diagnostics.iter().for_each(|d| warn(d));
            let mut out = io::stdout().lock();
            for msg in &extraction.messages {
                let line = serde_json::to_string(msg).map_err(|e| CliError::data("parse-telegram", e))?;
                writeln!(out, "{line}").map_err(|e| CliError::data("parse-telegram", e))?;
            }
            Ok(())
        }
        Command::AudioClean {
            input,
            out,
            vad_intervals,
            voice_out,
            params,
        } => {
            let params: CleanParams = match params {
                Some(p) => load_json("audio-clean", &p)?,
                None => CleanParams::default(),
            };
            let summary = tools::audio_clean(&input, &out, vad_intervals.as_deref(), voice_out.as_deref(), &params)?;
            if summary.passthrough {
                warn("not enough non-voice audio for a noise profile; output equals input");
            }
            print_json(&summary)
        }
        Command::CheckReport { report } => {
            let value: serde_json::Value = load_json("check-report", &report)?;
            check_report(&value).map_err(|errs| CliError::data("check-report", errs.join("; ")))?;
            print_json(&json!({ "valid": true }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::usage("arguments", e.render().to_string().trim());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
