//! The three batch stages and the configuration that chains them.
//!
//! Stages communicate only through files: `recognize` writes annotated
//! standoff JSONL, `anonymize` turns that into anonymized JSONL (plus an
//! optional token mapping), and `evaluate` scores the pair. Each stage can be
//! re-run alone on saved intermediates.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use veilkit_core::anonymize::{MappingEntry, MappingStore, TokenKey};
use veilkit_core::corpus::{char_slice, AnnotatedDocument, OffsetUnit, StandoffRecord};
use veilkit_core::metrics::{evaluate_corpus, DocEval, EvalOptions, Evaluation, WordRule};
use veilkit_core::recognize::merge;
use veilkit_core::{anonymize, AnonymizerConfig, Recognizer, RecognizerConfig};

use crate::error::{CliError, Result};
use crate::jsonl::{create_writer, ensure_parent, finish, open_reader, write_line, Batches, BATCH};
use crate::schema::check_report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Recognize,
    Anonymize,
    Evaluate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSummary {
    pub stage: Stage,
    pub documents: usize,
}

fn default_alpha() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub word_rule: WordRule,
    /// Exported mapping to judge consistency against instead of each
    /// token's modal placeholder.
    #[serde(default)]
    pub reference_mapping: Option<PathBuf>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            word_rule: WordRule::default(),
            reference_mapping: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoConfig {
    /// Standoff JSONL; entity lists are optional.
    pub input: PathBuf,
    pub annotated: PathBuf,
    pub anonymized: PathBuf,
    pub report: PathBuf,
    /// Where to export the placeholder mapping. It contains the original
    /// surfaces, so it is only written when asked for.
    #[serde(default)]
    pub mapping: Option<PathBuf>,
    #[serde(default)]
    pub offset_unit: OffsetUnit,
    /// Merge the input's own entities with the recognizers' output.
    #[serde(default)]
    pub keep_input_spans: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub recognizers: RecognizerConfig,
    #[serde(default)]
    pub anonymizer: AnonymizerConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    pub io: IoConfig,
}

impl PipelineConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| CliError::usage("config", e))
    }

    /// Parse a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path)
            .map_err(|e| CliError::usage("config", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&json)?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let io = &mut self.io;
        for p in [&mut io.input, &mut io.annotated, &mut io.anonymized, &mut io.report] {
            fix(p);
        }
        if let Some(p) = io.mapping.as_mut() {
            fix(p);
        }
        if let Some(p) = self.metrics.reference_mapping.as_mut() {
            fix(p);
        }
    }

    /// Replace the configured salt, typically with `VEILKIT_SALT`.
    pub fn apply_salt(&mut self, salt: Option<String>) {
        if let Some(salt) = salt {
            self.anonymizer.salt = salt;
        }
    }

    /// Everything checkable without touching the data.
    pub fn validate(&self) -> Result<()> {
        self.recognizers.validate().map_err(|e| CliError::usage("config", e))?;
        self.anonymizer.validate().map_err(|e| CliError::usage("config", e))?;
        check_alpha(self.metrics.alpha)?;
        let io = &self.io;
        let outputs = [&io.annotated, &io.anonymized, &io.report];
        for (i, a) in outputs.iter().enumerate() {
            if *a == &io.input {
                return Err(CliError::usage(
                    "config",
                    format!("{} is both input and output", a.display()),
                ));
            }
            if outputs[i + 1..].contains(a) || io.mapping.as_ref() == Some(a) {
                return Err(CliError::usage(
                    "config",
                    format!("{} is used for two outputs", a.display()),
                ));
            }
        }
        Ok(())
    }

    pub fn eval_options(&self) -> Result<EvalOptions<f64>> {
        let reference = self
            .metrics
            .reference_mapping
            .as_deref()
            .map(read_mapping)
            .transpose()?;
        Ok(EvalOptions {
            alpha: self.metrics.alpha,
            word_rule: self.metrics.word_rule,
            reference,
        })
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(CliError::usage("config", format!("alpha {alpha} outside [0, 1]")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecognizeOptions {
    pub offset_unit: OffsetUnit,
    pub keep_input_spans: bool,
}

fn parse_record(stage: &'static str, line_no: usize, line: &str, unit: OffsetUnit) -> Result<AnnotatedDocument> {
    let record: StandoffRecord =
        serde_json::from_str(line).map_err(|e| CliError::data(stage, format!("line {line_no}: {e}")))?;
    let id = record.id.clone();
    record.into_document(unit).map_err(|e| CliError::doc(stage, id, e))
}

/// Run the recognizer ensemble over a standoff file. Pattern-only ensembles
/// run in parallel; external adapters are stateful and run in order.
pub fn recognize_stage(
    input: &Path,
    output: &Path,
    cfg: &RecognizerConfig,
    opts: RecognizeOptions,
) -> Result<StageSummary> {
    const STAGE: &str = "recognize";
    let compiled = cfg.validate().map_err(|e| CliError::usage(STAGE, e))?;
    let mut recognizer = Recognizer::open(cfg).map_err(|e| CliError::data(STAGE, e))?;
    let parallel = !recognizer.has_adapters();
    let reader = open_reader(STAGE, input)?;
    let mut out = create_writer(STAGE, output)?;
    let mut documents = 0;

    let finish_doc = |input: AnnotatedDocument, found: AnnotatedDocument| -> Result<AnnotatedDocument> {
        if !opts.keep_input_spans || input.spans.is_empty() {
            return Ok(found);
        }
        let id = found.doc.id.clone();
        let merged = merge(
            &[
                ("recognizers".to_owned(), found.spans),
                ("input".to_owned(), input.spans),
            ],
            &[],
        );
        AnnotatedDocument::new(found.doc, merged).map_err(|e| CliError::doc(STAGE, id, e))
    };

    for batch in Batches::new(reader, BATCH) {
        let batch = batch.map_err(|e| CliError::data(STAGE, e))?;
        let docs: Vec<AnnotatedDocument> = batch
            .par_iter()
            .map(|(n, line)| parse_record(STAGE, *n, line, opts.offset_unit))
            .collect::<Result<_>>()?;
        let annotated: Vec<AnnotatedDocument> = if parallel {
            docs.into_par_iter()
                .map_init(
                    || Recognizer::with_parts(compiled.clone(), Vec::new(), cfg.merge_policy.clone()),
                    |r, input| {
                        let found = r
                            .recognize_patterns_only(&input.doc)
                            .map_err(|e| CliError::doc(STAGE, input.doc.id.clone(), e))?;
                        finish_doc(input, found)
                    },
                )
                .collect::<Result<_>>()?
        } else {
            docs.into_iter()
                .map(|input| {
                    let found = recognizer
                        .recognize(&input.doc)
                        .map_err(|e| CliError::doc(STAGE, input.doc.id.clone(), e))?;
                    finish_doc(input, found)
                })
                .collect::<Result<_>>()?
        };
        for adoc in &annotated {
            write_line(STAGE, &mut out, &StandoffRecord::from(adoc))?;
        }
        documents += annotated.len();
    }
    finish(STAGE, out)?;
    Ok(StageSummary {
        stage: Stage::Recognize,
        documents,
    })
}

/// One replaced span in an anonymized record. The original surface is
/// deliberately absent; `start`/`end` point into the annotated input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplacementRecord {
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub new_start: usize,
    pub new_end: usize,
    pub placeholder: String,
}

/// One line of an anonymized JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnonymizedRecord {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    #[serde(default)]
    pub replacements: Vec<ReplacementRecord>,
}

/// Anonymize an annotated standoff file, optionally exporting the
/// placeholder mapping.
pub fn anonymize_stage(
    input: &Path,
    output: &Path,
    cfg: &AnonymizerConfig,
    mapping: Option<&Path>,
) -> Result<StageSummary> {
    const STAGE: &str = "anonymize";
    cfg.validate().map_err(|e| CliError::usage(STAGE, e))?;
    let reader = open_reader(STAGE, input)?;
    let mut out = create_writer(STAGE, output)?;
    let mut store = MappingStore::new();
    let mut documents = 0;

    for batch in Batches::new(reader, BATCH) {
        let batch = batch.map_err(|e| CliError::data(STAGE, e))?;
        let results: Vec<(AnnotatedDocument, _)> = batch
            .par_iter()
            .map(|(n, line)| {
                let adoc = parse_record(STAGE, *n, line, OffsetUnit::CodePoint)?;
                let result = anonymize(&adoc, cfg).map_err(|e| CliError::doc(STAGE, adoc.doc.id.clone(), e))?;
                Ok((adoc, result))
            })
            .collect::<Result<_>>()?;
        for (adoc, result) in &results {
            if mapping.is_some() {
                store.record(result);
            }
            let record = AnonymizedRecord {
                id: adoc.doc.id.clone(),
                text: result.text.clone(),
                lang: adoc.doc.lang.clone(),
                replacements: result
                    .replacements
                    .iter()
                    .map(|r| ReplacementRecord {
                        label: r.original.label.clone(),
                        start: r.original.start,
                        end: r.original.end,
                        new_start: r.new_start,
                        new_end: r.new_end,
                        placeholder: r.placeholder.clone(),
                    })
                    .collect(),
            };
            write_line(STAGE, &mut out, &record)?;
        }
        documents += results.len();
    }
    finish(STAGE, out)?;
    if let Some(path) = mapping {
        write_mapping(path, &store.export())?;
    }
    Ok(StageSummary {
        stage: Stage::Anonymize,
        documents,
    })
}

pub fn write_mapping(path: &Path, mapping: &BTreeMap<String, MappingEntry>) -> Result<()> {
    let json = serde_json::to_string_pretty(mapping).map_err(|e| CliError::data("anonymize", e))?;
    ensure_parent("anonymize", path)?;
    fs::write(path, json + "\n")
        .map_err(|e| CliError::data("anonymize", format!("cannot write {}: {e}", path.display())))
}

/// Load an exported mapping as token to placeholder.
pub fn read_mapping(path: &Path) -> Result<BTreeMap<TokenKey, String>> {
    let json = fs::read_to_string(path)
        .map_err(|e| CliError::data("evaluate", format!("cannot read {}: {e}", path.display())))?;
    let exported: BTreeMap<String, MappingEntry> =
        serde_json::from_str(&json).map_err(|e| CliError::data("evaluate", format!("{}: {e}", path.display())))?;
    Ok(exported
        .into_iter()
        .map(|(ph, entry)| ((entry.label, entry.surface), ph))
        .collect())
}

fn doc_eval(original: &AnnotatedDocument, record: AnonymizedRecord) -> Result<DocEval> {
    const STAGE: &str = "evaluate";
    let spans: HashMap<(usize, usize, &str), &str> = original
        .spans
        .iter()
        .map(|s| ((s.start, s.end, s.label.as_str()), s.surface.as_str()))
        .collect();
    let mut occurrences = Vec::with_capacity(record.replacements.len());
    for r in &record.replacements {
        let surface = spans.get(&(r.start, r.end, r.label.as_str())).ok_or_else(|| {
            CliError::doc(
                STAGE,
                &record.id,
                format!(
                    "replacement {} [{}, {}) has no matching annotated span",
                    r.label, r.start, r.end
                ),
            )
        })?;
        if char_slice(&record.text, r.new_start, r.new_end) != Some(r.placeholder.as_str()) {
            return Err(CliError::doc(
                STAGE,
                &record.id,
                format!(
                    "placeholder {:?} not found at [{}, {})",
                    r.placeholder, r.new_start, r.new_end
                ),
            ));
        }
        occurrences.push(((r.label.clone(), (*surface).to_owned()), r.placeholder.clone()));
    }
    Ok(DocEval {
        id: record.id,
        original: original.doc.text.clone(),
        anonymized: record.text,
        occurrences,
    })
}

/// Score an anonymized file against the annotated file it came from.
/// Documents are matched by id and scored in anonymized-file order.
pub fn evaluate_stage(original: &Path, anonymized: &Path, opts: &EvalOptions<f64>) -> Result<Evaluation<f64>> {
    score_files(original, anonymized, opts).map(|(evaluation, _)| evaluation)
}

fn score_files(original: &Path, anonymized: &Path, opts: &EvalOptions<f64>) -> Result<(Evaluation<f64>, usize)> {
    const STAGE: &str = "evaluate";
    check_alpha(opts.alpha)?;
    let mut originals: HashMap<String, AnnotatedDocument> = HashMap::new();
    for batch in Batches::new(open_reader(STAGE, original)?, BATCH) {
        for (n, line) in batch.map_err(|e| CliError::data(STAGE, e))? {
            let adoc = parse_record(STAGE, n, &line, OffsetUnit::CodePoint)?;
            let id = adoc.doc.id.clone();
            if originals.insert(id.clone(), adoc).is_some() {
                return Err(CliError::doc(STAGE, id, "duplicate document id in annotated input"));
            }
        }
    }
    let mut docs = Vec::new();
    for batch in Batches::new(open_reader(STAGE, anonymized)?, BATCH) {
        for (n, line) in batch.map_err(|e| CliError::data(STAGE, e))? {
            let record: AnonymizedRecord =
                serde_json::from_str(&line).map_err(|e| CliError::data(STAGE, format!("line {n}: {e}")))?;
            let source = originals
                .get(&record.id)
                .ok_or_else(|| CliError::doc(STAGE, &record.id, "no annotated document with this id"))?;
            docs.push(doc_eval(source, record)?);
        }
    }
    Ok((evaluate_corpus(&docs, opts), docs.len()))
}

pub fn write_report(path: &Path, evaluation: &Evaluation<f64>) -> Result<()> {
    let value = serde_json::to_value(&evaluation.report).map_err(|e| CliError::data("evaluate", e))?;
    check_report(&value)
        .map_err(|errs| CliError::data("evaluate", format!("report fails schema check: {}", errs.join("; "))))?;
    let json = serde_json::to_string_pretty(&value).map_err(|e| CliError::data("evaluate", e))?;
    ensure_parent("evaluate", path)?;
    fs::write(path, json + "\n")
        .map_err(|e| CliError::data("evaluate", format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub stages: Vec<StageSummary>,
    pub evaluation: Evaluation<f64>,
}

/// Validate `cfg`, then run the stages from `from` onwards. Earlier stages'
/// outputs must already exist when starting later.
pub fn run_pipeline(cfg: &PipelineConfig, from: Stage) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let opts = cfg.eval_options()?;
    let io = &cfg.io;
    let mut stages = Vec::new();
    if from <= Stage::Recognize {
        let ropts = RecognizeOptions {
            offset_unit: io.offset_unit,
            keep_input_spans: io.keep_input_spans,
        };
        stages.push(recognize_stage(&io.input, &io.annotated, &cfg.recognizers, ropts)?);
    }
    if from <= Stage::Anonymize {
        stages.push(anonymize_stage(
            &io.annotated,
            &io.anonymized,
            &cfg.anonymizer,
            io.mapping.as_deref(),
        )?);
    }
    let (evaluation, documents) = score_files(&io.annotated, &io.anonymized, &opts)?;
    write_report(&io.report, &evaluation)?;
    stages.push(StageSummary {
        stage: Stage::Evaluate,
        documents,
    });
    Ok(PipelineOutcome { stages, evaluation })
}
