//! Batch pipeline and subcommand implementations behind the `veilkit`
//! binary.

pub mod error;
pub mod jsonl;
pub mod pipeline;
pub mod schema;
pub mod tools;

pub use error::{CliError, Result};
pub use pipeline::{
    anonymize_stage, evaluate_stage, read_mapping, recognize_stage, run_pipeline, write_report, AnonymizedRecord,
    IoConfig, MetricsConfig, PipelineConfig, PipelineOutcome, RecognizeOptions, ReplacementRecord, Stage, StageSummary,
};
pub use schema::check_report;
