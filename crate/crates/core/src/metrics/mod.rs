//! Anonymization quality metrics, edit distances and entity scoring.

mod anon;
mod edit;
mod entropy;
mod ner;
mod report;

pub use anon::{
    avg_correlation, collision_degree, consistency, consistency_against, error_rate, Collisions, Correlation,
};
pub use edit::{levenshtein, levenshtein_seq, weighted_wer, WerBreakdown, WerWeights};
pub use entropy::{information_loss, shannon_entropy, WordCounts, WordRule};
pub use ner::{ner_score, Matching, NerScore};
pub use report::{evaluate_corpus, CorrelationTally, Counts, DocEval, EvalOptions, Evaluation, MetricsReport};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("undefined metric: {0}")]
    Undefined(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = MetricsError> = std::result::Result<T, E>;
