//! Entity recognition, class-hash anonymization and anonymization metrics
//! for unstructured text.

pub mod anonymize;
pub mod corpus;
pub mod metrics;
pub mod recognize;
pub mod scalar;
pub mod synth;

pub use anonymize::{anonymize, placeholder, AnonymizationResult, AnonymizerConfig, Strategy};
pub use corpus::{AnnotatedDocument, Document, EntitySpan};
pub use recognize::{Recognizer, RecognizerConfig};

/// Report with `f64` metrics.
pub type MetricsReport = metrics::MetricsReport<f64>;
pub type MetricsReportF32 = metrics::MetricsReport<f32>;
pub type WerBreakdown = metrics::WerBreakdown<f64>;
/// WER with exact rational arithmetic.
pub type ExactWerBreakdown = metrics::WerBreakdown<num_rational::Ratio<i64>>;
pub type NerScore = metrics::NerScore<f64>;
