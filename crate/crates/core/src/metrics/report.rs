use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{avg_correlation, collision_degree, consistency, consistency_against, error_rate, WordCounts, WordRule};
use crate::anonymize::{AnonymizationResult, TokenKey};
use crate::scalar::{RealScalar, Scalar};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub unique_tokens: usize,
    pub unique_hashes: usize,
    pub colliding_hashes: usize,
}

/// Corpus-level anonymization metrics. Metrics that are undefined for the
/// input (for example, no entity occurrences) are `None` and serialize as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport<T> {
    pub info_loss: T,
    pub consistency: Option<T>,
    pub collision_degree: Option<T>,
    pub error_rate: Option<T>,
    pub avg_correlation: Option<T>,
    pub alpha: T,
    pub counts: Counts,
}

/// Tallies behind `avg_correlation`, kept outside the report object.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorrelationTally {
    /// Document pairs that share at least one token.
    pub pairs: usize,
    pub shared_tokens: usize,
    pub union_hashes: usize,
}

/// One anonymized document as seen by the evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct DocEval {
    pub id: String,
    pub original: String,
    pub anonymized: String,
    /// Every replaced occurrence in text order.
    pub occurrences: Vec<(TokenKey, String)>,
}

impl DocEval {
    pub fn from_result(id: impl Into<String>, original: impl Into<String>, result: &AnonymizationResult) -> Self {
        Self {
            id: id.into(),
            original: original.into(),
            anonymized: result.text.clone(),
            occurrences: result
                .replacements
                .iter()
                .map(|r| (r.token(), r.placeholder.clone()))
                .collect(),
        }
    }

    /// Token to placeholder as seen in this document; the first occurrence
    /// wins when a token was rewritten several ways.
    pub fn token_map(&self) -> BTreeMap<TokenKey, String> {
        let mut map = BTreeMap::new();
        for (token, ph) in &self.occurrences {
            map.entry(token.clone()).or_insert_with(|| ph.clone());
        }
        map
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions<T> {
    pub alpha: T,
    pub word_rule: WordRule,
    /// Expected token mapping; switches consistency to reference mode.
    pub reference: Option<BTreeMap<TokenKey, String>>,
}

impl<T: Scalar> Default for EvalOptions<T> {
    fn default() -> Self {
        Self {
            alpha: T::ratio(1, 2),
            word_rule: WordRule::default(),
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub report: MetricsReport<T>,
    pub correlation: CorrelationTally,
    pub warnings: Vec<String>,
}

/// Mean pairwise average correlation over document pairs that share a token.
fn corpus_correlation<T: Scalar>(docs: &[DocEval]) -> (Option<T>, CorrelationTally) {
    let maps: Vec<BTreeMap<TokenKey, String>> = docs.iter().map(DocEval::token_map).collect();
    let mut holders: BTreeMap<&TokenKey, Vec<usize>> = BTreeMap::new();
    for (i, map) in maps.iter().enumerate() {
        for token in map.keys() {
            holders.entry(token).or_default().push(i);
        }
    }
    let mut pairs = BTreeSet::new();
    for docs in holders.values() {
        for (k, &a) in docs.iter().enumerate() {
            for &b in &docs[k + 1..] {
                pairs.insert((a, b));
            }
        }
    }
    let mut tally = CorrelationTally::default();
    let mut sum = T::zero();
    for &(a, b) in &pairs {
        if let Ok(c) = avg_correlation::<T, TokenKey>(&maps[a], &maps[b]) {
            tally.pairs += 1;
            tally.shared_tokens += c.shared_tokens;
            tally.union_hashes += c.union_hashes;
            sum = sum + c.value;
        }
    }
    let mean = (tally.pairs > 0).then(|| sum / T::from_count(tally.pairs));
    (mean, tally)
}

/// Score an anonymized corpus.
pub fn evaluate_corpus<T: RealScalar>(docs: &[DocEval], opts: &EvalOptions<T>) -> Evaluation<T> {
    let mut warnings = Vec::new();
    let mut before = WordCounts::default();
    let mut after = WordCounts::default();
    for d in docs {
        before.add_text(&d.original, opts.word_rule);
        after.add_text(&d.anonymized, opts.word_rule);
    }
    let info_loss = before.entropy::<T>() - after.entropy::<T>();

    let occurrences: Vec<(TokenKey, String)> = docs.iter().flat_map(|d| d.occurrences.iter().cloned()).collect();
    let consistency = match &opts.reference {
        Some(reference) => consistency_against::<T, _, _>(&occurrences, reference),
        None => consistency::<T, _, _>(&occurrences),
    };
    let consistency = consistency.map_err(|e| warnings.push(format!("consistency: {e}"))).ok();
    let collisions = collision_degree::<T, _, _, _>(occurrences.iter().map(|(t, p)| (t, p)))
        .map_err(|e| warnings.push(format!("collision_degree: {e}")))
        .ok();
    let counts = collisions
        .as_ref()
        .map(|c| Counts {
            unique_tokens: c.unique_tokens,
            unique_hashes: c.unique_hashes,
            colliding_hashes: c.colliding_hashes,
        })
        .unwrap_or_default();
    let collision_value = collisions.map(|c| c.value);
    let error = match (&consistency, &collision_value) {
        (Some(c), Some(g)) => Some(error_rate(*c, *g, opts.alpha)),
        _ => None,
    };
    let (avg, correlation) = corpus_correlation::<T>(docs);
    if avg.is_none() {
        warnings.push("avg_correlation: no two documents share a token".into());
    }

    Evaluation {
        report: MetricsReport {
            info_loss,
            consistency,
            collision_degree: collision_value,
            error_rate: error,
            avg_correlation: avg,
            alpha: opts.alpha,
            counts,
        },
        correlation,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, original: &str, anonymized: &str, occ: &[(&str, &str, &str)]) -> DocEval {
        DocEval {
            id: id.into(),
            original: original.into(),
            anonymized: anonymized.into(),
            occurrences: occ
                .iter()
                .map(|(l, s, p)| ((l.to_string(), s.to_string()), p.to_string()))
                .collect(),
        }
    }

    #[test]
    fn deterministic_corpus() {
        let docs = [
            doc(
                "a",
                "John met John",
                "<N1> met <N1>",
                &[("NAME", "John", "<N1>"), ("NAME", "John", "<N1>")],
            ),
            doc(
                "b",
                "John and Ana",
                "<N1> and <N2>",
                &[("NAME", "John", "<N1>"), ("NAME", "Ana", "<N2>")],
            ),
        ];
        let ev = evaluate_corpus::<f64>(&docs, &EvalOptions::default());
        let r = &ev.report;
        assert_eq!(r.consistency, Some(1.0));
        assert_eq!(r.collision_degree, Some(1.0));
        assert_eq!(r.error_rate, Some(0.0));
        assert_eq!(
            r.counts,
            Counts {
                unique_tokens: 2,
                unique_hashes: 2,
                colliding_hashes: 0
            }
        );
        // Shared token John, union {<N1>, <N2>}.
        assert_eq!(r.avg_correlation, Some(0.5));
        assert_eq!(ev.correlation.pairs, 1);
        assert!(ev.warnings.is_empty());
    }

    #[test]
    fn no_entities_yields_nulls_and_warnings() {
        let docs = [doc("a", "plain text", "plain text", &[])];
        let ev = evaluate_corpus::<f64>(&docs, &EvalOptions::default());
        assert_eq!(ev.report.info_loss, 0.0);
        assert_eq!(ev.report.consistency, None);
        assert_eq!(ev.report.error_rate, None);
        assert_eq!(ev.warnings.len(), 3);
        let v = serde_json::to_value(&ev.report).unwrap();
        assert!(v["consistency"].is_null());
    }

    #[test]
    fn report_has_exact_fields() {
        let ev = evaluate_corpus::<f64>(&[doc("a", "x", "y", &[("NAME", "x", "y")])], &EvalOptions::default());
        let v = serde_json::to_value(&ev.report).unwrap();
        let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            BTreeSet::from([
                "info_loss",
                "consistency",
                "collision_degree",
                "error_rate",
                "avg_correlation",
                "alpha",
                "counts"
            ])
        );
        let counts: BTreeSet<&str> = v["counts"].as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            counts,
            BTreeSet::from(["unique_tokens", "unique_hashes", "colliding_hashes"])
        );
    }

    #[test]
    fn reference_mode_scores_per_occurrence_noise() {
        let docs = [doc(
            "a",
            "John John",
            "<p1> <p2>",
            &[("NAME", "John", "<p1>"), ("NAME", "John", "<p2>")],
        )];
        let reference = BTreeMap::from([(("NAME".to_string(), "John".to_string()), "<h>".to_string())]);
        let opts = EvalOptions {
            reference: Some(reference),
            ..EvalOptions::<f64>::default()
        };
        let ev = evaluate_corpus(&docs, &opts);
        assert_eq!(ev.report.consistency, Some(0.0));
        assert_eq!(ev.report.error_rate, Some(0.5));
    }
}
