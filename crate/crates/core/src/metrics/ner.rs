use serde::{Deserialize, Serialize};

use crate::corpus::EntitySpan;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matching {
    /// Same label and identical extent.
    #[default]
    Exact,
    /// Same label and intersecting extents, paired one-to-one.
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NerScore<T> {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl<T: Scalar> NerScore<T> {
    /// Precision/recall default to 0 when their denominator is 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let frac = |n, d| if d == 0 { T::zero() } else { T::ratio(n, d) };
        let precision: T = frac(tp, tp + fp);
        let recall: T = frac(tp, tp + fn_);
        let sum = precision.clone() + recall.clone();
        let f1 = if sum == T::zero() {
            T::zero()
        } else {
            T::from_count(2) * precision.clone() * recall.clone() / sum
        };
        Self {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

fn overlap(a: &EntitySpan, b: &EntitySpan) -> usize {
    a.end.min(b.end).saturating_sub(a.start.max(b.start))
}

fn count_tp(gold: &[EntitySpan], predicted: &[EntitySpan], matching: Matching) -> usize {
    match matching {
        Matching::Exact => {
            let mut used = vec![false; predicted.len()];
            gold.iter()
                .filter(|g| {
                    let hit = predicted
                        .iter()
                        .enumerate()
                        .find(|(i, p)| !used[*i] && p.label == g.label && p.start == g.start && p.end == g.end);
                    hit.map(|(i, _)| used[i] = true).is_some()
                })
                .count()
        }
        Matching::Overlap => {
            let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
            for (gi, g) in gold.iter().enumerate() {
                for (pi, p) in predicted.iter().enumerate() {
                    let o = overlap(g, p);
                    if o > 0 && g.label == p.label {
                        candidates.push((o, gi, pi));
                    }
                }
            }
            candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut gold_used = vec![false; gold.len()];
            let mut pred_used = vec![false; predicted.len()];
            let mut tp = 0;
            for (_, gi, pi) in candidates {
                if !gold_used[gi] && !pred_used[pi] {
                    gold_used[gi] = true;
                    pred_used[pi] = true;
                    tp += 1;
                }
            }
            tp
        }
    }
}

/// Entity-level precision, recall and F1.
pub fn ner_score<T: Scalar>(gold: &[EntitySpan], predicted: &[EntitySpan], matching: Matching) -> NerScore<T> {
    let tp = count_tp(gold, predicted, matching);
    NerScore::from_counts(tp, predicted.len() - tp, gold.len() - tp)
}
