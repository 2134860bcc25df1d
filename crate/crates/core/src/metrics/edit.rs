//! Levenshtein distance and weighted word error rate.

use serde::{Deserialize, Serialize};

use super::{MetricsError, Result};
use crate::scalar::Scalar;

/// Unit-cost edit distance between two sequences.
pub fn levenshtein_seq<E: PartialEq>(a: &[E], b: &[E]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance between two strings, counted in characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_seq(&a, &b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WerWeights<T> {
    pub ins: T,
    pub del: T,
    pub sub: T,
}

impl<T: Scalar> WerWeights<T> {
    pub fn new(ins: T, del: T, sub: T) -> Self {
        Self { ins, del, sub }
    }

    /// Insertions 0.10, deletions and substitutions 0.45.
    pub fn standard() -> Self {
        Self::new(T::ratio(1, 10), T::ratio(9, 20), T::ratio(9, 20))
    }

    /// Classical WER.
    pub fn unit() -> Self {
        Self::new(T::one(), T::one(), T::one())
    }
}

impl<T: Scalar> Default for WerWeights<T> {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WerBreakdown<T> {
    pub wer: T,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_len: usize,
    pub weights: WerWeights<T>,
}

#[derive(Clone, Copy)]
enum Op {
    Start,
    Match,
    Sub,
    Del,
    Ins,
}

/// Align `hyp` to `reference` minimizing the weighted edit cost.
///
/// Equal-cost alternatives are resolved substitution/match first, then
/// deletion, then insertion.
pub fn weighted_wer<T: Scalar, W: PartialEq>(
    reference: &[W],
    hyp: &[W],
    weights: &WerWeights<T>,
) -> Result<WerBreakdown<T>> {
    if reference.is_empty() {
        return Err(MetricsError::Undefined("word error rate of an empty reference"));
    }
    let (n, m) = (reference.len(), hyp.len());
    let width = m + 1;
    let mut cost: Vec<T> = vec![T::zero(); (n + 1) * width];
    let mut back = vec![Op::Start; (n + 1) * width];
    for j in 1..=m {
        cost[j] = cost[j - 1].clone() + weights.ins.clone();
        back[j] = Op::Ins;
    }
    for i in 1..=n {
        cost[i * width] = cost[(i - 1) * width].clone() + weights.del.clone();
        back[i * width] = Op::Del;
        for j in 1..=m {
            let diag_same = reference[i - 1] == hyp[j - 1];
            let diag = cost[(i - 1) * width + j - 1].clone() + if diag_same { T::zero() } else { weights.sub.clone() };
            let del = cost[(i - 1) * width + j].clone() + weights.del.clone();
            let ins = cost[i * width + j - 1].clone() + weights.ins.clone();
            let (mut best, mut op) = (diag, if diag_same { Op::Match } else { Op::Sub });
            if del < best {
                best = del;
                op = Op::Del;
            }
            if ins < best {
                best = ins;
                op = Op::Ins;
            }
            cost[i * width + j] = best;
            back[i * width + j] = op;
        }
    }

    let (mut s, mut d, mut ins) = (0, 0, 0);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match back[i * width + j] {
            Op::Match => (i, j) = (i - 1, j - 1),
            Op::Sub => {
                s += 1;
                (i, j) = (i - 1, j - 1);
            }
            Op::Del => {
                d += 1;
                i -= 1;
            }
            Op::Ins => {
                ins += 1;
                j -= 1;
            }
            Op::Start => unreachable!("origin reached early"),
        }
    }
    let total = weights.ins.clone() * T::from_count(ins)
        + weights.del.clone() * T::from_count(d)
        + weights.sub.clone() * T::from_count(s);
    Ok(WerBreakdown {
        wer: total / T::from_count(n),
        substitutions: s,
        deletions: d,
        insertions: ins,
        ref_len: n,
        weights: weights.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    // Exhaustive recursion, no memoization.
    fn lev_oracle(a: &[char], b: &[char]) -> usize {
        match (a.split_first(), b.split_first()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((x, ra)), Some((y, rb))) => {
                let sub = lev_oracle(ra, rb) + usize::from(x != y);
                sub.min(lev_oracle(ra, b) + 1).min(lev_oracle(a, rb) + 1)
            }
        }
    }

    // Minimum weighted cost over every edit script, exact arithmetic.
    fn wer_cost_oracle(a: &[&str], b: &[&str], w: &WerWeights<Ratio<i64>>) -> Ratio<i64> {
        match (a.split_first(), b.split_first()) {
            (None, _) => w.ins * Ratio::from_integer(b.len() as i64),
            (_, None) => w.del * Ratio::from_integer(a.len() as i64),
            (Some((x, ra)), Some((y, rb))) => {
                let diag = wer_cost_oracle(ra, rb, w) + if x == y { Ratio::from_integer(0) } else { w.sub };
                let del = wer_cost_oracle(ra, b, w) + w.del;
                let ins = wer_cost_oracle(a, rb, w) + w.ins;
                diag.min(del).min(ins)
            }
        }
    }

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("same", "same"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("ñandú", "nandu"), 2);
    }

    #[test]
    fn wer_examples() {
        let w = WerWeights::<f64>::standard();
        let r = weighted_wer(&words("the cat sat"), &words("the cat sat"), &w).unwrap();
        assert_eq!(r.wer, 0.0);
        let r = weighted_wer(&words("the cat sat"), &words("the cat"), &w).unwrap();
        assert_eq!((r.deletions, r.insertions, r.substitutions), (1, 0, 0));
        assert!((r.wer - 0.15).abs() < 1e-12);
        let r = weighted_wer(&words("a b"), &words("a b c"), &w).unwrap();
        assert_eq!(r.insertions, 1);
        assert!((r.wer - 0.05).abs() < 1e-12);
        assert!(weighted_wer(&[] as &[&str], &words("a"), &w).is_err());
    }

    #[test]
    fn exact_wer_with_rationals() {
        let w = WerWeights::<Ratio<i64>>::standard();
        let r = weighted_wer(&words("the cat sat"), &words("the cat"), &w).unwrap();
        assert_eq!(r.wer, Ratio::new(3, 20));
    }

    #[test]
    fn ties_prefer_substitution() {
        let w = WerWeights::<Ratio<i64>>::unit();
        let r = weighted_wer(&["a"], &["b"], &w).unwrap();
        assert_eq!((r.substitutions, r.deletions, r.insertions), (1, 0, 0));
        // sub costs exactly del + ins here.
        let w = WerWeights::new(Ratio::from_integer(1), Ratio::from_integer(1), Ratio::from_integer(2));
        let r = weighted_wer(&["a"], &["b"], &w).unwrap();
        assert_eq!((r.substitutions, r.deletions, r.insertions), (1, 0, 0));
    }

    #[test]
    fn breakdown_json_shape() {
        let r = weighted_wer(&["a"], &["a"], &WerWeights::<f64>::standard()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["deletions", "insertions", "ref_len", "substitutions", "weights", "wer"]
        );
    }

    proptest! {
        #[test]
        fn levenshtein_matches_exhaustive_oracle(a in "[abc]{0,6}", b in "[abc]{0,6}") {
            let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
            prop_assert_eq!(levenshtein(&a, &b), lev_oracle(&ca, &cb));
        }

        #[test]
        fn weighted_wer_is_optimal_and_consistent(
            a in prop::collection::vec("[xyz]", 1..6),
            b in prop::collection::vec("[xyz]", 0..6),
        ) {
            let a: Vec<&str> = a.iter().map(String::as_str).collect();
            let b: Vec<&str> = b.iter().map(String::as_str).collect();
            let w = WerWeights::<Ratio<i64>>::standard();
            let r = weighted_wer(&a, &b, &w).unwrap();
            let n = Ratio::from_integer(a.len() as i64);
            prop_assert_eq!(r.wer * n, wer_cost_oracle(&a, &b, &w));
            let recomputed = (w.ins * Ratio::from_integer(r.insertions as i64)
                + w.del * Ratio::from_integer(r.deletions as i64)
                + w.sub * Ratio::from_integer(r.substitutions as i64)) / n;
            prop_assert_eq!(r.wer, recomputed);
            // Script must transform a into b.
            prop_assert_eq!(a.len() - r.deletions + r.insertions, b.len());
        }

        #[test]
        fn unit_weights_give_classical_wer(
            a in prop::collection::vec("[xyz]", 1..6),
            b in prop::collection::vec("[xyz]", 0..6),
        ) {
            let r = weighted_wer(&a, &b, &WerWeights::<Ratio<i64>>::unit()).unwrap();
            let classical = Ratio::new(levenshtein_seq(&a, &b) as i64, a.len() as i64);
            prop_assert_eq!(r.wer, classical);
            prop_assert_eq!(r.substitutions + r.deletions + r.insertions, levenshtein_seq(&a, &b));
        }
    }
}
