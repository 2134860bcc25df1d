//! Consistency, collision degree, error rate and average correlation of a
//! token-to-placeholder assignment.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{levenshtein, MetricsError, Result};
use crate::scalar::Scalar;

struct TokenTally<P> {
    total: usize,
    // placeholder -> (count, first occurrence)
    seen: BTreeMap<P, (usize, usize)>,
}

fn tally<K: Ord + Clone, P: Ord + Clone>(occurrences: &[(K, P)]) -> BTreeMap<K, TokenTally<P>> {
    let mut tokens: BTreeMap<K, TokenTally<P>> = BTreeMap::new();
    for (i, (token, ph)) in occurrences.iter().enumerate() {
        let t = tokens.entry(token.clone()).or_insert_with(|| TokenTally {
            total: 0,
            seen: BTreeMap::new(),
        });
        t.total += 1;
        t.seen.entry(ph.clone()).or_insert((0, i)).0 += 1;
    }
    tokens
}

/// Per-token consistency with each token's modal placeholder as the correct
/// one (ties go to the placeholder seen first).
///
/// `C = (1/|T|) Σ_t correct(t) / total(t)`
pub fn consistency<T: Scalar, K: Ord + Clone, P: Ord + Clone>(occurrences: &[(K, P)]) -> Result<T> {
    if occurrences.is_empty() {
        return Err(MetricsError::Undefined("consistency of an empty occurrence list"));
    }
    let tokens = tally(occurrences);
    let sum = tokens.values().fold(T::zero(), |acc, t| {
        let modal = t
            .seen
            .values()
            .max_by(|(ca, fa), (cb, fb)| ca.cmp(cb).then(fb.cmp(fa)))
            .map_or(0, |(c, _)| *c);
        acc + T::ratio(modal, t.total)
    });
    Ok(sum / T::from_count(tokens.len()))
}

/// Per-token consistency against an expected mapping. Tokens absent from
/// `reference` count as never converted correctly.
pub fn consistency_against<T: Scalar, K: Ord + Clone, P: Ord + Clone>(
    occurrences: &[(K, P)],
    reference: &BTreeMap<K, P>,
) -> Result<T> {
    if occurrences.is_empty() {
        return Err(MetricsError::Undefined("consistency of an empty occurrence list"));
    }
    let tokens = tally(occurrences);
    let sum = tokens.iter().fold(T::zero(), |acc, (token, t)| {
        let correct = reference
            .get(token)
            .and_then(|expected| t.seen.get(expected))
            .map_or(0, |(c, _)| *c);
        acc + T::ratio(correct, t.total)
    });
    Ok(sum / T::from_count(tokens.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collisions<T> {
    pub value: T,
    pub unique_tokens: usize,
    pub unique_hashes: usize,
    pub colliding_hashes: usize,
}

/// Fraction of placeholders produced by exactly one distinct token.
///
/// `G = |{h ∈ H : |G_h| = 1}| / |H|` with `G_h = {t : f(t) = h}`. Accepts a
/// relation, so per-occurrence engines that map one token to many
/// placeholders are handled.
pub fn collision_degree<T, K, P, I>(pairs: I) -> Result<Collisions<T>>
where
    T: Scalar,
    K: Ord,
    P: Ord,
    I: IntoIterator<Item = (K, P)>,
{
    let mut by_hash: BTreeMap<P, BTreeSet<K>> = BTreeMap::new();
    let mut tokens = BTreeSet::new();
    for (token, ph) in pairs {
        let members = by_hash.entry(ph).or_default();
        if !members.contains(&token) {
            members.insert(token);
        }
    }
    if by_hash.is_empty() {
        return Err(MetricsError::Undefined("collision degree of an empty mapping"));
    }
    for members in by_hash.values() {
        tokens.extend(members.iter());
    }
    let unique = by_hash.values().filter(|m| m.len() == 1).count();
    Ok(Collisions {
        value: T::ratio(unique, by_hash.len()),
        unique_tokens: tokens.len(),
        unique_hashes: by_hash.len(),
        colliding_hashes: by_hash.len() - unique,
    })
}

/// `Error = 1 - (α·C + (1-α)·G)`.
pub fn error_rate<T: Scalar>(consistency: T, collision: T, alpha: T) -> T {
    let one = T::one();
    one.clone() - (alpha.clone() * consistency + (one - alpha) * collision)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlation<T> {
    pub value: T,
    pub shared_tokens: usize,
    pub union_hashes: usize,
}

/// Average correlation preservation between the placeholders two texts
/// assigned to their shared tokens:
///
/// `(1 / |H_A ∪ H_B|) Σ_{t ∈ T} (1 - L(f_a(t), f_b(t)) / max(|f_a(t)|, |f_b(t)|))`
///
/// with `T` the shared tokens, `L` the Levenshtein distance and lengths in
/// characters.
pub fn avg_correlation<T: Scalar, K: Ord>(
    map_a: &BTreeMap<K, String>,
    map_b: &BTreeMap<K, String>,
) -> Result<Correlation<T>> {
    let shared: Vec<(&String, &String)> = map_a.iter().filter_map(|(k, a)| map_b.get(k).map(|b| (a, b))).collect();
    if shared.is_empty() {
        return Err(MetricsError::Undefined("average correlation without shared tokens"));
    }
    let union: BTreeSet<&String> = map_a.values().chain(map_b.values()).collect();
    let sum = shared.iter().fold(T::zero(), |acc, (a, b)| {
        let longest = a.chars().count().max(b.chars().count());
        let term = if longest == 0 {
            T::one()
        } else {
            T::ratio(longest - levenshtein(a, b), longest)
        };
        acc + term
    });
    Ok(Correlation {
        value: sum / T::from_count(union.len()),
        shared_tokens: shared.len(),
        union_hashes: union.len(),
    })
}
