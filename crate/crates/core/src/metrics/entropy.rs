use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::RealScalar;

/// How a text is cut into words for entropy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordRule {
    /// Split on whitespace; case and punctuation are kept.
    #[default]
    Whitespace,
    /// Whitespace split, then lowercased.
    Lowercase,
    /// Maximal runs of alphanumeric characters.
    Alphanumeric,
}

impl WordRule {
    pub fn words(self, text: &str) -> Vec<String> {
        match self {
            WordRule::Whitespace => text.split_whitespace().map(str::to_owned).collect(),
            WordRule::Lowercase => text.split_whitespace().map(str::to_lowercase).collect(),
            WordRule::Alphanumeric => text
                .split(|c: char| !c.is_alphanumeric())
                .filter(|w| !w.is_empty())
                .map(str::to_owned)
                .collect(),
        }
    }
}

/// Word frequency table. Merging is associative, so documents can be counted
/// independently and combined in any order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordCounts {
    counts: BTreeMap<String, usize>,
    total: usize,
}

impl WordCounts {
    pub fn from_text(text: &str, rule: WordRule) -> Self {
        let mut wc = Self::default();
        wc.add_text(text, rule);
        wc
    }

    pub fn add_text(&mut self, text: &str, rule: WordRule) {
        for word in rule.words(text) {
            *self.counts.entry(word).or_default() += 1;
            self.total += 1;
        }
    }

    pub fn merge(&mut self, other: &WordCounts) {
        for (w, c) in &other.counts {
            *self.counts.entry(w.clone()).or_default() += c;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Shannon entropy in bits; zero for an empty table.
    pub fn entropy<T: RealScalar>(&self) -> T {
        if self.total == 0 {
            return T::zero();
        }
        let n = T::from_count(self.total);
        self.counts.values().fold(T::zero(), |acc, &c| {
            let p = T::from_count(c) / n;
            acc - p * p.log2()
        })
    }
}

/// `E = -Σ p(w) log2 p(w)` over the relative word frequencies of `text`.
pub fn shannon_entropy<T: RealScalar>(text: &str, rule: WordRule) -> T {
    WordCounts::from_text(text, rule).entropy()
}

/// `E(original) - E(anonymized)`: positive when information was removed,
/// negative when anonymization introduced new distinct words.
pub fn information_loss<T: RealScalar>(original: &str, anonymized: &str, rule: WordRule) -> T {
    shannon_entropy::<T>(original, rule) - shannon_entropy::<T>(anonymized, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed_entropies() {
        let e = |t| shannon_entropy::<f64>(t, WordRule::Whitespace);
        assert_eq!(e("a a b b"), 1.0);
        assert_eq!(e("a a a a"), 0.0);
        assert_eq!(e("a b c d"), 2.0);
        assert_eq!(e(""), 0.0);
        assert_eq!(shannon_entropy::<f32>("a b", WordRule::Whitespace), 1.0);
    }

    #[test]
    fn information_loss_signs() {
        let il = |a, b| information_loss::<f64>(a, b, WordRule::Whitespace);
        assert_eq!(il("a b c d", "x x x x"), 2.0);
        assert_eq!(il("a a a a", "h1 h2 h3 h4"), -2.0);
        assert_eq!(il("same text here", "same text here"), 0.0);
    }

    #[test]
    fn word_rules() {
        assert_eq!(WordRule::Lowercase.words("A a"), ["a", "a"]);
        assert_eq!(WordRule::Alphanumeric.words("a,b  c!"), ["a", "b", "c"]);
        assert_eq!(WordRule::Whitespace.words("a, a"), ["a,", "a"]);
    }

    #[test]
    fn merged_counts_equal_concatenation() {
        let mut a = WordCounts::from_text("x y y", WordRule::Whitespace);
        a.merge(&WordCounts::from_text("z y", WordRule::Whitespace));
        assert_eq!(a, WordCounts::from_text("x y y z y", WordRule::Whitespace));
    }

    proptest! {
        #[test]
        fn entropy_is_order_invariant(words in prop::collection::vec("[a-d]{1,2}", 0..30), seed in any::<u64>()) {
            let mut shuffled = words.clone();
            // Deterministic rotation + reversal keeps the multiset.
            let k = if shuffled.is_empty() { 0 } else { (seed as usize) % shuffled.len() };
            shuffled.rotate_left(k);
            shuffled.reverse();
            let a: f64 = shannon_entropy(&words.join(" "), WordRule::Whitespace);
            let b: f64 = shannon_entropy(&shuffled.join(" "), WordRule::Whitespace);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn entropy_is_bounded_by_log_of_distinct(words in prop::collection::vec("[a-e]", 1..40)) {
            let wc = WordCounts::from_text(&words.join(" "), WordRule::Whitespace);
            let e: f64 = wc.entropy();
            let k = wc.distinct() as f64;
            prop_assert!(e <= k.log2() + 1e-12);
        }

        #[test]
        fn equifrequent_words_reach_the_maximum(k in 1usize..12, reps in 1usize..5) {
            let text: Vec<String> = (0..reps).flat_map(|_| (0..k).map(|i| format!("w{i}"))).collect();
            let e: f64 = shannon_entropy(&text.join(" "), WordRule::Whitespace);
            prop_assert!((e - (k as f64).log2()).abs() < 1e-12);
        }
    }
}
