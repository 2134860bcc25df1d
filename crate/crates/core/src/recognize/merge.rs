use std::collections::BTreeMap;

use crate::corpus::{span_order, EntitySpan};

/// Combine several recognizers' spans into one non-overlapping list.
///
/// Overlapping candidates are resolved greedily: higher score wins, then the
/// longer span, then the recognizer listed earlier in `priority`.
/// Recognizers missing from `priority` rank after it, in input order.
pub fn merge(spanlists: &[(String, Vec<EntitySpan>)], priority: &[String]) -> Vec<EntitySpan> {
    let rank_of = |i: usize, name: &str| priority.iter().position(|p| p == name).unwrap_or(priority.len() + i);
    let mut candidates: Vec<(usize, &EntitySpan)> = spanlists
        .iter()
        .enumerate()
        .flat_map(|(i, (name, spans))| {
            let rank = rank_of(i, name);
            spans.iter().map(move |s| (rank, s))
        })
        .collect();
    candidates.sort_by(|(ra, a), (rb, b)| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.len().cmp(&a.len()))
            .then_with(|| ra.cmp(rb))
            .then_with(|| span_order(a, b))
            .then_with(|| a.source.cmp(&b.source))
    });

    // start -> end of accepted spans; accepted spans never overlap.
    let mut taken: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (_, span) in candidates {
        if span.is_empty() {
            continue;
        }
        let blocked = taken
            .range(..span.end)
            .next_back()
            .is_some_and(|(_, &end)| end > span.start);
        if !blocked {
            taken.insert(span.start, span.end);
            out.push(span.clone());
        }
    }
    out.sort_by(span_order);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn span(label: &str, start: usize, end: usize, score: f64, source: &str) -> EntitySpan {
        EntitySpan {
            label: label.into(),
            start,
            end,
            surface: "x".repeat(end - start),
            score,
            source: source.into(),
        }
    }

    fn lists(items: Vec<(&str, Vec<EntitySpan>)>) -> Vec<(String, Vec<EntitySpan>)> {
        items.into_iter().map(|(n, s)| (n.to_string(), s)).collect()
    }

    #[test]
    fn higher_score_wins() {
        let input = lists(vec![
            ("a", vec![span("NAME", 0, 4, 0.9, "a")]),
            ("b", vec![span("EMAIL", 2, 8, 0.7, "b")]),
        ]);
        let out = merge(&input, &[]);
        assert_eq!(out, vec![span("NAME", 0, 4, 0.9, "a")]);
    }

    #[test]
    fn disjoint_spans_are_unioned_in_order() {
        let input = lists(vec![
            ("a", vec![span("NAME", 10, 14, 0.9, "a")]),
            ("b", vec![span("EMAIL", 0, 8, 0.7, "b")]),
        ]);
        let out = merge(&input, &[]);
        assert_eq!(out.iter().map(|s| s.start).collect::<Vec<_>>(), [0, 10]);
    }

    #[test]
    fn longer_span_breaks_score_ties() {
        let input = lists(vec![
            ("a", vec![span("NAME", 0, 4, 0.8, "a")]),
            ("b", vec![span("NAME", 0, 6, 0.8, "b")]),
        ]);
        assert_eq!(merge(&input, &[])[0].source, "b");
    }

    #[test]
    fn priority_breaks_full_ties() {
        let input = lists(vec![
            ("a", vec![span("NAME", 0, 4, 0.8, "a")]),
            ("b", vec![span("NAME", 0, 4, 0.8, "b")]),
        ]);
        assert_eq!(merge(&input, &[])[0].source, "a");
        assert_eq!(merge(&input, &["b".to_string(), "a".to_string()])[0].source, "b");
    }

    fn arb_lists() -> impl Strategy<Value = Vec<(String, Vec<EntitySpan>)>> {
        let one = (0usize..30, 1usize..6, 0u8..4).prop_map(|(s, l, q)| span("L", s, s + l, f64::from(q) / 4.0, ""));
        prop::collection::vec(prop::collection::vec(one, 0..8), 1..4).prop_map(|ls| {
            ls.into_iter()
                .enumerate()
                .map(|(i, mut spans)| {
                    let name = format!("r{i}");
                    for s in &mut spans {
                        s.source = name.clone();
                    }
                    (name, spans)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn output_never_overlaps_and_merge_is_idempotent(input in arb_lists()) {
            let once = merge(&input, &[]);
            for pair in once.windows(2) {
                prop_assert!(pair[0].end <= pair[1].start);
            }
            let again = merge(&[("merged".to_string(), once.clone())], &[]);
            prop_assert_eq!(again, once);
        }
    }
}
