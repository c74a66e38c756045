//! Boundary alignment: predicted subword ends against gold morph ends.

use serde::Serialize;

use crate::morphdata::GoldSegmentation;
use crate::normalize::char_len;
use crate::tokenizers::TokenizedWord;

/// Strictly increasing 1-indexed code-point offsets where segments end.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BoundarySet(Vec<usize>);

impl BoundarySet {
    /// Cumulative sums of segment lengths; zero-length segments add nothing.
    pub fn from_lengths<I: IntoIterator<Item = usize>>(lengths: I) -> Self {
        let mut offsets = Vec::new();
        let mut pos = 0;
        for len in lengths {
            if len == 0 {
                continue;
            }
            pos += len;
            offsets.push(pos);
        }
        BoundarySet(offsets)
    }

    /// Sorts and dedups; zero offsets are dropped.
    pub fn from_offsets<I: IntoIterator<Item = usize>>(offsets: I) -> Self {
        let mut v: Vec<usize> = offsets.into_iter().filter(|&o| o > 0).collect();
        v.sort_unstable();
        v.dedup();
        BoundarySet(v)
    }

    pub fn offsets(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.0.binary_search(&offset).is_ok()
    }

    pub fn intersection_len(&self, other: &BoundarySet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// `None` when the tokenization contains `[UNK]`: its boundaries are undefined.
pub fn pred_boundaries(t: &TokenizedWord) -> Option<BoundarySet> {
    if t.has_unknown() {
        return None;
    }
    Some(BoundarySet::from_lengths(
        t.tokens.iter().map(|tok| char_len(&tok.text)),
    ))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BoundaryCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

pub fn boundary_counts(gold: &BoundarySet, pred: &BoundarySet) -> BoundaryCounts {
    let tp = gold.intersection_len(pred);
    BoundaryCounts {
        tp,
        fp: pred.len() - tp,
        fn_: gold.len() - tp,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MicroPrf {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
    pub counts: BoundaryCounts,
    /// Set when a denominator was zero and the affected score was defined as 0.
    pub degenerate: bool,
}

pub fn micro_from_counts(c: BoundaryCounts) -> MicroPrf {
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let p = ratio(c.tp, c.tp + c.fp);
    let r = ratio(c.tp, c.tp + c.fn_);
    let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    MicroPrf {
        p,
        r,
        f1,
        counts: c,
        degenerate,
    }
}

/// Micro-averaged boundary P/R/F1 with TP/FP/FN summed over items.
pub fn boundary_prf_micro<'a, I>(items: I) -> MicroPrf
where
    I: IntoIterator<Item = (&'a BoundarySet, &'a BoundarySet)>,
{
    let mut total = BoundaryCounts::default();
    for (gold, pred) in items {
        let c = boundary_counts(gold, pred);
        total.tp += c.tp;
        total.fp += c.fp;
        total.fn_ += c.fn_;
    }
    micro_from_counts(total)
}

/// Per-item P, R, F1 with ε-guarded denominators.
pub fn item_prf(gold: &BoundarySet, pred: &BoundarySet, epsilon: f64) -> (f64, f64, f64) {
    let tp = gold.intersection_len(pred) as f64;
    let p = tp / (pred.len() as f64 + epsilon);
    let r = tp / (gold.len() as f64 + epsilon);
    let f1 = 2.0 * p * r / (p + r + epsilon);
    (p, r, f1)
}

/// Mean per-item F1. Returns 0 for an empty input.
pub fn boundary_f1_macro<'a, I>(items: I, epsilon: f64) -> f64
where
    I: IntoIterator<Item = (&'a BoundarySet, &'a BoundarySet)>,
{
    let (mut sum, mut n) = (0.0, 0usize);
    for (gold, pred) in items {
        sum += item_prf(gold, pred, epsilon).2;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn lemma_hit(gold: &GoldSegmentation, pred: &BoundarySet) -> bool {
    pred.contains(gold.lemma_len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Granularity {
    pub overseg: f64,
    pub underseg: f64,
}

/// Mean of `n/(k+ε)` and of `k/(n+ε)` over `(n, k)` pairs.
pub fn over_under_seg<I>(items: I, epsilon: f64) -> Granularity
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let (mut over, mut under, mut count) = (0.0, 0.0, 0usize);
    for (n, k) in items {
        over += n as f64 / (k as f64 + epsilon);
        under += k as f64 / (n as f64 + epsilon);
        count += 1;
    }
    if count == 0 {
        return Granularity {
            overseg: 0.0,
            underseg: 0.0,
        };
    }
    Granularity {
        overseg: over / count as f64,
        underseg: under / count as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::DEFAULT_EPSILON;
    use crate::morphdata::{gold_segmentation, MorphAnalysis};
    use crate::tokenizers::Token;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tw(word: &str, pieces: &[&str]) -> TokenizedWord {
        TokenizedWord {
            word: word.into(),
            tokens: pieces
                .iter()
                .enumerate()
                .map(|(i, p)| if i == 0 { Token::initial(*p) } else { Token::continuation(*p) })
                .collect(),
        }
    }

    fn bs(v: &[usize]) -> BoundarySet {
        BoundarySet::from_offsets(v.iter().copied())
    }

    #[test]
    fn predicted_offsets() {
        let p = pred_boundaries(&tw("kitaplarımızda", &["kitap", "lar", "ımız", "da"])).unwrap();
        assert_eq!(p.offsets(), &[5, 8, 12, 14]);
        let p = pred_boundaries(&tw("kitaplarımızda", &["ki", "tap", "lar", "ımız", "da"])).unwrap();
        assert_eq!(p.offsets(), &[2, 5, 8, 12, 14]);
        let p = pred_boundaries(&tw("koşuyordum", &["koş", "uyor", "dum"])).unwrap();
        assert_eq!(p.offsets(), &[3, 7, 10]);
        assert!(pred_boundaries(&TokenizedWord::unknown("xyz")).is_none());
    }

    #[test]
    fn micro_worked_examples() {
        let gold = bs(&[5, 8, 12, 14]);
        let m = boundary_prf_micro([(&gold, &gold)]);
        assert_eq!((m.p, m.r, m.f1), (1.0, 1.0, 1.0));

        let pred = bs(&[2, 5, 8, 12, 14]);
        let m = boundary_prf_micro([(&gold, &pred)]);
        assert_abs_diff_eq!(m.p, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(m.r, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.f1, 8.0 / 9.0, epsilon = 1e-12);

        let gold = bs(&[3, 7, 9, 10]);
        let pred = bs(&[3, 7, 10]);
        let m = boundary_prf_micro([(&gold, &pred)]);
        assert_eq!(m.counts, BoundaryCounts { tp: 3, fp: 0, fn_: 1 });
        assert_abs_diff_eq!(m.r, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(m.f1, 6.0 / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn micro_degenerate_denominators() {
        let empty = BoundarySet::default();
        let m = boundary_prf_micro([(&empty, &empty)]);
        assert!(m.degenerate);
        assert_eq!((m.p, m.r, m.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn macro_f1() {
        let gold = bs(&[5, 8, 12, 14]);
        let over = bs(&[2, 5, 8, 12, 14]);
        assert_abs_diff_eq!(boundary_f1_macro([(&gold, &gold)], DEFAULT_EPSILON), 1.0, epsilon = 1e-8);
        let single = bs(&[5]);
        assert_abs_diff_eq!(boundary_f1_macro([(&single, &single)], DEFAULT_EPSILON), 1.0, epsilon = 1e-8);
        // (1 + 8/9) / 2 = 17/18
        let m = boundary_f1_macro([(&gold, &gold), (&gold, &over)], DEFAULT_EPSILON);
        assert_abs_diff_eq!(m, 17.0 / 18.0, epsilon = 1e-8);
    }

    #[test]
    fn lemma_hits() {
        let g = gold_segmentation(&MorphAnalysis::new("koşuyordum", "koş", &["uyor", "du", "m"]).unwrap());
        let a = pred_boundaries(&tw("koşuyordum", &["koş", "uyor", "dum"])).unwrap();
        let b = pred_boundaries(&tw("koşuyordum", &["ko", "şuyor", "dum"])).unwrap();
        assert!(lemma_hit(&g, &a));
        assert!(!lemma_hit(&g, &b));

        let g = gold_segmentation(&MorphAnalysis::new("güzelleştirmek", "güzel", &["leş", "tir", "mek"]).unwrap());
        let p = pred_boundaries(&tw("güzelleştirmek", &["gü", "zel", "leş", "tir", "mek"])).unwrap();
        assert_eq!(p.offsets(), &[2, 5, 8, 11, 14]);
        assert!(lemma_hit(&g, &p));
    }

    #[test]
    fn over_under() {
        let g = over_under_seg([(5, 4)], DEFAULT_EPSILON);
        assert_abs_diff_eq!(g.overseg, 1.25, epsilon = 1e-8);
        assert_abs_diff_eq!(g.underseg, 0.8, epsilon = 1e-8);
        let g = over_under_seg([(1, 4)], DEFAULT_EPSILON);
        assert_abs_diff_eq!(g.underseg, 4.0, epsilon = 1e-8);
        let g = over_under_seg([(3, 3), (7, 7)], DEFAULT_EPSILON);
        assert_abs_diff_eq!(g.overseg, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(g.underseg, 1.0, epsilon = 1e-8);
    }

    fn offsets() -> impl Strategy<Value = BoundarySet> {
        proptest::collection::vec(1usize..20, 0..10).prop_map(BoundarySet::from_offsets)
    }

    proptest! {
        #[test]
        fn micro_scores_in_range(items in proptest::collection::vec((offsets(), offsets()), 1..8)) {
            let m = boundary_prf_micro(items.iter().map(|(g, p)| (g, p)));
            for v in [m.p, m.r, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let direct = if m.p + m.r > 0.0 { 2.0 * m.p * m.r / (m.p + m.r) } else { 0.0 };
            prop_assert!((m.f1 - direct).abs() < 1e-12);
        }

        #[test]
        fn adding_boundaries_never_lowers_recall(gold in offsets(), pred in offsets(), extra in offsets()) {
            let grown = BoundarySet::from_offsets(pred.offsets().iter().chain(extra.offsets()).copied());
            let before = boundary_prf_micro([(&gold, &pred)]);
            let after = boundary_prf_micro([(&gold, &grown)]);
            prop_assert!(after.r >= before.r);
        }

        #[test]
        fn removing_false_positives_never_lowers_precision(gold in offsets(), pred in offsets(), mask in proptest::collection::vec(any::<bool>(), 20)) {
            let trimmed = BoundarySet::from_offsets(pred.offsets().iter().copied().enumerate().filter(|(i, o)| {
                gold.contains(*o) || mask[*i % mask.len()]
            }).map(|(_, o)| o));
            let before = boundary_prf_micro([(&gold, &pred)]);
            let after = boundary_prf_micro([(&gold, &trimmed)]);
            if !after.degenerate {
                prop_assert!(after.p >= before.p - 1e-15);
            }
        }

        #[test]
        fn per_item_reciprocity(n in 1usize..40, k in 1usize..40) {
            let e = DEFAULT_EPSILON;
            let prod = (n as f64 / (k as f64 + e)) * (k as f64 / (n as f64 + e));
            prop_assert!((1.0 - 1e-6..=1.0).contains(&prod));
        }

        #[test]
        fn corpus_over_times_under_at_least_one(items in proptest::collection::vec((1usize..30, 1usize..30), 1..20)) {
            let g = over_under_seg(items.iter().copied(), DEFAULT_EPSILON);
            prop_assert!(g.overseg * g.underseg >= 1.0 - 1e-6);
        }
    }
}
