//! Sequence agreement between `+`-joined gold morphs and predicted pieces.
//!
//! CER and WER are corpus-level ratios of summed edit distances over summed
//! reference lengths. MER, WIP and WIL use the hit/substitution/deletion/
//! insertion counts of a minimal token alignment, also summed over items.

use serde::Serialize;

use super::edit::{align, edit_distance, AlignmentCounts};

/// Per-item sequence statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SequenceItem {
    pub char_edit: usize,
    pub gold_chars: usize,
    pub token_edit: usize,
    pub gold_tokens: usize,
    pub alignment: AlignmentCounts,
}

impl SequenceItem {
    pub fn exact_match(&self) -> bool {
        self.token_edit == 0
    }
}

pub fn sequence_item<G, P>(gold: &[G], pred: &[P]) -> SequenceItem
where
    G: AsRef<str>,
    P: AsRef<str>,
{
    let gold: Vec<&str> = gold.iter().map(AsRef::as_ref).collect();
    let pred: Vec<&str> = pred.iter().map(AsRef::as_ref).collect();
    let gold_chars: Vec<char> = gold.join("+").chars().collect();
    let pred_chars: Vec<char> = pred.join("+").chars().collect();
    let alignment = align(&gold, &pred);
    SequenceItem {
        char_edit: edit_distance(&gold_chars, &pred_chars),
        gold_chars: gold_chars.len(),
        token_edit: alignment.errors(),
        gold_tokens: gold.len(),
        alignment,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceAgreement {
    pub cer: f64,
    pub wer: f64,
    pub mer: f64,
    pub wil: f64,
    pub wip: f64,
    pub exact_match_rate: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn aggregate_sequence<'a, I>(items: I) -> SequenceAgreement
where
    I: IntoIterator<Item = &'a SequenceItem>,
{
    let (mut ce, mut cn, mut te, mut tn, mut exact, mut n) = (0, 0, 0, 0, 0, 0);
    let mut al = AlignmentCounts::default();
    for it in items {
        ce += it.char_edit;
        cn += it.gold_chars;
        te += it.token_edit;
        tn += it.gold_tokens;
        exact += usize::from(it.exact_match());
        al.add(it.alignment);
        n += 1;
    }
    let h = al.hits;
    let wip = ratio(h, al.reference_len()) * ratio(h, al.hypothesis_len());
    SequenceAgreement {
        cer: ratio(ce, cn),
        wer: ratio(te, tn),
        mer: ratio(al.errors(), al.errors() + h),
        wil: 1.0 - wip,
        wip,
        exact_match_rate: ratio(exact, n),
    }
}

/// Convenience over `(gold morphs, predicted pieces)` pairs.
pub fn sequence_agreement<G, P>(items: &[(Vec<G>, Vec<P>)]) -> SequenceAgreement
where
    G: AsRef<str>,
    P: AsRef<str>,
{
    let per_item: Vec<SequenceItem> = items.iter().map(|(g, p)| sequence_item(g, p)).collect();
    aggregate_sequence(&per_item)
}
