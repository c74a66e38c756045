//! Intrinsic tokenizer diagnostics against gold morphology.

mod affix;
mod bootstrap;
mod boundary;
mod edit;
mod sequence;

pub use affix::{affix_metrics, default_affix_set, AffixMetrics, DEFAULT_AFFIX_TOP};
pub use bootstrap::{bootstrap_ci, bootstrap_ci_with, ConfidenceInterval, DEFAULT_RESAMPLES};
pub use boundary::{
    boundary_counts, boundary_f1_macro, boundary_prf_micro, item_prf, lemma_hit, micro_from_counts,
    over_under_seg, pred_boundaries, BoundaryCounts, BoundarySet, Granularity, MicroPrf,
};
pub use edit::{align, edit_distance, AlignmentCounts};
pub use sequence::{aggregate_sequence, sequence_agreement, sequence_item, SequenceAgreement, SequenceItem};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphdata::{GoldSegmentation, MorphAnalysis};
use crate::tokenizers::{TokenizedWord, Tokenizer};

/// The tiny constant guarding per-item denominators.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Mean tokens per word. `[UNK]` words count as one token.
pub fn fertility(stream: &[TokenizedWord]) -> Result<f64> {
    if stream.is_empty() {
        return Err(Error::EmptyInput("token stream"));
    }
    let tokens: usize = stream.iter().map(TokenizedWord::len).sum();
    Ok(tokens as f64 / stream.len() as f64)
}

/// Fraction of all tokens that are continuations.
pub fn continuation_rate(stream: &[TokenizedWord]) -> Result<f64> {
    let tokens: usize = stream.iter().map(TokenizedWord::len).sum();
    if tokens == 0 {
        return Err(Error::EmptyInput("token stream"));
    }
    let cont: usize = stream.iter().map(TokenizedWord::continuation_count).sum();
    Ok(cont as f64 / tokens as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaSingle {
    pub rate: f64,
    /// Lemmas whose standalone tokenization was `[UNK]` (counted as one token).
    pub unknown: usize,
}

/// Fraction of lemmas that tokenize, in isolation, to exactly one token.
pub fn lemma_single_rate(analyses: &[MorphAnalysis], tok: &dyn Tokenizer) -> Result<LemmaSingle> {
    if analyses.is_empty() {
        return Err(Error::EmptyInput("gold analyses"));
    }
    let (mut single, mut unknown) = (0usize, 0usize);
    for a in analyses {
        let t = tok.tokenize(&a.lemma);
        if t.len() == 1 {
            single += 1;
        }
        if t.has_unknown() {
            unknown += 1;
        }
    }
    Ok(LemmaSingle {
        rate: single as f64 / analyses.len() as f64,
        unknown,
    })
}

/// Everything needed to re-aggregate one scored item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemDiagnostics {
    pub n: usize,
    pub k: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub p: f64,
    pub r: f64,
    pub f1: f64,
    pub lemma_hit: bool,
    pub exact_match: bool,
    pub char_edit: usize,
    pub token_edit: usize,
    pub sequence: SequenceItem,
}

/// `None` for items outside the boundary pool: non-concatenative gold or
/// a tokenization containing `[UNK]`.
pub fn diagnose_item(gold: &GoldSegmentation, pred: &TokenizedWord, epsilon: f64) -> Option<ItemDiagnostics> {
    if !gold.concatenative {
        return None;
    }
    let pb = pred_boundaries(pred)?;
    let c = boundary_counts(&gold.boundaries, &pb);
    let (p, r, f1) = item_prf(&gold.boundaries, &pb, epsilon);
    let seq = sequence_item(&gold.morphs, &pred.texts());
    Some(ItemDiagnostics {
        n: pred.len(),
        k: gold.k(),
        tp: c.tp,
        fp: c.fp,
        fn_: c.fn_,
        p,
        r,
        f1,
        lemma_hit: lemma_hit(gold, &pb),
        exact_match: seq.exact_match(),
        char_edit: seq.char_edit,
        token_edit: seq.token_edit,
        sequence: seq,
    })
}

/// Aggregates that can be recomputed from item diagnostics alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    SubwordsPerWord,
    MicroP,
    MicroR,
    MicroF1,
    MacroP,
    MacroR,
    MacroF1,
    LemmaHitRate,
    ExactMatchRate,
    Overseg,
    Underseg,
    Cer,
    Wer,
    Mer,
    Wil,
    Wip,
}

impl Metric {
    pub const ALL: [Metric; 16] = [
        Metric::SubwordsPerWord,
        Metric::MicroP,
        Metric::MicroR,
        Metric::MicroF1,
        Metric::MacroP,
        Metric::MacroR,
        Metric::MacroF1,
        Metric::LemmaHitRate,
        Metric::ExactMatchRate,
        Metric::Overseg,
        Metric::Underseg,
        Metric::Cer,
        Metric::Wer,
        Metric::Mer,
        Metric::Wil,
        Metric::Wip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SubwordsPerWord => "subwords_per_word",
            Metric::MicroP => "micro_p",
            Metric::MicroR => "micro_r",
            Metric::MicroF1 => "micro_f1",
            Metric::MacroP => "macro_p",
            Metric::MacroR => "macro_r",
            Metric::MacroF1 => "macro_f1",
            Metric::LemmaHitRate => "lemma_hit_rate",
            Metric::ExactMatchRate => "exact_match_rate",
            Metric::Overseg => "overseg",
            Metric::Underseg => "underseg",
            Metric::Cer => "cer",
            Metric::Wer => "wer",
            Metric::Mer => "mer",
            Metric::Wil => "wil",
            Metric::Wip => "wip",
        }
    }

    /// Evaluates the aggregate over `items`; 0 for an empty selection.
    pub fn aggregate<'a, I>(self, items: I, epsilon: f64) -> f64
    where
        I: IntoIterator<Item = &'a ItemDiagnostics>,
        I::IntoIter: Clone,
    {
        let items = items.into_iter();
        let n = items.clone().count();
        if n == 0 {
            return 0.0;
        }
        let mean = |f: &dyn Fn(&ItemDiagnostics) -> f64| items.clone().map(f).sum::<f64>() / n as f64;
        let micro = || {
            let mut c = BoundaryCounts::default();
            for it in items.clone() {
                c.tp += it.tp;
                c.fp += it.fp;
                c.fn_ += it.fn_;
            }
            micro_from_counts(c)
        };
        let seq = || aggregate_sequence(items.clone().map(|it| &it.sequence));
        match self {
            Metric::SubwordsPerWord => mean(&|it| it.n as f64),
            Metric::MicroP => micro().p,
            Metric::MicroR => micro().r,
            Metric::MicroF1 => micro().f1,
            Metric::MacroP => mean(&|it| it.p),
            Metric::MacroR => mean(&|it| it.r),
            Metric::MacroF1 => mean(&|it| it.f1),
            Metric::LemmaHitRate => mean(&|it| f64::from(u8::from(it.lemma_hit))),
            Metric::ExactMatchRate => mean(&|it| f64::from(u8::from(it.exact_match))),
            Metric::Overseg => over_under_seg(items.clone().map(|it| (it.n, it.k)), epsilon).overseg,
            Metric::Underseg => over_under_seg(items.clone().map(|it| (it.n, it.k)), epsilon).underseg,
            Metric::Cer => seq().cer,
            Metric::Wer => seq().wer,
            Metric::Mer => seq().mer,
            Metric::Wil => seq().wil,
            Metric::Wip => seq().wip,
        }
    }
}
