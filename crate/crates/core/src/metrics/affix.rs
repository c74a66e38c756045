//! Affix type coverage and token-level atomicity.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::boundary::{pred_boundaries, BoundarySet};
use crate::error::{Error, Result};
use crate::morphdata::{gold_segmentation, MorphAnalysis};
use crate::normalize::char_len;
use crate::tokenizers::{TokenizedWord, Vocabulary};

pub const DEFAULT_AFFIX_TOP: usize = 200;

/// The `top` most frequent suffix types in the gold data, ties lexicographic.
pub fn default_affix_set(analyses: &[MorphAnalysis], top: usize) -> Vec<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for a in analyses {
        for s in &a.suffixes {
            *counts.entry(s.as_str()).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(top)
        .map(|(s, _)| s.to_owned())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffixMetrics {
    pub coverage: f64,
    pub atomicity: f64,
    /// Affix types that took part (present in the gold data).
    pub types_evaluated: usize,
    /// Requested types with no gold occurrence.
    pub excluded: Vec<String>,
    pub occurrences: usize,
    pub atomic_occurrences: usize,
}

/// `preds[i]` must be the tokenization of `analyses[i].word`.
///
/// The subword inventory for coverage is every predicted piece plus, when
/// given, every vocabulary entry (continuation marker stripped). Atomicity
/// only counts occurrences in concatenative items without `[UNK]`; an
/// occurrence is atomic when one predicted piece covers exactly its span.
pub fn affix_metrics(
    analyses: &[MorphAnalysis],
    preds: &[TokenizedWord],
    affix_set: &[String],
    inventory: Option<&Vocabulary>,
) -> Result<AffixMetrics> {
    if affix_set.is_empty() {
        return Err(Error::EmptyInput("affix set"));
    }
    if analyses.len() != preds.len() {
        return Err(Error::Invalid(format!(
            "{} analyses but {} tokenizations",
            analyses.len(),
            preds.len()
        )));
    }
    let wanted: BTreeSet<&str> = affix_set.iter().map(String::as_str).collect();

    let seen: HashSet<&str> = analyses
        .iter()
        .flat_map(|a| a.suffixes.iter().map(String::as_str))
        .collect();
    let (present, excluded): (Vec<&str>, Vec<&str>) = wanted.iter().partition(|a| seen.contains(*a));
    if !excluded.is_empty() {
        log::warn!("{} affix type(s) absent from gold data, excluded", excluded.len());
    }

    let mut types: HashSet<String> = inventory.map(Vocabulary::piece_types).unwrap_or_default();
    for p in preds {
        if !p.has_unknown() {
            types.extend(p.tokens.iter().map(|t| t.text.clone()));
        }
    }
    let covered = present.iter().filter(|a| types.contains(**a)).count();

    let present_set: HashSet<&str> = present.iter().copied().collect();
    let (mut occurrences, mut atomic) = (0, 0);
    for (a, p) in analyses.iter().zip(preds) {
        let gold = gold_segmentation(a);
        if !gold.concatenative {
            continue;
        }
        let Some(pred) = pred_boundaries(p) else { continue };
        let mut start = gold.lemma_len();
        for s in &a.suffixes {
            let end = start + char_len(s);
            if present_set.contains(s.as_str()) {
                occurrences += 1;
                if is_standalone(&pred, start, end) {
                    atomic += 1;
                }
            }
            start = end;
        }
    }

    let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    Ok(AffixMetrics {
        coverage: ratio(covered, present.len()),
        atomicity: ratio(atomic, occurrences),
        types_evaluated: present.len(),
        excluded: excluded.into_iter().map(str::to_owned).collect(),
        occurrences,
        atomic_occurrences: atomic,
    })
}

/// A single predicted piece spans exactly `(start, end]`.
fn is_standalone(pred: &BoundarySet, start: usize, end: usize) -> bool {
    pred.contains(start)
        && pred.contains(end)
        && !pred.offsets().iter().any(|&o| o > start && o < end)
}
