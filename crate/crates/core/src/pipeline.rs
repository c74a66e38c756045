//! Evaluation of a tokenizer on a gold split, and vocabulary-size sweeps.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::metrics::{
    affix_metrics, bootstrap_ci, continuation_rate, default_affix_set, diagnose_item, fertility,
    lemma_single_rate, micro_from_counts, BoundaryCounts, Metric, DEFAULT_AFFIX_TOP,
    DEFAULT_EPSILON,
};
use crate::morphdata::{gold_segmentation, Corpus, MorphAnalysis};
use crate::normalize::char_len;
use crate::report::MetricsReport;
use crate::tokenizers::{TokenizedWord, Tokenizer, WordPieceTokenizer, LONG_WORD_CHARS};
use crate::wptrainer::{train_wordpiece, TrainedVocabulary, TrainerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapSettings {
    pub resamples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub epsilon: f64,
    pub affix_top: usize,
    /// Overrides the frequency-derived affix set.
    pub affix_set: Option<Vec<String>>,
    pub bootstrap: Option<BootstrapSettings>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            epsilon: DEFAULT_EPSILON,
            affix_top: DEFAULT_AFFIX_TOP,
            affix_set: None,
            bootstrap: None,
        }
    }
}

pub fn evaluate(
    split: &str,
    analyses: &[MorphAnalysis],
    tok: &dyn Tokenizer,
    opts: &EvalOptions,
) -> Result<MetricsReport> {
    if analyses.is_empty() {
        return Err(Error::EmptyInput("gold split"));
    }
    let eps = opts.epsilon;
    let preds: Vec<TokenizedWord> = analyses.iter().map(|a| tok.tokenize(&a.word)).collect();

    let mut items = Vec::with_capacity(analyses.len());
    let (mut nonconcat, mut unknown_pooled, mut long_words) = (0, 0, 0);
    for (a, p) in analyses.iter().zip(&preds) {
        if char_len(&a.word) > LONG_WORD_CHARS {
            long_words += 1;
        }
        let gold = gold_segmentation(a);
        if !gold.concatenative {
            nonconcat += 1;
            continue;
        }
        match diagnose_item(&gold, p, eps) {
            Some(d) => items.push(d),
            None => unknown_pooled += 1,
        }
    }
    if nonconcat > 0 {
        log::info!("{split}: {nonconcat} non-concatenative item(s) skipped for boundary metrics");
    }
    let unk_words = preds.iter().filter(|p| p.has_unknown()).count();

    let lemma = lemma_single_rate(analyses, tok)?;
    let affix_set = match &opts.affix_set {
        Some(s) => s.clone(),
        None => default_affix_set(analyses, opts.affix_top),
    };
    let affix = if affix_set.is_empty() {
        None
    } else {
        Some(affix_metrics(analyses, &preds, &affix_set, tok.vocabulary())?)
    };

    let agg = |m: Metric| m.aggregate(&items, eps);
    let mut micro_counts = BoundaryCounts::default();
    for it in &items {
        micro_counts.tp += it.tp;
        micro_counts.fp += it.fp;
        micro_counts.fn_ += it.fn_;
    }
    let micro = micro_from_counts(micro_counts);

    let mut confidence_intervals = BTreeMap::new();
    if let Some(b) = opts.bootstrap {
        if !items.is_empty() {
            for m in Metric::ALL {
                let ci = bootstrap_ci(&items, m, b.resamples, b.seed, eps)?;
                confidence_intervals.insert(m.name().to_owned(), ci);
            }
        }
    }

    Ok(MetricsReport {
        tokenizer: tok.name().to_owned(),
        split: split.to_owned(),
        subwords_per_word: agg(Metric::SubwordsPerWord),
        fertility: fertility(&preds)?,
        continuation_rate: continuation_rate(&preds)?,
        micro_p: micro.p,
        micro_r: micro.r,
        micro_f1: micro.f1,
        macro_p: agg(Metric::MacroP),
        macro_r: agg(Metric::MacroR),
        macro_f1: agg(Metric::MacroF1),
        lemma_hit_rate: agg(Metric::LemmaHitRate),
        lemma_single_rate: lemma.rate,
        overseg: agg(Metric::Overseg),
        underseg: agg(Metric::Underseg),
        cer: agg(Metric::Cer),
        wer: agg(Metric::Wer),
        mer: agg(Metric::Mer),
        wil: agg(Metric::Wil),
        wip: agg(Metric::Wip),
        exact_match_rate: agg(Metric::ExactMatchRate),
        affix_coverage: affix.as_ref().map(|a| a.coverage),
        affix_atomicity: affix.as_ref().map(|a| a.atomicity),
        gold_items: analyses.len(),
        item_count: items.len(),
        skipped_nonconcatenative: nonconcat,
        skipped_unknown: unknown_pooled,
        unk_word_rate: unk_words as f64 / analyses.len() as f64,
        lemma_unknown: lemma.unknown,
        long_words,
        degenerate_micro: micro.degenerate,
        affix_types: affix.as_ref().map_or(0, |a| a.types_evaluated),
        affix_excluded: affix.as_ref().map_or(0, |a| a.excluded.len()),
        confidence_intervals,
    })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub vocab_size: usize,
    pub split: String,
    pub outcome: std::result::Result<MetricsReport, String>,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// Trained vocabulary per requested size; `Err` when training failed.
    pub vocabularies: Vec<(usize, std::result::Result<TrainedVocabulary, String>)>,
    /// `(smaller, larger, contained)` for consecutive successful sizes.
    pub containment: Vec<(usize, usize, bool)>,
}

/// Trains one WordPiece vocabulary per size and evaluates every split.
/// A failing size marks its rows failed; the sweep continues.
pub fn run_sweep(
    corpus: &Corpus,
    trainer: &TrainerConfig,
    sizes: &[usize],
    splits: &[(String, Vec<MorphAnalysis>)],
    opts: &EvalOptions,
) -> Result<Sweep> {
    if sizes.is_empty() {
        return Err(Error::EmptyInput("vocabulary size list"));
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();

    let mut vocabularies = Vec::with_capacity(sizes.len());
    for &size in &sizes {
        let cfg = TrainerConfig {
            target_vocab_size: size,
            ..trainer.clone()
        };
        let trained = train_wordpiece(corpus, &cfg).map_err(|e| e.to_string());
        if let Err(e) = &trained {
            log::warn!("vocab size {size}: training failed: {e}");
        }
        vocabularies.push((size, trained));
    }

    let mut containment = Vec::new();
    let ok: Vec<(usize, &TrainedVocabulary)> = vocabularies
        .iter()
        .filter_map(|(s, v)| v.as_ref().ok().map(|v| (*s, v)))
        .collect();
    for w in ok.windows(2) {
        let contained = w[0].1.vocab.is_subset_of(&w[1].1.vocab);
        if contained {
            log::info!("vocab({}) ⊂ vocab({})", w[0].0, w[1].0);
        } else {
            log::warn!("vocab({}) is not contained in vocab({})", w[0].0, w[1].0);
        }
        containment.push((w[0].0, w[1].0, contained));
    }

    let mut rows = Vec::new();
    for (size, trained) in &vocabularies {
        for (split, analyses) in splits {
            let outcome = match trained {
                Ok(t) => {
                    let tok = WordPieceTokenizer::new(t.vocab.clone());
                    evaluate(split, analyses, &tok, opts).map_err(|e| e.to_string())
                }
                Err(e) => Err(e.clone()),
            };
            rows.push(SweepRow {
                vocab_size: *size,
                split: split.clone(),
                outcome,
            });
        }
    }
    rows.sort_by(|a, b| (a.vocab_size, &a.split).cmp(&(b.vocab_size, &b.split)));
    Ok(Sweep {
        rows,
        vocabularies,
        containment,
    })
}

impl Sweep {
    /// Long format: vocab_size, split, metric, value, ci_low, ci_high.
    pub fn write_long_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["vocab_size", "split", "metric", "value", "ci_low", "ci_high"])?;
        for row in &self.rows {
            let size = row.vocab_size.to_string();
            match &row.outcome {
                Ok(r) => {
                    for (name, value) in r.scalar_metrics() {
                        let ci = r.confidence_intervals.get(name);
                        w.write_record([
                            size.as_str(),
                            row.split.as_str(),
                            name,
                            &format!("{value:.6}"),
                            &ci.map(|c| format!("{:.6}", c.low)).unwrap_or_default(),
                            &ci.map(|c| format!("{:.6}", c.high)).unwrap_or_default(),
                        ])?;
                    }
                }
                Err(_) => {
                    w.write_record([size.as_str(), row.split.as_str(), "status", "failed", "", ""])?;
                }
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn markdown(&self) -> String {
        let mut s = String::from(
            "| Vocab | Split | Sw/W | Pμ | Rμ | F1μ | LBoun | LSingle | Fertility | ContRate |\n\
             |---|---|---|---|---|---|---|---|---|---|\n",
        );
        for row in &self.rows {
            match &row.outcome {
                Ok(r) => s.push_str(&format!(
                    "| {} | {} | {:.2} | {:.3} | {:.3} | {:.3} | {:.2} | {:.2} | {:.3} | {:.3} |\n",
                    row.vocab_size,
                    row.split,
                    r.subwords_per_word,
                    r.micro_p,
                    r.micro_r,
                    r.micro_f1,
                    r.lemma_hit_rate,
                    r.lemma_single_rate,
                    r.fertility,
                    r.continuation_rate,
                )),
                Err(e) => s.push_str(&format!(
                    "| {} | {} | failed: {} | | | | | | | |\n",
                    row.vocab_size,
                    row.split,
                    e.replace('|', "/")
                )),
            }
        }
        s
    }

    /// Fertility per vocabulary size for one split, successful rows only.
    pub fn fertility_series(&self, split: &str) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter(|r| r.split == split)
            .filter_map(|r| r.outcome.as_ref().ok().map(|m| (r.vocab_size, m.fertility)))
            .collect()
    }
}
