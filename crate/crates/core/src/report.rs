//! Per-(tokenizer, split) diagnostics report and its serializations.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::ConfidenceInterval;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub tokenizer: String,
    pub split: String,
    pub subwords_per_word: f64,
    pub fertility: f64,
    pub continuation_rate: f64,
    pub micro_p: f64,
    pub micro_r: f64,
    pub micro_f1: f64,
    pub macro_p: f64,
    pub macro_r: f64,
    pub macro_f1: f64,
    pub lemma_hit_rate: f64,
    pub lemma_single_rate: f64,
    pub overseg: f64,
    pub underseg: f64,
    pub cer: f64,
    pub wer: f64,
    pub mer: f64,
    pub wil: f64,
    pub wip: f64,
    pub exact_match_rate: f64,
    /// `None` when the split has no suffixes to evaluate.
    pub affix_coverage: Option<f64>,
    pub affix_atomicity: Option<f64>,
    /// Gold items in the split.
    pub gold_items: usize,
    /// Items in the boundary pool (concatenative, no `[UNK]`).
    pub item_count: usize,
    pub skipped_nonconcatenative: usize,
    pub skipped_unknown: usize,
    pub unk_word_rate: f64,
    pub lemma_unknown: usize,
    pub long_words: usize,
    /// Micro scores hit a zero denominator and were set to 0.
    pub degenerate_micro: bool,
    pub affix_types: usize,
    pub affix_excluded: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub confidence_intervals: BTreeMap<String, ConfidenceInterval>,
}

/// Column order follows the usual diagnostics table, then the extra columns.
pub const CSV_HEADER: [&str; 28] = [
    "tokenizer",
    "split",
    "Sw/W",
    "Pμ",
    "Rμ",
    "F1μ",
    "P_M",
    "R_M",
    "F1_M",
    "LSingle",
    "LBoun",
    "ExMatch",
    "OverSeg",
    "UnderSeg",
    "CER",
    "WER",
    "MER",
    "WIL",
    "WIP",
    "AffixCov",
    "AffixAtom",
    "Fertility",
    "ContRate",
    "items",
    "gold_items",
    "skipped_nonconcat",
    "skipped_unk",
    "unk_word_rate",
];

fn num(v: f64) -> String {
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl MetricsReport {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.tokenizer.clone(),
            self.split.clone(),
            num(self.subwords_per_word),
            num(self.micro_p),
            num(self.micro_r),
            num(self.micro_f1),
            num(self.macro_p),
            num(self.macro_r),
            num(self.macro_f1),
            num(self.lemma_single_rate),
            num(self.lemma_hit_rate),
            num(self.exact_match_rate),
            num(self.overseg),
            num(self.underseg),
            num(self.cer),
            num(self.wer),
            num(self.mer),
            num(self.wil),
            num(self.wip),
            opt(self.affix_coverage),
            opt(self.affix_atomicity),
            num(self.fertility),
            num(self.continuation_rate),
            self.item_count.to_string(),
            self.gold_items.to_string(),
            self.skipped_nonconcatenative.to_string(),
            self.skipped_unknown.to_string(),
            num(self.unk_word_rate),
        ]
    }

    /// `(name, value)` for every scalar metric, in a fixed order.
    pub fn scalar_metrics(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("subwords_per_word", self.subwords_per_word),
            ("fertility", self.fertility),
            ("continuation_rate", self.continuation_rate),
            ("micro_p", self.micro_p),
            ("micro_r", self.micro_r),
            ("micro_f1", self.micro_f1),
            ("macro_p", self.macro_p),
            ("macro_r", self.macro_r),
            ("macro_f1", self.macro_f1),
            ("lemma_hit_rate", self.lemma_hit_rate),
            ("lemma_single_rate", self.lemma_single_rate),
            ("exact_match_rate", self.exact_match_rate),
            ("overseg", self.overseg),
            ("underseg", self.underseg),
            ("cer", self.cer),
            ("wer", self.wer),
            ("mer", self.mer),
            ("wil", self.wil),
            ("wip", self.wip),
        ];
        if let Some(c) = self.affix_coverage {
            v.push(("affix_coverage", c));
        }
        if let Some(a) = self.affix_atomicity {
            v.push(("affix_atomicity", a));
        }
        v.push(("unk_word_rate", self.unk_word_rate));
        v
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn write_reports_csv<W: Write>(reports: &[MetricsReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Compact markdown summary of the headline columns.
pub fn reports_markdown(reports: &[MetricsReport]) -> String {
    let mut s = String::from(
        "| Tokenizer | Split | Sw/W | Pμ | Rμ | F1μ | F1_M | LSingle | LBoun | ExMatch | OverSeg | UnderSeg | CER | WER | Items | Skipped |\n\
         |---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n",
    );
    for r in reports {
        s.push_str(&format!(
            "| {} | {} | {:.2} | {:.3} | {:.3} | {:.3} | {:.3} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {:.3} | {:.3} | {} | {} |\n",
            r.tokenizer,
            r.split,
            r.subwords_per_word,
            r.micro_p,
            r.micro_r,
            r.micro_f1,
            r.macro_f1,
            r.lemma_single_rate,
            r.lemma_hit_rate,
            r.exact_match_rate,
            r.overseg,
            r.underseg,
            r.cer,
            r.wer,
            r.item_count,
            r.skipped_nonconcatenative + r.skipped_unknown,
        ));
    }
    s
}
