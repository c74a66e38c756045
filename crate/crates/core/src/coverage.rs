//! Top-K word vocabulary coverage on train and test corpora.

use std::collections::HashSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphdata::Corpus;
use crate::wptrainer::WordVocabRanking;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveragePoint {
    pub k: usize,
    pub vocab_fraction: f64,
    /// Share of training token mass whose type is in the top-k prefix.
    pub train_coverage: f64,
    pub test_coverage: f64,
    /// Share of test types (not tokens) in the prefix.
    pub test_type_coverage: f64,
}

/// Twenty log-spaced prefix sizes from 1% to 100% of `vocab_size`, deduplicated.
pub fn default_ks(vocab_size: usize) -> Vec<usize> {
    if vocab_size == 0 {
        return Vec::new();
    }
    const POINTS: usize = 20;
    let (lo, hi) = (0.01f64.ln(), 0.0);
    let mut ks: Vec<usize> = (0..POINTS)
        .map(|i| {
            let frac = (lo + (hi - lo) * i as f64 / (POINTS - 1) as f64).exp();
            ((frac * vocab_size as f64).round() as usize).clamp(1, vocab_size)
        })
        .collect();
    ks.dedup();
    *ks.last_mut().unwrap() = vocab_size;
    ks
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else if num == den {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn coverage_curve(
    ranking: &WordVocabRanking,
    train: &Corpus,
    test: &Corpus,
    ks: &[usize],
) -> Result<Vec<CoveragePoint>> {
    let v = ranking.len();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > v) {
        return Err(Error::KOutOfRange { k, max: v });
    }
    if ks.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invalid("prefix sizes must be sorted ascending".into()));
    }
    let train_total = train.token_count();
    let test_total = test.token_count();
    let test_types = test.type_count() as u64;

    let mut points = Vec::with_capacity(ks.len());
    let mut retained: HashSet<&str> = HashSet::new();
    let (mut train_mass, mut test_mass, mut test_hit_types) = (0u64, 0u64, 0u64);
    let mut next = 0;
    for &k in ks {
        while next < k {
            let word = ranking.words[next].0.as_str();
            if retained.insert(word) {
                train_mass += train.word_counts.get(word).copied().unwrap_or(0);
                if let Some(&c) = test.word_counts.get(word) {
                    test_mass += c;
                    test_hit_types += 1;
                }
            }
            next += 1;
        }
        points.push(CoveragePoint {
            k,
            vocab_fraction: k as f64 / v as f64,
            train_coverage: ratio(train_mass, train_total),
            test_coverage: ratio(test_mass, test_total),
            test_type_coverage: ratio(test_hit_types, test_types),
        });
    }
    Ok(points)
}

pub fn write_coverage_csv<W: Write>(points: &[CoveragePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "vocab_fraction", "train_coverage", "test_coverage", "test_type_coverage"])?;
    for p in points {
        w.write_record([
            p.k.to_string(),
            format!("{:.6}", p.vocab_fraction),
            format!("{:.6}", p.train_coverage),
            format!("{:.6}", p.test_coverage),
            format!("{:.6}", p.test_type_coverage),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
