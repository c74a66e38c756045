//! WordPiece vocabulary training and frequency-ranked word vocabularies.
//!
//! Training starts from a character alphabet (every observed character in
//! plain form, plus the continuation form of every character seen in a
//! non-initial position) and repeatedly merges the adjacent pair with the
//! highest `freq(pair) / (freq(left) * freq(right))`. Ties go to the higher
//! pair frequency, then to the lexicographically smaller merged entry.
//! Pieces never cross word boundaries.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::morphdata::Corpus;
use crate::tokenizers::{Vocabulary, DEFAULT_CONTINUATION_MARKER, UNK_TOKEN};

pub const DEFAULT_SPECIALS: [&str; 5] = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainerConfig {
    pub target_vocab_size: usize,
    pub min_pair_frequency: u64,
    pub special_tokens: Vec<String>,
    pub continuation_marker: String,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            target_vocab_size: 32_000,
            min_pair_frequency: 2,
            special_tokens: DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect(),
            continuation_marker: DEFAULT_CONTINUATION_MARKER.to_owned(),
        }
    }
}

impl TrainerConfig {
    pub fn with_target(target_vocab_size: usize) -> Self {
        TrainerConfig {
            target_vocab_size,
            ..Default::default()
        }
    }

    /// Parses a flat `key = value` file. Lines starting with `#` are comments.
    /// `special_tokens` is comma-separated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = TrainerConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("config line {}: expected key=value", idx + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Invalid(format!("config line {}: bad {what}: {value:?}", idx + 1));
            match key {
                "target_vocab_size" => {
                    cfg.target_vocab_size = value.parse().map_err(|_| bad(key))?;
                }
                "min_pair_frequency" => {
                    cfg.min_pair_frequency = value.parse().map_err(|_| bad(key))?;
                }
                "special_tokens" => {
                    cfg.special_tokens = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_owned)
                        .collect();
                }
                "continuation_marker" => cfg.continuation_marker = value.to_owned(),
                other => {
                    return Err(Error::Invalid(format!(
                        "config line {}: unknown key {other:?}",
                        idx + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_vocab_size == 0 {
            return Err(Error::Invalid("target_vocab_size must be positive".into()));
        }
        if self.min_pair_frequency == 0 {
            return Err(Error::Invalid("min_pair_frequency must be positive".into()));
        }
        if self.continuation_marker.is_empty() {
            return Err(Error::Invalid("continuation_marker is empty".into()));
        }
        if !self.special_tokens.iter().any(|s| s == UNK_TOKEN) {
            return Err(Error::MissingUnk(UNK_TOKEN.to_owned()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedVocabulary {
    pub vocab: Vocabulary,
    /// Size of specials + alphabet, before any merge.
    pub base_size: usize,
    pub merges: usize,
    /// Set when no eligible pair remained before reaching the target.
    pub exhausted: bool,
}

struct Symbols {
    strings: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Symbols {
    fn intern(&mut self, s: String) -> u32 {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.strings.len() as u32;
        self.ids.insert(s.clone(), id);
        self.strings.push(s);
        id
    }
}

type Pair = (u32, u32);

#[derive(Clone, Copy)]
struct Candidate {
    pair: Pair,
    freq: u64,
    denom: u128,
}

impl Candidate {
    /// `Greater` means `self` should be merged first.
    fn rank(&self, other: &Candidate, strings: &[String], marker: &str) -> Ordering {
        let lhs = self.freq as u128 * other.denom;
        let rhs = other.freq as u128 * self.denom;
        lhs.cmp(&rhs)
            .then(self.freq.cmp(&other.freq))
            .then_with(|| {
                let mine = merged_entry(strings, self.pair, marker);
                let theirs = merged_entry(strings, other.pair, marker);
                theirs
                    .cmp(&mine)
                    .then_with(|| strings[other.pair.0 as usize].cmp(&strings[self.pair.0 as usize]))
                    .then_with(|| strings[other.pair.1 as usize].cmp(&strings[self.pair.1 as usize]))
            })
    }
}

pub fn train_wordpiece(corpus: &Corpus, cfg: &TrainerConfig) -> Result<TrainedVocabulary> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let marker = cfg.continuation_marker.as_str();

    let mut all_chars = BTreeSet::new();
    let mut inner_chars = BTreeSet::new();
    for word in corpus.word_counts.keys() {
        for (i, c) in word.chars().enumerate() {
            all_chars.insert(c);
            if i > 0 {
                inner_chars.insert(c);
            }
        }
    }

    let mut entries: Vec<String> = Vec::new();
    let mut present: HashSet<String> = HashSet::new();
    for s in &cfg.special_tokens {
        if present.insert(s.clone()) {
            entries.push(s.clone());
        }
    }
    for c in &all_chars {
        let s = c.to_string();
        if present.insert(s.clone()) {
            entries.push(s);
        }
    }
    for c in &inner_chars {
        let s = format!("{marker}{c}");
        if present.insert(s.clone()) {
            entries.push(s);
        }
    }
    let base_size = entries.len();
    if cfg.target_vocab_size < base_size {
        return Err(Error::TargetTooSmall {
            target: cfg.target_vocab_size,
            required: base_size,
        });
    }

    let mut symbols = Symbols {
        strings: Vec::new(),
        ids: HashMap::new(),
    };
    let mut words: Vec<(Vec<u32>, u64)> = Vec::with_capacity(corpus.word_counts.len());
    for (word, &count) in &corpus.word_counts {
        let syms = word
            .chars()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    symbols.intern(c.to_string())
                } else {
                    symbols.intern(format!("{marker}{c}"))
                }
            })
            .collect();
        words.push((syms, count));
    }

    let mut piece_freq: Vec<u64> = vec![0; symbols.strings.len()];
    let mut pair_freq: HashMap<Pair, u64> = HashMap::new();
    let mut pair_words: HashMap<Pair, Vec<usize>> = HashMap::new();
    for (idx, (syms, count)) in words.iter().enumerate() {
        for &s in syms {
            piece_freq[s as usize] += count;
        }
        for w in syms.windows(2) {
            let p = (w[0], w[1]);
            *pair_freq.entry(p).or_insert(0) += count;
            pair_words.entry(p).or_default().push(idx);
        }
    }

    let mut merges = 0;
    let mut exhausted = false;
    while entries.len() < cfg.target_vocab_size {
        let mut best: Option<Candidate> = None;
        for (&pair, &freq) in &pair_freq {
            if freq < cfg.min_pair_frequency {
                continue;
            }
            let cand = Candidate {
                pair,
                freq,
                denom: piece_freq[pair.0 as usize] as u128 * piece_freq[pair.1 as usize] as u128,
            };
            let better = match &best {
                None => true,
                Some(b) => cand.rank(b, &symbols.strings, marker) == Ordering::Greater,
            };
            if better {
                best = Some(cand);
            }
        }
        let Some(best) = best else {
            exhausted = true;
            break;
        };
        let pair = best.pair;
        let merged = merged_entry(&symbols.strings, pair, marker);

        let new_id = symbols.intern(merged.clone());
        if piece_freq.len() < symbols.strings.len() {
            piece_freq.resize(symbols.strings.len(), 0);
        }

        let mut affected = pair_words.remove(&pair).unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();
        for idx in affected {
            let (syms, count) = &mut words[idx];
            let count = *count;
            if !syms.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            for &s in syms.iter() {
                piece_freq[s as usize] -= count;
            }
            for w in syms.windows(2) {
                let p = (w[0], w[1]);
                if let Some(f) = pair_freq.get_mut(&p) {
                    *f -= count;
                    if *f == 0 {
                        pair_freq.remove(&p);
                    }
                }
            }
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && (syms[i], syms[i + 1]) == pair {
                    out.push(new_id);
                    i += 2;
                } else {
                    out.push(syms[i]);
                    i += 1;
                }
            }
            *syms = out;
            for &s in syms.iter() {
                piece_freq[s as usize] += count;
            }
            for w in syms.windows(2) {
                let p = (w[0], w[1]);
                *pair_freq.entry(p).or_insert(0) += count;
                if p != pair {
                    pair_words.entry(p).or_default().push(idx);
                }
            }
        }
        pair_freq.remove(&pair);
        merges += 1;
        if present.insert(merged.clone()) {
            entries.push(merged);
        }
    }

    if exhausted {
        log::warn!(
            "trainer stopped at {} entries (target {}): no pair with frequency >= {}",
            entries.len(),
            cfg.target_vocab_size,
            cfg.min_pair_frequency
        );
    }
    Ok(TrainedVocabulary {
        vocab: Vocabulary::new(entries, marker)?,
        base_size,
        merges,
        exhausted,
    })
}

fn merged_entry(strings: &[String], (left, right): Pair, marker: &str) -> String {
    let l = &strings[left as usize];
    let r = &strings[right as usize];
    let r = r.strip_prefix(marker).unwrap_or(r);
    let mut s = String::with_capacity(l.len() + r.len());
    s.push_str(l);
    s.push_str(r);
    s
}

/// Word types sorted by count descending, ties lexicographic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordVocabRanking {
    pub words: Vec<(String, u64)>,
}

impl WordVocabRanking {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn rank_words(corpus: &Corpus) -> Result<WordVocabRanking> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut words: Vec<(String, u64)> = corpus
        .word_counts
        .iter()
        .map(|(w, &c)| (w.clone(), c))
        .collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(WordVocabRanking { words })
}

/// Word-level vocabulary of the `k` most frequent types plus `[UNK]`.
pub fn top_k_vocab(ranking: &WordVocabRanking, k: usize) -> Result<Vocabulary> {
    if k == 0 || k > ranking.len() {
        return Err(Error::KOutOfRange {
            k,
            max: ranking.len(),
        });
    }
    let mut entries = vec![UNK_TOKEN.to_owned()];
    entries.extend(
        ranking.words[..k]
            .iter()
            .map(|(w, _)| w.clone())
            .filter(|w| w != UNK_TOKEN),
    );
    Vocabulary::new(entries, DEFAULT_CONTINUATION_MARKER)
}
