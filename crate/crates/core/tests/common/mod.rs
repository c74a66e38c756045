//! Deterministic Turkish-like synthetic data: stems with vowel-harmonic
//! suffix chains, Zipf-distributed over stems.

#![allow(dead_code)]

use morphtok::morphdata::MorphAnalysis;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONSONANTS: &[char] = &[
    'b', 'c', 'ç', 'd', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 'ş', 't', 'v', 'y', 'z',
];
const VOWELS: &[char] = &['a', 'e', 'ı', 'i', 'o', 'ö', 'u', 'ü'];

fn is_vowel(c: char) -> bool {
    VOWELS.contains(&c)
}

fn last_vowel(s: &str) -> char {
    s.chars().rev().find(|c| is_vowel(*c)).unwrap_or('a')
}

fn two_way(s: &str) -> char {
    match last_vowel(s) {
        'a' | 'ı' | 'o' | 'u' => 'a',
        _ => 'e',
    }
}

fn four_way(s: &str) -> char {
    match last_vowel(s) {
        'a' | 'ı' => 'ı',
        'e' | 'i' => 'i',
        'o' | 'u' => 'u',
        _ => 'ü',
    }
}

fn ends_in_vowel(s: &str) -> bool {
    s.chars().last().is_some_and(is_vowel)
}

pub struct Synth {
    rng: ChaCha8Rng,
    nouns: Vec<String>,
    verbs: Vec<String>,
    noun_weights: WeightedIndex<f64>,
    verb_weights: WeightedIndex<f64>,
}

impl Synth {
    pub fn new(seed: u64) -> Self {
        // the lexicon is fixed; `seed` only drives sampling
        let mut lex = ChaCha8Rng::seed_from_u64(0x5eed);
        let nouns = make_stems(&mut lex, 600, true);
        let verbs = make_stems(&mut lex, 200, false);
        let zipf = |n: usize| WeightedIndex::new((0..n).map(|r| 1.0 / (r as f64 + 1.0))).unwrap();
        Synth {
            rng: ChaCha8Rng::seed_from_u64(seed),
            noun_weights: zipf(nouns.len()),
            verb_weights: zipf(verbs.len()),
            nouns,
            verbs,
        }
    }

    pub fn analysis(&mut self) -> MorphAnalysis {
        if self.rng.gen_bool(0.65) {
            self.noun()
        } else {
            self.verb()
        }
    }

    fn noun(&mut self) -> MorphAnalysis {
        let stem = self.nouns[self.noun_weights.sample(&mut self.rng)].clone();
        let mut word = stem.clone();
        let mut suffixes = Vec::new();
        let mut push = |word: &mut String, s: String| {
            word.push_str(&s);
            suffixes.push(s);
        };
        if self.rng.gen_bool(0.5) {
            let s = format!("l{}r", two_way(&word));
            push(&mut word, s);
        }
        if self.rng.gen_bool(0.3) {
            let v = four_way(&word);
            let s = if ends_in_vowel(&word) {
                format!("m{v}z")
            } else {
                format!("{v}m{v}z")
            };
            push(&mut word, s);
        }
        match self.rng.gen_range(0..5) {
            0 => {
                let s = format!("d{}", two_way(&word));
                push(&mut word, s);
            }
            1 => {
                let s = format!("d{}n", two_way(&word));
                push(&mut word, s);
            }
            2 if !ends_in_vowel(&word) => {
                let s = four_way(&word).to_string();
                push(&mut word, s);
            }
            _ => {}
        }
        MorphAnalysis::new(&word, &stem, &suffixes.iter().map(String::as_str).collect::<Vec<_>>()).unwrap()
    }

    fn verb(&mut self) -> MorphAnalysis {
        let stem = self.verbs[self.verb_weights.sample(&mut self.rng)].clone();
        let mut word = stem.clone();
        let mut suffixes: Vec<String> = Vec::new();
        let tense = self.rng.gen_range(0..3);
        let s = match tense {
            0 => format!("{}yor", four_way(&word)),
            1 => format!("d{}", four_way(&word)),
            _ => format!("{}c{}k", if ends_in_vowel(&word) { format!("y{}", two_way(&word)) } else { two_way(&word).to_string() }, two_way(&word)),
        };
        word.push_str(&s);
        suffixes.push(s);
        if tense == 0 && self.rng.gen_bool(0.4) {
            let s = format!("d{}", four_way(&word));
            word.push_str(&s);
            suffixes.push(s);
        }
        if self.rng.gen_bool(0.7) {
            let s = if ends_in_vowel(&word) {
                ["m", "k", "n"][self.rng.gen_range(0..3)].to_string()
            } else {
                format!("{}m", four_way(&word))
            };
            word.push_str(&s);
            suffixes.push(s);
        }
        MorphAnalysis::new(&word, &stem, &suffixes.iter().map(String::as_str).collect::<Vec<_>>()).unwrap()
    }

    pub fn analyses(&mut self, n: usize) -> Vec<MorphAnalysis> {
        (0..n).map(|_| self.analysis()).collect()
    }

    /// Newline-separated documents of 6 to 14 words, at least `bytes` long.
    pub fn corpus_text(&mut self, bytes: usize) -> String {
        let mut out = String::with_capacity(bytes + 256);
        while out.len() < bytes {
            let n = self.rng.gen_range(6..15);
            let words: Vec<String> = (0..n).map(|_| self.analysis().word).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    /// Exactly `n` words across lines of ten.
    pub fn corpus_words(&mut self, n: usize) -> Vec<String> {
        let words: Vec<String> = (0..n).map(|_| self.analysis().word).collect();
        words.chunks(10).map(|c| c.join(" ")).collect()
    }
}

fn make_stems(rng: &mut ChaCha8Rng, n: usize, nominal: bool) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = if nominal { rng.gen_range(1..4) } else { rng.gen_range(1..3) };
        let mut s = String::new();
        for i in 0..syllables {
            if i > 0 || rng.gen_bool(0.7) {
                s.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
            }
            s.push(VOWELS[rng.gen_range(0..VOWELS.len())]);
        }
        if rng.gen_bool(0.75) {
            s.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
        }
        if s.chars().count() >= 2 && seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}
