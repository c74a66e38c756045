//! Gold morphological analyses and raw text corpora.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, LineError, Result};
use crate::metrics::BoundarySet;
use crate::normalize::{char_len, normalize};

/// One gold item: surface word, lemma, and its suffix chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphAnalysis {
    pub word: String,
    pub lemma: String,
    pub suffixes: Vec<String>,
}

impl MorphAnalysis {
    /// Builds a normalized analysis, rejecting empty words, lemmas or suffixes.
    pub fn new(word: &str, lemma: &str, suffixes: &[&str]) -> Result<Self> {
        let word = normalize(word.trim());
        let lemma = normalize(lemma.trim());
        if word.is_empty() {
            return Err(Error::Invalid("word is empty".into()));
        }
        if lemma.is_empty() {
            return Err(Error::Invalid("lemma is empty".into()));
        }
        let mut out = Vec::with_capacity(suffixes.len());
        for s in suffixes {
            let s = normalize(s.trim());
            if s.is_empty() {
                return Err(Error::Invalid("empty suffix in chain".into()));
            }
            out.push(s);
        }
        Ok(MorphAnalysis {
            word,
            lemma,
            suffixes: out,
        })
    }

    /// Parses the `+`-joined suffix field; an empty string means no suffixes.
    pub fn from_fields(word: &str, lemma: &str, suffixes: &str) -> Result<Self> {
        let trimmed = suffixes.trim();
        let parts: Vec<&str> = if trimmed.is_empty() {
            Vec::new()
        } else {
            trimmed.split('+').collect()
        };
        Self::new(word, lemma, &parts)
    }

    pub fn suffix_field(&self) -> String {
        self.suffixes.join("+")
    }

    /// `lemma` followed by the suffixes.
    pub fn morphs(&self) -> Vec<&str> {
        std::iter::once(self.lemma.as_str())
            .chain(self.suffixes.iter().map(String::as_str))
            .collect()
    }

    /// Serializes to the gold JSON Lines record.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "word": self.word,
            "lemma": self.lemma,
            "suffixes": self.suffix_field(),
        })
        .to_string()
    }
}

/// Gold morph sequence with its cumulative boundary offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldSegmentation {
    pub morphs: Vec<String>,
    pub boundaries: BoundarySet,
    /// True iff the morphs concatenate to the surface word.
    pub concatenative: bool,
    pub word_len: usize,
}

impl GoldSegmentation {
    pub fn k(&self) -> usize {
        self.morphs.len()
    }

    pub fn lemma_len(&self) -> usize {
        char_len(&self.morphs[0])
    }
}

pub fn gold_segmentation(a: &MorphAnalysis) -> GoldSegmentation {
    let morphs: Vec<String> = a.morphs().into_iter().map(str::to_owned).collect();
    let boundaries = BoundarySet::from_lengths(morphs.iter().map(|m| char_len(m)));
    let concatenative = morphs.concat() == a.word;
    GoldSegmentation {
        morphs,
        boundaries,
        concatenative,
        word_len: char_len(&a.word),
    }
}

/// Result of reading a gold file: the parsed items plus per-line problems.
#[derive(Debug, Clone, Default)]
pub struct GoldFile {
    pub items: Vec<MorphAnalysis>,
    pub errors: Vec<LineError>,
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<GoldFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = parse_gold(&text);
    if !parsed.errors.is_empty() {
        log::warn!(
            "{}: {} malformed line(s) skipped",
            path.display(),
            parsed.errors.len()
        );
    }
    Ok(parsed)
}

pub fn parse_gold(text: &str) -> GoldFile {
    let mut out = GoldFile::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        match parse_gold_line(raw) {
            Ok(a) => out.items.push(a),
            Err(message) => out.errors.push(LineError { line, message }),
        }
    }
    out
}

fn parse_gold_line(raw: &str) -> std::result::Result<MorphAnalysis, String> {
    let value: serde_json::Value = serde_json::from_str(raw).map_err(|e| e.to_string())?;
    let field = |name: &str| -> std::result::Result<&str, String> {
        match value.get(name) {
            Some(serde_json::Value::String(s)) => Ok(s),
            Some(serde_json::Value::Null) if name == "suffixes" => Ok(""),
            Some(_) => Err(format!("field `{name}` is not a string")),
            None => Err(format!("missing field `{name}`")),
        }
    };
    let word = field("word")?;
    let lemma = field("lemma")?;
    let suffixes = field("suffixes")?;
    MorphAnalysis::from_fields(word, lemma, suffixes).map_err(|e| e.to_string())
}

/// Newline-delimited documents and their normalized word counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<String>,
    pub word_counts: BTreeMap<String, u64>,
}

impl Corpus {
    pub fn from_documents<I, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut corpus = Corpus::default();
        for doc in docs {
            let doc = doc.into();
            for w in doc.split_whitespace() {
                let w = normalize(w);
                if !w.is_empty() {
                    *corpus.word_counts.entry(w).or_insert(0) += 1;
                }
            }
            corpus.documents.push(doc);
        }
        corpus
    }

    /// Builds a corpus directly from counts; zero counts are dropped.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut word_counts = BTreeMap::new();
        for (w, c) in counts {
            let w = normalize(w.as_ref());
            if c > 0 && !w.is_empty() {
                *word_counts.entry(w).or_insert(0) += c;
            }
        }
        Corpus {
            documents: Vec::new(),
            word_counts,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.word_counts.is_empty()
    }

    pub fn token_count(&self) -> u64 {
        self.word_counts.values().sum()
    }

    pub fn type_count(&self) -> usize {
        self.word_counts.len()
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(Corpus::from_documents(text.lines()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_suffixed_item() {
        let g = parse_gold(r#"{"word":"kitaplarımızda","lemma":"kitap","suffixes":"lar+ımız+da"}"#);
        assert!(g.errors.is_empty());
        assert_eq!(
            g.items,
            vec![MorphAnalysis::new("kitaplarımızda", "kitap", &["lar", "ımız", "da"]).unwrap()]
        );
        assert_eq!(g.items[0].suffixes, ["lar", "ımız", "da"]);
    }

    #[test]
    fn lemma_only_item_has_no_suffixes() {
        let g = parse_gold(r#"{"word":"çocuk","lemma":"çocuk","suffixes":""}"#);
        assert_eq!(g.items.len(), 1);
        assert!(g.items[0].suffixes.is_empty());
    }

    #[test]
    fn empty_input_is_empty() {
        let g = parse_gold("");
        assert!(g.items.is_empty() && g.errors.is_empty());
    }

    #[test]
    fn malformed_lines_are_reported_with_numbers() {
        let text = concat!(
            r#"{"word":"ev","lemma":"ev","suffixes":""}"#,
            "\n",
            r#"{"word":"evde","suffixes":"de"}"#,
            "\n",
            "not json\n",
            r#"{"word":"evde","lemma":"ev","suffixes":"+de"}"#,
            "\n",
            r#"{"word":"evler","lemma":"ev","suffixes":"ler"}"#,
        );
        let g = parse_gold(text);
        assert_eq!(g.items.len(), 2);
        let lines: Vec<usize> = g.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 3, 4]);
        assert!(g.errors[0].message.contains("lemma"));
    }

    #[test]
    fn input_is_normalized() {
        let g = parse_gold(r#"{"word":"Evler","lemma":"EV","suffixes":"LER"}"#);
        assert_eq!(g.items[0].word, "evler");
        assert_eq!(g.items[0].lemma, "ev");
        assert_eq!(g.items[0].suffixes, ["ler"]);
    }

    #[test]
    fn gold_boundaries_follow_cumulative_lengths() {
        let a = MorphAnalysis::new("kitaplarımızda", "kitap", &["lar", "ımız", "da"]).unwrap();
        let g = gold_segmentation(&a);
        assert_eq!(g.boundaries.offsets(), &[5, 8, 12, 14]);
        assert_eq!(g.k(), 4);
        assert!(g.concatenative);

        let a = MorphAnalysis::new("koşuyordum", "koş", &["uyor", "du", "m"]).unwrap();
        assert_eq!(gold_segmentation(&a).boundaries.offsets(), &[3, 7, 9, 10]);

        let a = MorphAnalysis::new("çocuk", "çocuk", &[]).unwrap();
        let g = gold_segmentation(&a);
        assert_eq!(g.boundaries.offsets(), &[5]);
        assert_eq!(g.k(), 1);
    }

    #[test]
    fn non_concatenative_items_are_flagged() {
        // lemma "git" surfaces as "gid"
        let a = MorphAnalysis::new("gidiyor", "git", &["iyor"]).unwrap();
        let g = gold_segmentation(&a);
        assert!(!g.concatenative);
        assert_eq!(g.k(), 2);
    }

    #[test]
    fn corpus_counts_words() {
        let c = Corpus::from_documents(["ev evde", "ev"]);
        assert_eq!(c.word_counts.get("ev"), Some(&2));
        assert_eq!(c.word_counts.get("evde"), Some(&1));
        assert_eq!(c.documents.len(), 2);
        assert!(Corpus::from_documents(Vec::<String>::new()).is_empty());

        let c = Corpus::from_documents(["Ev ev"]);
        assert_eq!(c.word_counts.len(), 1);
        assert_eq!(c.word_counts["ev"], 2);
    }

    #[test]
    fn load_corpus_missing_file_is_fatal() {
        assert!(matches!(
            load_corpus("/nonexistent/corpus.txt"),
            Err(Error::Io { .. })
        ));
        assert!(load_gold("/nonexistent/gold.jsonl").is_err());
    }
}
