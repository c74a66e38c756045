//! Word-level tokenization schemes behind a single [`Tokenizer`] interface.
//!
//! Every scheme maps one (already normalized) word to a [`TokenizedWord`].
//! Token texts never carry the continuation marker; continuation is a flag.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, LineError, Result};
use crate::normalize::{char_len, normalize};

pub const DEFAULT_CONTINUATION_MARKER: &str = "##";
pub const UNK_TOKEN: &str = "[UNK]";

/// Words longer than this are tokenized normally but flagged in reports.
pub const LONG_WORD_CHARS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub is_continuation: bool,
    pub is_unknown: bool,
}

impl Token {
    pub fn initial(text: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            is_continuation: false,
            is_unknown: false,
        }
    }

    pub fn continuation(text: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            is_continuation: true,
            is_unknown: false,
        }
    }

    pub fn unknown() -> Self {
        Token {
            text: UNK_TOKEN.to_owned(),
            is_continuation: false,
            is_unknown: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedWord {
    pub word: String,
    pub tokens: Vec<Token>,
}

impl TokenizedWord {
    pub fn unknown(word: &str) -> Self {
        TokenizedWord {
            word: word.to_owned(),
            tokens: vec![Token::unknown()],
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn has_unknown(&self) -> bool {
        self.tokens.iter().any(|t| t.is_unknown)
    }

    pub fn continuation_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_continuation).count()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Concatenated token texts; equals `word` for any non-UNK tokenization.
    pub fn reconstruct(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Renders tokens with `marker` in front of continuation pieces.
    pub fn display_with(&self, marker: &str) -> Vec<String> {
        self.tokens
            .iter()
            .map(|t| {
                if t.is_continuation {
                    format!("{marker}{}", t.text)
                } else {
                    t.text.clone()
                }
            })
            .collect()
    }
}

/// Token inventory in file order. Continuation entries carry the marker prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<String>,
    index: HashSet<String>,
    specials: BTreeSet<String>,
    marker: String,
    max_piece_chars: usize,
}

fn looks_special(entry: &str) -> bool {
    entry.len() > 2 && entry.starts_with('[') && entry.ends_with(']')
}

impl Vocabulary {
    /// Entries of the form `[NAME]` are treated as special tokens; `[UNK]` is required.
    pub fn new(entries: Vec<String>, marker: &str) -> Result<Self> {
        let mut index = HashSet::with_capacity(entries.len());
        let mut specials = BTreeSet::new();
        let mut max_piece_chars = 0;
        for e in &entries {
            if e.is_empty() {
                return Err(Error::Invalid("empty vocabulary entry".into()));
            }
            if !index.insert(e.clone()) {
                return Err(Error::DuplicateEntry(e.clone()));
            }
            if looks_special(e) {
                specials.insert(e.clone());
            } else {
                let body = e.strip_prefix(marker).filter(|b| !b.is_empty()).unwrap_or(e);
                max_piece_chars = max_piece_chars.max(char_len(body));
            }
        }
        if !index.contains(UNK_TOKEN) {
            return Err(Error::MissingUnk(UNK_TOKEN.to_owned()));
        }
        Ok(Vocabulary {
            entries,
            index,
            specials,
            marker: marker.to_owned(),
            max_piece_chars,
        })
    }

    pub fn load(path: impl AsRef<Path>, marker: &str) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, marker)
    }

    pub fn parse(text: &str, marker: &str) -> Result<Self> {
        let entries = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        Self::new(entries, marker)
    }

    /// vocab.txt rendering: one entry per line, file order.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(e);
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_file_string()).map_err(|e| Error::io(path, e))
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn specials(&self) -> &BTreeSet<String> {
        &self.specials
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, entry: &str) -> bool {
        self.index.contains(entry)
    }

    /// Whether `piece` exists as a word-initial entry.
    pub fn contains_initial(&self, piece: &str) -> bool {
        !self.specials.contains(piece) && self.index.contains(piece)
    }

    /// Whether `piece` exists as a continuation entry (`marker + piece`).
    pub fn contains_continuation(&self, piece: &str) -> bool {
        let mut key = String::with_capacity(self.marker.len() + piece.len());
        key.push_str(&self.marker);
        key.push_str(piece);
        self.index.contains(&key)
    }

    /// Non-special entries with the continuation marker stripped.
    pub fn piece_types(&self) -> HashSet<String> {
        self.entries
            .iter()
            .filter(|e| !self.specials.contains(*e))
            .map(|e| {
                e.strip_prefix(self.marker.as_str())
                    .filter(|b| !b.is_empty())
                    .unwrap_or(e)
                    .to_owned()
            })
            .collect()
    }

    /// Set-inclusion of entries.
    pub fn is_subset_of(&self, other: &Vocabulary) -> bool {
        self.entries.iter().all(|e| other.contains(e))
    }
}

/// One uniform word-in, tokens-out interface.
pub trait Tokenizer: Send + Sync {
    fn name(&self) -> &str;

    /// `word` must already be normalized and non-empty.
    fn tokenize(&self, word: &str) -> TokenizedWord;

    /// The inventory the tokenizer draws from, when it has one.
    fn vocabulary(&self) -> Option<&Vocabulary> {
        None
    }
}

pub fn char_tokenize(word: &str) -> TokenizedWord {
    let tokens = word
        .chars()
        .enumerate()
        .map(|(i, c)| {
            if i == 0 {
                Token::initial(c)
            } else {
                Token::continuation(c)
            }
        })
        .collect();
    TokenizedWord {
        word: word.to_owned(),
        tokens,
    }
}

pub fn word_tokenize(word: &str, vocab: &Vocabulary) -> TokenizedWord {
    if vocab.contains_initial(word) {
        TokenizedWord {
            word: word.to_owned(),
            tokens: vec![Token::initial(word)],
        }
    } else {
        TokenizedWord::unknown(word)
    }
}

/// Greedy longest-match segmentation; any unmatchable position makes the
/// whole word a single `[UNK]`.
pub fn wordpiece_tokenize(word: &str, vocab: &Vocabulary) -> TokenizedWord {
    let chars: Vec<char> = word.chars().collect();
    let mut tokens = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let longest = (chars.len() - start).min(vocab.max_piece_chars);
        let mut matched = None;
        for end in (start + 1..=start + longest).rev() {
            let piece: String = chars[start..end].iter().collect();
            let hit = if start == 0 {
                vocab.contains_initial(&piece)
            } else {
                vocab.contains_continuation(&piece)
            };
            if hit {
                matched = Some((end, piece));
                break;
            }
        }
        match matched {
            Some((end, piece)) => {
                tokens.push(if start == 0 {
                    Token::initial(piece)
                } else {
                    Token::continuation(piece)
                });
                start = end;
            }
            None => return TokenizedWord::unknown(word),
        }
    }
    if tokens.is_empty() {
        return TokenizedWord::unknown(word);
    }
    TokenizedWord {
        word: word.to_owned(),
        tokens,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CharTokenizer;

impl Tokenizer for CharTokenizer {
    fn name(&self) -> &str {
        "char"
    }

    fn tokenize(&self, word: &str) -> TokenizedWord {
        char_tokenize(word)
    }
}

#[derive(Debug, Clone)]
pub struct WordTokenizer {
    vocab: Vocabulary,
}

impl WordTokenizer {
    pub fn new(vocab: Vocabulary) -> Self {
        WordTokenizer { vocab }
    }
}

impl Tokenizer for WordTokenizer {
    fn name(&self) -> &str {
        "word"
    }

    fn tokenize(&self, word: &str) -> TokenizedWord {
        word_tokenize(word, &self.vocab)
    }

    fn vocabulary(&self) -> Option<&Vocabulary> {
        Some(&self.vocab)
    }
}

#[derive(Debug, Clone)]
pub struct WordPieceTokenizer {
    vocab: Vocabulary,
}

impl WordPieceTokenizer {
    pub fn new(vocab: Vocabulary) -> Self {
        WordPieceTokenizer { vocab }
    }
}

impl Tokenizer for WordPieceTokenizer {
    fn name(&self) -> &str {
        "wordpiece"
    }

    fn tokenize(&self, word: &str) -> TokenizedWord {
        wordpiece_tokenize(word, &self.vocab)
    }

    fn vocabulary(&self) -> Option<&Vocabulary> {
        Some(&self.vocab)
    }
}

#[derive(Debug, Deserialize)]
struct PretokenizedRecord {
    word: String,
    tokens: Vec<String>,
}

/// Segmentations produced by an external tool, looked up by normalized word.
/// Words absent from the file tokenize to `[UNK]`.
#[derive(Debug, Clone, Default)]
pub struct PretokenizedTokenizer {
    pub map: HashMap<String, TokenizedWord>,
    pub duplicates: usize,
    pub errors: Vec<LineError>,
}

impl PretokenizedTokenizer {
    pub fn parse(text: &str, marker: &str) -> Self {
        let mut out = PretokenizedTokenizer::default();
        for (idx, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            match parse_pretokenized_line(raw, marker) {
                Ok(tw) => {
                    if out.map.insert(tw.word.clone(), tw).is_some() {
                        out.duplicates += 1;
                    }
                }
                Err(message) => out.errors.push(LineError {
                    line: idx + 1,
                    message,
                }),
            }
        }
        out
    }
}

fn parse_pretokenized_line(raw: &str, marker: &str) -> std::result::Result<TokenizedWord, String> {
    let rec: PretokenizedRecord = serde_json::from_str(raw).map_err(|e| e.to_string())?;
    let word = normalize(rec.word.trim());
    if word.is_empty() {
        return Err("word is empty".into());
    }
    if rec.tokens.is_empty() {
        return Err("token list is empty".into());
    }
    let mut tokens = Vec::with_capacity(rec.tokens.len());
    for (i, piece) in rec.tokens.iter().enumerate() {
        let (body, marked) = match piece.strip_prefix(marker) {
            Some(rest) if !rest.is_empty() => (rest, true),
            _ => (piece.as_str(), false),
        };
        let body = normalize(body);
        if body.is_empty() {
            return Err(format!("token {i} is empty"));
        }
        tokens.push(Token {
            text: body,
            is_continuation: i > 0 && marked,
            is_unknown: false,
        });
    }
    let tw = TokenizedWord { word, tokens };
    let rebuilt = tw.reconstruct();
    if rebuilt != tw.word {
        return Err(format!(
            "tokens concatenate to {rebuilt:?}, expected {:?}",
            tw.word
        ));
    }
    Ok(tw)
}

pub fn pretokenized_adapter(path: impl AsRef<Path>, marker: &str) -> Result<PretokenizedTokenizer> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let out = PretokenizedTokenizer::parse(&text, marker);
    if out.duplicates > 0 {
        log::warn!(
            "{}: {} duplicate word(s); later lines win",
            path.display(),
            out.duplicates
        );
    }
    if !out.errors.is_empty() {
        log::warn!("{}: {} line(s) skipped", path.display(), out.errors.len());
    }
    Ok(out)
}

impl Tokenizer for PretokenizedTokenizer {
    fn name(&self) -> &str {
        "pretokenized"
    }

    fn tokenize(&self, word: &str) -> TokenizedWord {
        self.map
            .get(word)
            .cloned()
            .unwrap_or_else(|| TokenizedWord::unknown(word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab(entries: &[&str]) -> Vocabulary {
        let mut v: Vec<String> = vec![UNK_TOKEN.to_owned()];
        v.extend(entries.iter().map(|s| s.to_string()));
        Vocabulary::new(v, DEFAULT_CONTINUATION_MARKER).unwrap()
    }

    #[test]
    fn char_scheme() {
        let t = char_tokenize("gittim");
        assert_eq!(
            t.display_with("##"),
            ["g", "##i", "##t", "##t", "##i", "##m"]
        );
        assert_eq!(char_tokenize("a").display_with("##"), ["a"]);
        let t = char_tokenize("koş");
        assert_eq!(t.display_with("##"), ["k", "##o", "##ş"]);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn word_scheme() {
        let v = vocab(&["ev"]);
        let t = word_tokenize("ev", &v);
        assert_eq!(t.texts(), ["ev"]);
        assert!(!t.has_unknown());
        let t = word_tokenize("evlerimizden", &v);
        assert_eq!(t.len(), 1);
        assert!(t.tokens[0].is_unknown);
        // specials never match as words
        assert!(word_tokenize("[UNK]", &v).has_unknown());
    }

    #[test]
    fn wordpiece_greedy_longest_match() {
        let v = vocab(&["e", "ev", "evler", "##ler", "##lerimiz", "##den", "##d", "##e", "##n"]);
        // "evler" is the longest initial match, then "##i" is not in the vocabulary
        let t = wordpiece_tokenize("evlerimizden", &v);
        assert_eq!(t.texts(), ["[UNK]"]);
        assert!(t.has_unknown());

        let v = vocab(&["ev", "##lerimiz", "##den"]);
        assert_eq!(
            wordpiece_tokenize("evlerimizden", &v).display_with("##"),
            ["ev", "##lerimiz", "##den"]
        );
        assert_eq!(wordpiece_tokenize("ev", &v).display_with("##"), ["ev"]);
        let t = wordpiece_tokenize("xyz", &v);
        assert_eq!(t.len(), 1);
        assert!(t.tokens[0].is_unknown);
    }

    #[test]
    fn wordpiece_initial_and_continuation_are_distinct() {
        // "de" exists only as a word-initial entry
        let v = vocab(&["ev", "de"]);
        assert!(wordpiece_tokenize("evde", &v).has_unknown());
        assert_eq!(wordpiece_tokenize("de", &v).texts(), ["de"]);
    }

    #[test]
    fn lemma_split_by_char_vocab() {
        let v = vocab(&["k", "##i", "##t", "##a", "##p"]);
        assert_eq!(wordpiece_tokenize("kitap", &v).len(), 5);
    }

    #[test]
    fn vocabulary_rejects_duplicates_and_missing_unk() {
        assert!(matches!(
            Vocabulary::new(vec!["a".into()], "##"),
            Err(Error::MissingUnk(_))
        ));
        assert!(matches!(
            Vocabulary::new(vec!["[UNK]".into(), "a".into(), "a".into()], "##"),
            Err(Error::DuplicateEntry(_))
        ));
        let v = Vocabulary::parse("[PAD]\n[UNK]\na\n##b\n", "##").unwrap();
        assert_eq!(v.specials().len(), 2);
        assert_eq!(v.to_file_string(), "[PAD]\n[UNK]\na\n##b\n");
        let types = v.piece_types();
        assert!(types.contains("a") && types.contains("b") && types.len() == 2);
    }

    #[test]
    fn pretokenized_lines() {
        let text = concat!(
            r###"{"word":"gittim","tokens":["git","##ti","##m"]}"###,
            "\n",
            r#"{"word":"ve","tokens":["ve"]}"#,
            "\n",
            r###"{"word":"ab","tokens":["a","##c"]}"###,
            "\n",
            r###"{"word":"ve","tokens":["v","##e"]}"###,
            "\n",
        );
        let p = PretokenizedTokenizer::parse(text, "##");
        assert_eq!(p.map["gittim"].len(), 3);
        assert_eq!(p.map["gittim"].continuation_count(), 2);
        assert_eq!(p.errors.len(), 1);
        assert_eq!(p.errors[0].line, 3);
        assert_eq!(p.duplicates, 1);
        assert_eq!(p.map["ve"].len(), 2);
        assert!(p.tokenize("yok").has_unknown());
    }

    fn turkish_word() -> impl Strategy<Value = String> {
        proptest::collection::vec(
            proptest::sample::select(vec!['a', 'e', 'ı', 'i', 'k', 'l', 'r', 'ş', 'ç', 'ü']),
            1..16,
        )
        .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn char_counts(word in turkish_word()) {
            let t = char_tokenize(&word);
            prop_assert_eq!(t.len(), char_len(&word));
            prop_assert_eq!(t.continuation_count(), char_len(&word) - 1);
            prop_assert_eq!(t.reconstruct(), word);
        }

        #[test]
        fn wordpiece_reconstructs(word in turkish_word(), extra in proptest::collection::vec(turkish_word(), 0..20)) {
            let mut entries: Vec<String> = vec!["[UNK]".into()];
            let mut seen = HashSet::new();
            for e in extra.iter().flat_map(|w| [w.clone(), format!("##{w}")]) {
                if seen.insert(e.clone()) {
                    entries.push(e);
                }
            }
            let v = Vocabulary::new(entries, "##").unwrap();
            let t = wordpiece_tokenize(&word, &v);
            if !t.has_unknown() {
                prop_assert_eq!(t.reconstruct(), word.clone());
                prop_assert!(!t.tokens[0].is_continuation);
            } else {
                prop_assert_eq!(t.len(), 1);
            }
            prop_assert_eq!(wordpiece_tokenize(&word, &v), t);
        }

        #[test]
        fn char_alphabet_vocab_degenerates_to_char_scheme(word in turkish_word()) {
            let mut entries: Vec<String> = vec!["[UNK]".into()];
            for c in ['a', 'e', 'ı', 'i', 'k', 'l', 'r', 'ş', 'ç', 'ü'] {
                entries.push(c.to_string());
                entries.push(format!("##{c}"));
            }
            let v = Vocabulary::new(entries, "##").unwrap();
            prop_assert_eq!(wordpiece_tokenize(&word, &v), char_tokenize(&word));
        }
    }
}
