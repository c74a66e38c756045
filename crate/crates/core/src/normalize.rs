//! Text canonicalization shared by every loader and tokenizer input.
//!
//! All text goes through Unicode NFKC and then `char::to_lowercase`, which is
//! locale-independent. Turkish `I`/`İ` therefore fold to `i` and `i̇` rather
//! than `ı` and `i`.

use std::sync::Once;

use unicode_normalization::UnicodeNormalization;

static CASEFOLD_NOTICE: Once = Once::new();

/// NFKC followed by simple (locale-independent) lowercasing.
pub fn normalize(text: &str) -> String {
    CASEFOLD_NOTICE.call_once(|| {
        log::info!(
            "normalization: NFKC + locale-independent lowercasing; \
             Turkish dotted/dotless i is not specially cased"
        );
    });
    text.nfkc().collect::<String>().to_lowercase()
}

/// Length in Unicode scalar values.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}
