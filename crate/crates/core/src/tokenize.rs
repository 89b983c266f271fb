//! Tokenizers: space-separated words, normalized word runs, and character
//! n-grams. All operate on unicode code points, so multi-byte characters
//! count as one symbol.

use crate::{Error, Result};

/// Tokenization strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tokenizer {
    /// Split on single space characters, dropping empty runs.
    Words,
    /// Lowercase, then take maximal runs of word characters (letters,
    /// digits, underscore) at least two code points long.
    NormalizedWords,
    /// All contiguous substrings of `n` code points.
    CharNgrams { n: usize },
}

impl Tokenizer {
    pub fn tokenize(&self, text: &str) -> Result<Vec<String>> {
        match *self {
            Tokenizer::Words => Ok(tokenize_words(text)),
            Tokenizer::NormalizedWords => Ok(tokenize_normalized(text)),
            Tokenizer::CharNgrams { n } => char_ngrams(text, n),
        }
    }
}

/// Per-code-point lowercase mapping of the whole text.
pub fn lowercase_codepoints(text: &str) -> String {
    text.chars().flat_map(char::to_lowercase).collect()
}

/// Maximal runs of non-space characters, splitting on single `' '`
/// characters. Empty runs (from repeated spaces) are dropped.
pub fn tokenize_words(text: &str) -> Vec<String> {
    text.split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Lowercases the text (per-code-point mapping) and returns maximal runs of
/// word characters with at least two code points, in order of appearance.
pub fn tokenize_normalized(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_len = 0usize;
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() || c == '_' {
            current.push(c);
            current_len += 1;
        } else {
            if current_len >= 2 {
                tokens.push(std::mem::take(&mut current));
            } else {
                current.clear();
            }
            current_len = 0;
        }
    }
    if current_len >= 2 {
        tokens.push(current);
    }
    tokens
}

/// Sliding window of all contiguous substrings of `n` code points, in
/// order. Text shorter than `n` yields an empty sequence.
pub fn char_ngrams(text: &str, n: usize) -> Result<Vec<String>> {
    if n == 0 {
        return Err(Error::invalid_argument("n-gram length must be at least 1"));
    }
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < n {
        return Ok(Vec::new());
    }
    Ok(chars.windows(n).map(|w| w.iter().collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn words_splits_on_spaces() {
        assert_eq!(
            tokenize_words("John likes to watch movies"),
            vec!["John", "likes", "to", "watch", "movies"]
        );
    }

    #[test]
    fn words_empty_text_yields_nothing() {
        assert!(tokenize_words("").is_empty());
    }

    #[test]
    fn words_drops_empty_runs() {
        assert_eq!(tokenize_words("a  b"), vec!["a", "b"]);
        assert_eq!(tokenize_words(" a "), vec!["a"]);
    }

    #[test]
    fn words_keeps_other_whitespace_inside_tokens() {
        assert_eq!(tokenize_words("a\tb c"), vec!["a\tb", "c"]);
    }

    #[test]
    fn normalized_lowercases_and_keeps_long_runs() {
        assert_eq!(
            tokenize_normalized("John likes to watch movies"),
            vec!["john", "likes", "to", "watch", "movies"]
        );
        assert_eq!(
            tokenize_normalized("Mary also likes to watch movies"),
            vec!["mary", "also", "likes", "to", "watch", "movies"]
        );
    }

    #[test]
    fn normalized_drops_single_char_runs() {
        assert!(tokenize_normalized("I a").is_empty());
        assert_eq!(tokenize_normalized("I am"), vec!["am"]);
    }

    #[test]
    fn normalized_splits_on_punctuation() {
        assert_eq!(
            tokenize_normalized("it's un_der-score 42!"),
            vec!["it", "un_der", "score", "42"]
        );
    }

    #[test]
    fn ngrams_slide_over_code_points() {
        assert_eq!(char_ngrams("abcd", 3).unwrap(), vec!["abc", "bcd"]);
        assert_eq!(char_ngrams("aaaa", 2).unwrap(), vec!["aa", "aa", "aa"]);
        assert_eq!(
            char_ngrams("héllo", 2).unwrap(),
            vec!["hé", "él", "ll", "lo"]
        );
    }

    #[test]
    fn ngrams_short_text_yields_nothing() {
        assert!(char_ngrams("ab", 3).unwrap().is_empty());
        assert!(char_ngrams("", 1).unwrap().is_empty());
    }

    #[test]
    fn ngrams_reject_zero_length() {
        assert!(matches!(
            char_ngrams("abc", 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn tokenizer_dispatch_matches_free_functions() {
        let text = "Ab cd EF";
        assert_eq!(
            Tokenizer::Words.tokenize(text).unwrap(),
            tokenize_words(text)
        );
        assert_eq!(
            Tokenizer::NormalizedWords.tokenize(text).unwrap(),
            tokenize_normalized(text)
        );
        assert_eq!(
            Tokenizer::CharNgrams { n: 2 }.tokenize(text).unwrap(),
            char_ngrams(text, 2).unwrap()
        );
    }

    proptest! {
        #[test]
        fn ngram_count_and_lengths(text in "\\PC{0,40}", n in 1usize..6) {
            let total = text.chars().count();
            let grams = char_ngrams(&text, n).unwrap();
            prop_assert_eq!(grams.len(), (total + 1).saturating_sub(n));
            for g in &grams {
                prop_assert_eq!(g.chars().count(), n);
            }
        }

        #[test]
        fn words_roundtrip_without_repeated_spaces(words in prop::collection::vec("[^ ]{1,8}", 0..8)) {
            let text = words.join(" ");
            prop_assert_eq!(tokenize_words(&text), words);
        }
    }
}
