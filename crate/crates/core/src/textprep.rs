//! Text normalization, tokenization and common-word removal.
//!
//! A token is a maximal run of Unicode letters and digits, lowercased.
//! Target texts and sample documents go through exactly the same steps.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StopwordError {
    #[error("cannot read stopword file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Embedded English function-word list used when no stopword file is given.
const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "either", "else",
    "ever", "every", "few", "for", "from", "further", "had", "has", "have", "having", "he", "her",
    "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it",
    "its", "itself", "just", "me", "might", "more", "most", "must", "my", "myself", "no", "nor",
    "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves",
    "out", "over", "own", "same", "shall", "she", "should", "so", "some", "such", "than", "that",
    "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
    "those", "through", "to", "too", "under", "until", "up", "us", "very", "was", "we", "were",
    "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would",
    "yet", "you", "your", "yours", "yourself", "yourselves",
];

/// A set of lowercase common words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StopwordList {
    words: BTreeSet<String>,
}

impl StopwordList {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Self { words }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn english() -> Self {
        Self::new(DEFAULT_STOPWORDS.iter().copied())
    }

    /// Parses the stopword file format: one word per line, `#` lines ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self, StopwordError> {
        let text = fs::read_to_string(path).map_err(|source| StopwordError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Ordered list of lowercase terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenList(pub Vec<String>);

impl TokenList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenList {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        TokenList(iter.into_iter().map(Into::into).collect())
    }
}

/// Lowercases, replaces every non letter/digit with a space, collapses runs
/// of spaces and strips the ends.
pub fn normalize_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    // Lowercase first: case mapping can emit combining marks, which must be
    // treated as separators like any other non-alphanumeric.
    for c in raw.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Splits normalized text on single spaces.
pub fn tokenize(normalized: &str) -> TokenList {
    normalized
        .split(' ')
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn remove_stopwords(tokens: TokenList, stops: &StopwordList) -> TokenList {
    TokenList(tokens.0.into_iter().filter(|t| !stops.contains(t)).collect())
}

/// normalize → tokenize → remove_stopwords.
pub fn preprocess(raw: &str, stops: &StopwordList) -> TokenList {
    remove_stopwords(tokenize(&normalize_text(raw)), stops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(words: &[&str]) -> TokenList {
        words.iter().copied().collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("I am HONEST!!"), "i am honest");
        assert_eq!(normalize_text("rock-n-roll  fan"), "rock n roll fan");
        assert_eq!(normalize_text("  ...  "), "");
        assert_eq!(normalize_text("Ünïcödé 42x"), "ünïcödé 42x");
    }

    #[test]
    fn tokenize_examples() {
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("i am honest"), toks(&["i", "am", "honest"]));
        assert_eq!(tokenize("a a b"), toks(&["a", "a", "b"]));
    }

    #[test]
    fn stopword_examples() {
        let stops = StopwordList::new(["i", "am"]);
        assert_eq!(
            remove_stopwords(toks(&["i", "am", "honest"]), &stops),
            toks(&["honest"])
        );
        assert!(remove_stopwords(TokenList::default(), &stops).is_empty());
        assert_eq!(
            remove_stopwords(toks(&["honest", "honest"]), &StopwordList::empty()),
            toks(&["honest", "honest"])
        );
        let english = StopwordList::english();
        assert_eq!(
            remove_stopwords(toks(&["i", "am", "honest"]), &english),
            toks(&["honest"])
        );
    }

    #[test]
    fn default_list_is_pinned() {
        let english = StopwordList::english();
        assert_eq!(english.len(), DEFAULT_STOPWORDS.len());
        assert!(english.iter().all(|w| w == normalize_text(w)));
    }

    #[test]
    fn stopword_file_format() {
        let list = StopwordList::parse("# common words\nThe\n\n  and \n#skip\nthe\n");
        assert_eq!(list.iter().collect::<Vec<_>>(), vec!["and", "the"]);
    }

    #[test]
    fn missing_stopword_file() {
        let err = StopwordList::from_file(Path::new("/nonexistent/stops.txt")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/stops.txt"));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,40}") {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once);
        }

        #[test]
        fn tokens_obey_grammar(s in "\\PC{0,40}") {
            for t in tokenize(&normalize_text(&s)).iter() {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().all(char::is_alphanumeric));
            }
        }

        #[test]
        fn stopword_removal_is_subsequence(
            words in prop::collection::vec("[a-e]{1,2}", 0..20),
            stops in prop::collection::vec("[a-e]{1,2}", 0..6),
        ) {
            let stops = StopwordList::new(&stops);
            let input: TokenList = words.iter().map(String::as_str).collect();
            let out = remove_stopwords(input.clone(), &stops);
            prop_assert!(out.iter().all(|t| !stops.contains(t)));
            let mut it = input.iter();
            for t in out.iter() {
                prop_assert!(it.any(|u| u == t));
            }
        }
    }
}
