//! Text normalization shared by the vocabulary builder and the matchers.

/// Lowercases a lexicon term and collapses internal whitespace to single
/// spaces. Punctuation inside the term (hyphens, apostrophes) is kept.
pub fn normalize_term(term: &str) -> String {
    term.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Lowercases free text and replaces every punctuation character with a
/// space, so that only alphanumeric words separated by single spaces remain.
pub fn normalize_text(text: &str) -> String {
    let stripped: String = text
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c.is_whitespace() {
                c
            } else {
                ' '
            }
        })
        .collect();
    normalize_term(&stripped)
}

/// Splits normalized text into its words.
pub fn words(text: &str) -> Vec<String> {
    normalize_text(text)
        .split(' ')
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Collapses whitespace runs without changing case. Used for definitions
/// and other literal text.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
