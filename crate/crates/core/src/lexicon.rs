//! File-backed lexicon: per-emotion definitions, synonyms and antonyms.
//!
//! Format, one record per line:
//!
//! ```text
//! emotion<TAB>def|syn|ant<TAB>text
//! ```
//!
//! `#` lines are comments. A comment of the form
//! `# merged-vocabulary-total: N` records the expected size of the union of
//! the six Primary merged vocabularies built from this lexicon.

use std::collections::HashMap;

use thiserror::Error;

use crate::text::collapse_whitespace;

const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.tsv");
const TOTAL_HEADER: &str = "merged-vocabulary-total:";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Supplies raw synonyms and antonyms for an emotion name.
///
/// `None` means the source has no entry at all for the emotion.
pub trait SynonymSource {
    fn synonyms_of(&self, emotion: &str) -> Option<Vec<String>>;
    fn antonyms_of(&self, emotion: &str) -> Option<Vec<String>>;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconEntry {
    pub emotion: String,
    pub definition: Option<String>,
    pub synonyms: Vec<String>,
    pub antonyms: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    index: HashMap<String, usize>,
    declared_total: Option<usize>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(n) = comment.trim().strip_prefix(TOTAL_HEADER) {
                    let n = n.trim().parse().map_err(|_| LexiconError::Malformed {
                        line: line_no,
                        message: format!("bad merged-vocabulary total '{}'", n.trim()),
                    })?;
                    lexicon.declared_total = Some(n);
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(LexiconError::Malformed {
                    line: line_no,
                    message: format!("expected 3 tab-separated fields, found {}", fields.len()),
                });
            }
            let (emotion, kind, value) = (fields[0].trim(), fields[1].trim(), fields[2].trim());
            if emotion.is_empty() || value.is_empty() {
                return Err(LexiconError::Malformed {
                    line: line_no,
                    message: "empty emotion or text".to_owned(),
                });
            }
            match kind {
                "def" => lexicon.set_definition(emotion, &collapse_whitespace(value)),
                "syn" => lexicon.add_synonym(emotion, value),
                "ant" => lexicon.add_antonym(emotion, value),
                other => {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        message: format!("unknown record kind '{other}'"),
                    })
                }
            }
        }
        Ok(lexicon)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON).expect("bundled lexicon is valid")
    }

    fn entry_mut(&mut self, emotion: &str) -> &mut LexiconEntry {
        let key = emotion.to_lowercase();
        let idx = match self.index.get(&key) {
            Some(&i) => i,
            None => {
                self.entries.push(LexiconEntry {
                    emotion: emotion.to_owned(),
                    ..LexiconEntry::default()
                });
                self.index.insert(key, self.entries.len() - 1);
                self.entries.len() - 1
            }
        };
        &mut self.entries[idx]
    }

    pub fn set_definition(&mut self, emotion: &str, definition: &str) {
        self.entry_mut(emotion).definition = Some(definition.to_owned());
    }

    pub fn add_synonym(&mut self, emotion: &str, term: &str) {
        self.entry_mut(emotion).synonyms.push(term.to_owned());
    }

    pub fn add_antonym(&mut self, emotion: &str, term: &str) {
        self.entry_mut(emotion).antonyms.push(term.to_owned());
    }

    pub fn entry(&self, emotion: &str) -> Option<&LexiconEntry> {
        self.index
            .get(&emotion.to_lowercase())
            .map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn definition(&self, emotion: &str) -> Option<&str> {
        self.entry(emotion).and_then(|e| e.definition.as_deref())
    }

    /// Definitions keyed by lowercase emotion name.
    pub fn definitions(&self) -> HashMap<String, String> {
        self.entries
            .iter()
            .filter_map(|e| {
                e.definition
                    .as_ref()
                    .map(|d| (e.emotion.to_lowercase(), d.clone()))
            })
            .collect()
    }

    /// The value of the `merged-vocabulary-total` header, if present.
    pub fn declared_merged_total(&self) -> Option<usize> {
        self.declared_total
    }
}

impl SynonymSource for Lexicon {
    fn synonyms_of(&self, emotion: &str) -> Option<Vec<String>> {
        self.entry(emotion).map(|e| e.synonyms.clone())
    }

    fn antonyms_of(&self, emotion: &str) -> Option<Vec<String>> {
        self.entry(emotion).map(|e| e.antonyms.clone())
    }
}
