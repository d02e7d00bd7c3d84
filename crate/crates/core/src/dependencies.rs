//! The three dependency relations: isOppositeOf (from antonyms),
//! isComposedOf (from the tree) and plus-LeadsTo (from classifying combined
//! statements).

use std::collections::{HashMap, HashSet};

use log::{debug, warn};
use thiserror::Error;

use crate::applications::Matcher;
use crate::hierarchy::{EmotionHierarchy, HierarchyError, Tier};
use crate::lexicon::SynonymSource;
use crate::text::normalize_term;
use crate::vocabulary::RefinedVocabulary;

const BUNDLED_ADJECTIVES: &str = include_str!("../data/adjectives.tsv");
const BUNDLED_CLASSIFIER: &str = include_str!("../data/classifier.tsv");

/// Joins the base and addend statements before classification.
pub const STATEMENT_SEPARATOR: &str = ". ";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DependencyError {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("no statement for emotion '{0}'")]
    MissingStatement(String),
    #[error("classifier failed on \"{text}\": {message}")]
    Classifier { text: String, message: String },
    #[error("classifier returned non-primary emotion '{result}' for \"{text}\"")]
    NotPrimary { text: String, result: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OppositeEdge {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositionEdge {
    pub parent: String,
    pub child: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlusLeadsToTriple {
    pub base: String,
    pub addend: String,
    pub result: String,
}

impl PlusLeadsToTriple {
    pub fn new(base: &str, addend: &str, result: &str) -> Self {
        PlusLeadsToTriple {
            base: base.to_owned(),
            addend: addend.to_owned(),
            result: result.to_owned(),
        }
    }
}

/// Opposite edges plus the antonyms that could not be resolved.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OppositeBuild {
    pub edges: Vec<OppositeEdge>,
    /// (emotion, antonym) pairs that matched no other emotion.
    pub unresolved: Vec<(String, String)>,
}

/// Resolves every antonym to an emotion: by name first, then by the owner
/// of the term in the refined vocabulary. Self-loops and unresolved
/// antonyms are dropped. Edges are directed and deduplicated.
pub fn build_opposites(
    h: &EmotionHierarchy,
    rv: &RefinedVocabulary,
    src: &dyn SynonymSource,
) -> OppositeBuild {
    let owners: HashMap<String, String> = rv
        .term_index()
        .into_iter()
        .filter_map(|(t, es)| h.canonical_name(es[0]).ok().map(|e| (t.to_owned(), e.to_owned())))
        .collect();
    let mut out = OppositeBuild::default();
    let mut seen = HashSet::new();
    for node in h.nodes() {
        let i = &node.name;
        for antonym in src.antonyms_of(i).unwrap_or_default() {
            let j = normalize_term(&antonym);
            let resolved = match h.get(&j) {
                Some(n) if !n.name.eq_ignore_ascii_case(i) => Some(n.name.clone()),
                Some(_) => None,
                None => owners.get(&j).filter(|e| *e != i).cloned(),
            };
            match resolved {
                Some(to) => {
                    let edge = OppositeEdge {
                        from: i.clone(),
                        to,
                    };
                    if seen.insert(edge.clone()) {
                        out.edges.push(edge);
                    }
                }
                None => {
                    debug!("antonym '{antonym}' of {i} not resolved");
                    out.unresolved.push((i.clone(), antonym));
                }
            }
        }
    }
    out
}

/// One edge per (parent, direct child) pair, in pre-order. Tertiary
/// emotions have no children and contribute nothing.
pub fn build_compositions(h: &EmotionHierarchy) -> Vec<CompositionEdge> {
    let mut out = Vec::new();
    let mut stack: Vec<usize> = (0..h.len())
        .rev()
        .filter(|&i| h.parent_index(i).is_none())
        .collect();
    let mut seen = vec![false; h.len()];
    while let Some(n) = stack.pop() {
        if std::mem::replace(&mut seen[n], true) {
            continue;
        }
        for &c in h.child_indices(n) {
            if h.node_at(n).tier != Tier::Tertiary {
                out.push(CompositionEdge {
                    parent: h.node_at(n).name.clone(),
                    child: h.node_at(c).name.clone(),
                });
            }
        }
        stack.extend(h.child_indices(n).iter().rev());
    }
    out
}

/// First-person statement per emotion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatementTemplates {
    statements: HashMap<String, String>,
}

impl StatementTemplates {
    pub fn get(&self, emotion: &str) -> Option<&str> {
        self.statements
            .get(&emotion.to_lowercase())
            .map(String::as_str)
    }

    pub fn insert(&mut self, emotion: &str, statement: &str) {
        self.statements
            .insert(emotion.to_lowercase(), statement.to_owned());
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}

/// Parses an adjective table: `emotion<TAB>adjective` lines.
pub fn parse_adjectives(text: &str) -> Result<HashMap<String, String>, DependencyError> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split('\t').collect::<Vec<_>>()[..] {
            [e, a] if !e.trim().is_empty() && !a.trim().is_empty() => {
                out.insert(e.trim().to_lowercase(), a.trim().to_owned());
            }
            _ => {
                return Err(DependencyError::Malformed {
                    line: i + 1,
                    message: "expected emotion<TAB>adjective".to_owned(),
                })
            }
        }
    }
    Ok(out)
}

/// "I am very <adjective>" when the table has an adjective for the emotion,
/// otherwise "I feel <emotion>".
pub fn statements_from_adjectives(
    h: &EmotionHierarchy,
    adjectives: &HashMap<String, String>,
) -> StatementTemplates {
    let mut st = StatementTemplates::default();
    for n in h.nodes() {
        let s = match adjectives.get(&n.name.to_lowercase()) {
            Some(adj) => format!("I am very {adj}"),
            None => format!("I feel {}", n.name.to_lowercase()),
        };
        st.insert(&n.name, &s);
    }
    st
}

/// Statements built from the bundled adjective table.
pub fn default_statements(h: &EmotionHierarchy) -> StatementTemplates {
    let adjectives = parse_adjectives(BUNDLED_ADJECTIVES).expect("bundled adjective table is valid");
    statements_from_adjectives(h, &adjectives)
}

/// Maps a text to a Primary emotion name.
pub trait EmotionClassifier {
    fn classify(&self, text: &str) -> Result<String, String>;
}

/// Stored classifier outputs keyed by exact input text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecordedClassifier {
    results: HashMap<String, String>,
}

impl RecordedClassifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, text: &str, emotion: &str) {
        self.results.insert(text.to_owned(), emotion.to_owned());
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.results.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Parses `text<TAB>primary-emotion` lines.
    pub fn parse(data: &str) -> Result<Self, DependencyError> {
        let mut clf = RecordedClassifier::new();
        for (i, line) in data.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split('\t').collect::<Vec<_>>()[..] {
                [t, e] if !t.is_empty() && !e.trim().is_empty() => clf.insert(t, e.trim()),
                _ => {
                    return Err(DependencyError::Malformed {
                        line: i + 1,
                        message: "expected text<TAB>primary-emotion".to_owned(),
                    })
                }
            }
        }
        Ok(clf)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_CLASSIFIER).expect("bundled classifier table is valid")
    }
}

impl EmotionClassifier for RecordedClassifier {
    fn classify(&self, text: &str) -> Result<String, String> {
        self.results
            .get(text)
            .cloned()
            .ok_or_else(|| "no recorded result".to_owned())
    }
}

/// Classifies by Primary-tier lexicon detection.
#[derive(Debug, Clone)]
pub struct LexiconClassifier {
    matcher: Matcher,
}

impl LexiconClassifier {
    pub fn new(h: &EmotionHierarchy, rv: &RefinedVocabulary) -> Self {
        LexiconClassifier {
            matcher: Matcher::at_tier(h, rv, Tier::Primary),
        }
    }
}

impl EmotionClassifier for LexiconClassifier {
    fn classify(&self, text: &str) -> Result<String, String> {
        self.matcher
            .detect(text)
            .label
            .ok_or_else(|| "no emotion term found".to_owned())
    }
}

/// Tries `first`, and `second` when `first` fails.
pub struct FallbackClassifier<A, B> {
    pub first: A,
    pub second: B,
}

impl<A: EmotionClassifier, B: EmotionClassifier> EmotionClassifier for FallbackClassifier<A, B> {
    fn classify(&self, text: &str) -> Result<String, String> {
        self.first.classify(text).or_else(|_| self.second.classify(text))
    }
}

/// For each Primary emotion `i` and each non-Primary emotion `j`, classifies
/// `Stmt(i) + ". " + Stmt(j)` and records `(i, j, result)` when the result
/// differs from `i`.
pub fn build_plus_leads_to(
    h: &EmotionHierarchy,
    stmt: &StatementTemplates,
    clf: &dyn EmotionClassifier,
) -> Result<Vec<PlusLeadsToTriple>, DependencyError> {
    let primaries: Vec<&str> = h.primaries();
    let statement = |name: &str| {
        stmt.get(name)
            .ok_or_else(|| DependencyError::MissingStatement(name.to_owned()))
    };
    let mut out = Vec::new();
    for &i in &primaries {
        let si = statement(i)?;
        for j in h.nodes().iter().filter(|n| n.tier != Tier::Primary) {
            let text = format!("{si}{STATEMENT_SEPARATOR}{}", statement(&j.name)?);
            let raw = clf.classify(&text).map_err(|message| DependencyError::Classifier {
                text: text.clone(),
                message,
            })?;
            let result = primaries
                .iter()
                .find(|p| p.eq_ignore_ascii_case(raw.trim()))
                .ok_or_else(|| DependencyError::NotPrimary {
                    text: text.clone(),
                    result: raw.clone(),
                })?;
            if *result != i {
                out.push(PlusLeadsToTriple::new(i, &j.name, result));
            }
        }
    }
    Ok(out)
}

/// Parses a triple-suppression file: `base<TAB>addend<TAB>result` lines.
pub fn parse_suppressions(text: &str) -> Result<Vec<PlusLeadsToTriple>, DependencyError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split('\t').map(str::trim).collect::<Vec<_>>()[..] {
            [b, a, r] if !b.is_empty() && !a.is_empty() && !r.is_empty() => {
                out.push(PlusLeadsToTriple::new(b, a, r))
            }
            _ => {
                return Err(DependencyError::Malformed {
                    line: i + 1,
                    message: "expected base<TAB>addend<TAB>result".to_owned(),
                })
            }
        }
    }
    Ok(out)
}

/// Removes rejected triples (names compared case-insensitively).
pub fn apply_suppressions(
    triples: Vec<PlusLeadsToTriple>,
    rejected: &[PlusLeadsToTriple],
) -> Vec<PlusLeadsToTriple> {
    let key = |t: &PlusLeadsToTriple| {
        (
            t.base.to_lowercase(),
            t.addend.to_lowercase(),
            t.result.to_lowercase(),
        )
    };
    let rejected: HashSet<_> = rejected.iter().map(key).collect();
    let before = triples.len();
    let kept: Vec<_> = triples
        .into_iter()
        .filter(|t| !rejected.contains(&key(t)))
        .collect();
    if before - kept.len() != rejected.len() {
        warn!(
            "{} suppression rows matched no triple",
            rejected.len() - (before - kept.len())
        );
    }
    kept
}
