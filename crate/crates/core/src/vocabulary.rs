//! Pseudo-vocabulary construction, overlap resolution and the refined,
//! mutually exclusive vocabulary.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::warn;
use thiserror::Error;

use crate::hierarchy::{EmotionHierarchy, HierarchyError};
use crate::lexicon::SynonymSource;
use crate::similarity::{EmbeddingProvider, SimilarityError};
use crate::text::{collapse_whitespace, normalize_term};

const BUNDLED_DECISIONS: &str = include_str!("../data/decisions.tsv");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VocabularyError {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("no decision for overlapping terms: {}", .0.join(", "))]
    Incomplete(Vec<String>),
    #[error("decision for '{0}', which is not an overlapping term")]
    Stale(String),
    #[error("more than one decision for '{0}'")]
    Duplicate(String),
    #[error("'{term}' cannot be assigned to '{emotion}': {reason}")]
    InvalidAssignment {
        term: String,
        emotion: String,
        reason: String,
    },
    #[error("verifiers disagree on: {}", .0.join(", "))]
    Unresolved(Vec<String>),
    #[error("verifier {verifier} gave no decision for '{term}'")]
    MissingVote { verifier: usize, term: String },
    #[error("no score for term '{term}' and candidate '{candidate}': {source}")]
    Score {
        term: String,
        candidate: String,
        source: SimilarityError,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Raw per-emotion term lists; a term may appear under several emotions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoVocabulary {
    entries: Vec<(String, Vec<String>)>,
    missing: Vec<String>,
}

impl PseudoVocabulary {
    /// Builds a pseudo-vocabulary directly from (emotion, terms) pairs in
    /// document order. Terms are normalized and deduplicated per emotion.
    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<String>)>,
        S: Into<String>,
    {
        let entries = entries
            .into_iter()
            .map(|(e, terms)| (e.into(), dedup_terms(&terms)))
            .collect();
        PseudoVocabulary {
            entries,
            missing: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[(String, Vec<String>)] {
        &self.entries
    }

    pub fn terms(&self, emotion: &str) -> Option<&[String]> {
        self.entries
            .iter()
            .find(|(e, _)| e.eq_ignore_ascii_case(emotion))
            .map(|(_, t)| t.as_slice())
    }

    /// Emotions the synonym source had no entry for.
    pub fn missing(&self) -> &[String] {
        &self.missing
    }
}

fn dedup_terms(terms: &[String]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    terms
        .iter()
        .map(|t| normalize_term(t))
        .filter(|t| !t.is_empty() && seen.insert(t.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapRecord {
    pub term: String,
    /// Candidate emotions in document order.
    pub candidates: Vec<String>,
    /// Scores aligned with `candidates`; empty until scored.
    pub scores: Vec<f64>,
    pub suggested: Option<String>,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationDecision {
    pub term: String,
    pub assigned_to: String,
    pub decider: String,
}

impl AnnotationDecision {
    pub fn new(term: &str, assigned_to: &str, decider: &str) -> Self {
        AnnotationDecision {
            term: normalize_term(term),
            assigned_to: assigned_to.trim().to_owned(),
            decider: decider.to_owned(),
        }
    }
}

/// Mutually exclusive term sets per emotion, plus definitions.
///
/// Entries and definitions are keyed by lowercase emotion name; the
/// canonical spelling and document order are kept separately.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefinedVocabulary {
    order: Vec<String>,
    entries: HashMap<String, BTreeSet<String>>,
    definitions: HashMap<String, String>,
}

impl RefinedVocabulary {
    /// An empty vocabulary with one (empty) entry per emotion.
    pub fn empty_for(h: &EmotionHierarchy) -> Self {
        let mut rv = RefinedVocabulary::default();
        for n in h.nodes() {
            rv.add_emotion(&n.name);
        }
        rv
    }

    pub fn add_emotion(&mut self, emotion: &str) {
        let key = emotion.to_lowercase();
        if !self.entries.contains_key(&key) {
            self.order.push(emotion.to_owned());
            self.entries.insert(key, BTreeSet::new());
        }
    }

    /// Adds a term without any exclusivity check.
    pub fn insert_term(&mut self, emotion: &str, term: &str) {
        self.add_emotion(emotion);
        self.entries
            .get_mut(&emotion.to_lowercase())
            .expect("entry just added")
            .insert(normalize_term(term));
    }

    pub fn set_definition(&mut self, emotion: &str, definition: &str) {
        self.add_emotion(emotion);
        self.definitions
            .insert(emotion.to_lowercase(), collapse_whitespace(definition));
    }

    /// Emotion names in insertion (document) order.
    pub fn emotions(&self) -> &[String] {
        &self.order
    }

    pub fn terms(&self, emotion: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(&emotion.to_lowercase())
    }

    pub fn definition(&self, emotion: &str) -> Option<&str> {
        self.definitions
            .get(&emotion.to_lowercase())
            .map(String::as_str)
    }

    pub fn total_terms(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    /// Maps every term to the emotions holding it, in document order.
    pub fn term_index(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut index: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in &self.order {
            for t in &self.entries[&e.to_lowercase()] {
                index.entry(t.as_str()).or_default().push(e.as_str());
            }
        }
        index
    }

    /// Terms held by more than one emotion, with their holders.
    pub fn exclusivity_violations(&self) -> Vec<(String, Vec<String>)> {
        self.term_index()
            .into_iter()
            .filter(|(_, es)| es.len() > 1)
            .map(|(t, es)| (t.to_owned(), es.into_iter().map(str::to_owned).collect()))
            .collect()
    }

    /// Terms equal to the name of the emotion that holds them.
    pub fn self_named_terms(&self) -> Vec<String> {
        self.order
            .iter()
            .filter(|e| self.entries[&e.to_lowercase()].contains(&e.to_lowercase()))
            .cloned()
            .collect()
    }

    /// The vocabulary viewed as a pseudo-vocabulary, for fixpoint checks.
    pub fn to_pseudo(&self) -> PseudoVocabulary {
        PseudoVocabulary::from_entries(self.order.iter().map(|e| {
            let terms: Vec<String> = self.entries[&e.to_lowercase()].iter().cloned().collect();
            (e.clone(), terms)
        }))
    }
}

/// Collects each emotion's synonyms from `src`, in hierarchy order.
pub fn build_pseudo_vocabulary(h: &EmotionHierarchy, src: &dyn SynonymSource) -> PseudoVocabulary {
    let mut entries = Vec::with_capacity(h.len());
    let mut missing = Vec::new();
    for node in h.nodes() {
        let terms = match src.synonyms_of(&node.name) {
            Some(t) => t,
            None => {
                warn!("no synonyms for {}", node.name);
                missing.push(node.name.clone());
                Vec::new()
            }
        };
        entries.push((node.name.clone(), dedup_terms(&terms)));
    }
    PseudoVocabulary { entries, missing }
}

/// One record per term held by two or more emotions. A term that equals an
/// emotion's name counts as held by that emotion as well. Records are sorted
/// by term; candidates keep the pseudo-vocabulary's emotion order.
pub fn find_overlaps(pv: &PseudoVocabulary) -> Vec<OverlapRecord> {
    let names: HashMap<String, usize> = pv
        .entries
        .iter()
        .enumerate()
        .map(|(i, (e, _))| (e.to_lowercase(), i))
        .collect();
    let mut holders: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (i, (e, terms)) in pv.entries.iter().enumerate() {
        let own = e.to_lowercase();
        for t in terms {
            if *t == own {
                continue;
            }
            let set = holders.entry(t.as_str()).or_default();
            set.insert(i);
            if let Some(&n) = names.get(t) {
                set.insert(n);
            }
        }
    }
    holders
        .into_iter()
        .filter(|(_, set)| set.len() >= 2)
        .map(|(t, set)| OverlapRecord {
            term: t.to_owned(),
            candidates: set.into_iter().map(|i| pv.entries[i].0.clone()).collect(),
            scores: Vec::new(),
            suggested: None,
            tie: false,
        })
        .collect()
}

/// Scores every (term, candidate) pair and suggests the argmax. Ties go to
/// the earliest candidate and set the record's `tie` flag.
pub fn score_overlaps(
    records: &[OverlapRecord],
    provider: &dyn EmbeddingProvider,
) -> Result<Vec<OverlapRecord>, VocabularyError> {
    records
        .iter()
        .map(|r| {
            let mut scored = r.clone();
            scored.scores = r
                .candidates
                .iter()
                .map(|c| {
                    provider
                        .pair_score(&r.term, c)
                        .map_err(|source| VocabularyError::Score {
                            term: r.term.clone(),
                            candidate: c.clone(),
                            source,
                        })
                })
                .collect::<Result<_, _>>()?;
            let mut best = 0;
            let mut tie = false;
            for (i, &s) in scored.scores.iter().enumerate().skip(1) {
                if s > scored.scores[best] {
                    best = i;
                    tie = false;
                } else if s == scored.scores[best] {
                    tie = true;
                }
            }
            scored.suggested = r.candidates.get(best).cloned();
            scored.tie = tie;
            Ok(scored)
        })
        .collect()
}

/// Turns suggestions into decisions for terms without an explicit one. A
/// term naming one of its candidates always goes to that candidate.
pub fn auto_decisions(
    records: &[OverlapRecord],
    explicit: &[AnnotationDecision],
) -> Vec<AnnotationDecision> {
    let decided: BTreeSet<&str> = explicit.iter().map(|d| d.term.as_str()).collect();
    let mut out = explicit.to_vec();
    for r in records {
        if decided.contains(r.term.as_str()) {
            continue;
        }
        let named = r.candidates.iter().find(|c| c.to_lowercase() == r.term);
        if let Some(target) = named.or(r.suggested.as_ref()) {
            out.push(AnnotationDecision::new(&r.term, target, "auto"));
        }
    }
    out
}

/// Per term, the emotion chosen by at least two of the three verifiers.
pub fn majority_vote(
    per_verifier: [&[AnnotationDecision]; 3],
) -> Result<Vec<AnnotationDecision>, VocabularyError> {
    let votes: Vec<HashMap<&str, &AnnotationDecision>> = per_verifier
        .iter()
        .map(|ds| ds.iter().map(|d| (d.term.as_str(), d)).collect())
        .collect();
    let terms: BTreeSet<&str> = votes.iter().flat_map(|v| v.keys().copied()).collect();
    let mut out = Vec::new();
    let mut unresolved = Vec::new();
    for term in terms {
        let mut ballot = Vec::with_capacity(3);
        for (i, v) in votes.iter().enumerate() {
            match v.get(term) {
                Some(d) => ballot.push(*d),
                None => {
                    return Err(VocabularyError::MissingVote {
                        verifier: i + 1,
                        term: term.to_owned(),
                    })
                }
            }
        }
        let winner = (0..3).find(|&i| {
            ballot
                .iter()
                .filter(|d| d.assigned_to.eq_ignore_ascii_case(&ballot[i].assigned_to))
                .count()
                >= 2
        });
        match winner {
            Some(i) => {
                let deciders: Vec<&str> = ballot
                    .iter()
                    .filter(|d| d.assigned_to.eq_ignore_ascii_case(&ballot[i].assigned_to))
                    .map(|d| d.decider.as_str())
                    .collect();
                out.push(AnnotationDecision::new(
                    term,
                    &ballot[i].assigned_to,
                    &deciders.join("+"),
                ));
            }
            None => unresolved.push(term.to_owned()),
        }
    }
    if unresolved.is_empty() {
        Ok(out)
    } else {
        Err(VocabularyError::Unresolved(unresolved))
    }
}

/// Applies overlap decisions and returns the refined vocabulary.
///
/// Every overlapping term needs exactly one decision naming one of its
/// candidates. A term that is itself an emotion name must be assigned to
/// that emotion; it is then dropped, since the name already stands for it.
/// `defs` is keyed by lowercase emotion name.
pub fn apply_decisions(
    pv: &PseudoVocabulary,
    decisions: &[AnnotationDecision],
    defs: &HashMap<String, String>,
) -> Result<RefinedVocabulary, VocabularyError> {
    let overlaps = find_overlaps(pv);
    let by_term: HashMap<&str, &OverlapRecord> =
        overlaps.iter().map(|r| (r.term.as_str(), r)).collect();
    let names: BTreeSet<String> = pv.entries.iter().map(|(e, _)| e.to_lowercase()).collect();

    let mut assigned: HashMap<String, String> = HashMap::new();
    for d in decisions {
        let term = normalize_term(&d.term);
        let record = by_term
            .get(term.as_str())
            .ok_or_else(|| VocabularyError::Stale(term.clone()))?;
        let target = record
            .candidates
            .iter()
            .find(|c| c.eq_ignore_ascii_case(&d.assigned_to))
            .ok_or_else(|| VocabularyError::InvalidAssignment {
                term: term.clone(),
                emotion: d.assigned_to.clone(),
                reason: "not one of its candidate emotions".to_owned(),
            })?;
        if names.contains(&term) && target.to_lowercase() != term {
            return Err(VocabularyError::InvalidAssignment {
                term: term.clone(),
                emotion: d.assigned_to.clone(),
                reason: "the term names another emotion".to_owned(),
            });
        }
        if assigned.insert(term.clone(), target.to_lowercase()).is_some() {
            return Err(VocabularyError::Duplicate(term));
        }
    }
    let uncovered: Vec<String> = overlaps
        .iter()
        .filter(|r| !assigned.contains_key(&r.term))
        .map(|r| r.term.clone())
        .collect();
    if !uncovered.is_empty() {
        return Err(VocabularyError::Incomplete(uncovered));
    }

    let mut rv = RefinedVocabulary::default();
    for (emotion, terms) in &pv.entries {
        rv.add_emotion(emotion);
        let own = emotion.to_lowercase();
        for t in terms {
            if *t == own {
                continue;
            }
            match assigned.get(t) {
                Some(owner) if *owner != own || names.contains(t) => continue,
                _ => rv.insert_term(emotion, t),
            }
        }
        if let Some(def) = defs.get(&own) {
            rv.set_definition(emotion, def);
        }
    }
    Ok(rv)
}

/// An emotion's refined vocabulary united with those of all its descendants,
/// plus the lowercase names of the emotion and its descendants.
pub fn merged_vocabulary(
    h: &EmotionHierarchy,
    rv: &RefinedVocabulary,
    emotion: &str,
) -> Result<BTreeSet<String>, HierarchyError> {
    let idx = h.index_of(emotion)?;
    let mut out = BTreeSet::new();
    for i in std::iter::once(idx).chain(h.descendant_indices(idx)) {
        let name = &h.node_at(i).name;
        out.insert(name.to_lowercase());
        if let Some(terms) = rv.terms(name) {
            out.extend(terms.iter().cloned());
        }
    }
    Ok(out)
}

/// Parses a decision file: `term<TAB>emotion<TAB>decider` lines.
pub fn parse_decisions(text: &str) -> Result<Vec<AnnotationDecision>, VocabularyError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 || fields.iter().any(|f| f.trim().is_empty()) {
            return Err(VocabularyError::Malformed {
                line: i + 1,
                message: "expected term<TAB>emotion<TAB>decider".to_owned(),
            });
        }
        out.push(AnnotationDecision::new(fields[0], fields[1], fields[2].trim()));
    }
    Ok(out)
}

/// The decisions bundled for the bundled lexicon.
pub fn bundled_decisions() -> Vec<AnnotationDecision> {
    parse_decisions(BUNDLED_DECISIONS).expect("bundled decision file is valid")
}

/// Overlap worksheet for annotators: CSV `term,candidates,scores,suggested`.
/// Candidates and scores are `;`-separated.
pub fn write_worksheet<W: std::io::Write>(
    records: &[OverlapRecord],
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "candidates", "scores", "suggested"])?;
    for r in records {
        let scores: Vec<String> = r.scores.iter().map(|s| format!("{s:.3}")).collect();
        w.write_record([
            r.term.as_str(),
            &r.candidates.join(";"),
            &scores.join(";"),
            r.suggested.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}
