//! Lexicon-based emotion detection, TONE / P-TONE featurization and
//! empathetic-response guidance.

use std::collections::HashMap;

use thiserror::Error;

use crate::hierarchy::{EmotionHierarchy, HierarchyError, Tier, PRIMARY_EMOTIONS};
use crate::ontology::Ontology;
use crate::query::query_opposites;
use crate::text::{normalize_text, words};
use crate::vocabulary::RefinedVocabulary;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApplicationError {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("'{0}' is not a negative primary emotion")]
    NotNegativePrimary(String),
    #[error("'{0}' has no positive opposite")]
    NoPositiveOpposite(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermMatch {
    pub term: String,
    pub emotion: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionResult {
    pub sentence: String,
    pub matched_terms: Vec<TermMatch>,
    pub label: Option<String>,
}

/// Greedy longest-phrase matcher from vocabulary phrases to labels.
///
/// Each emotion contributes its own terms: its refined vocabulary plus its
/// lowercase name. Phrases are compared after the same normalization as the
/// input text, so "horror-struck" matches "horror struck".
#[derive(Debug, Clone)]
pub struct Matcher {
    phrases: HashMap<String, usize>,
    labels: Vec<String>,
    max_len: usize,
}

impl Matcher {
    fn build(
        h: &EmotionHierarchy,
        rv: &RefinedVocabulary,
        labels: Vec<String>,
        label_of: impl Fn(usize) -> Option<usize>,
    ) -> Self {
        let mut phrases = HashMap::new();
        let mut max_len = 0;
        for (i, node) in h.nodes().iter().enumerate() {
            let Some(label) = label_of(i) else { continue };
            let own = rv.terms(&node.name).into_iter().flatten();
            for term in std::iter::once(&node.name.to_lowercase()).chain(own) {
                let phrase = normalize_text(term);
                if phrase.is_empty() {
                    continue;
                }
                max_len = max_len.max(phrase.split(' ').count());
                phrases.entry(phrase).or_insert(label);
            }
        }
        Matcher {
            phrases,
            labels,
            max_len,
        }
    }

    /// One label per emotion.
    pub fn own(h: &EmotionHierarchy, rv: &RefinedVocabulary) -> Self {
        let labels = h.names().map(str::to_owned).collect();
        Self::build(h, rv, labels, Some)
    }

    /// One label per emotion at `tier`; deeper emotions count towards their
    /// ancestor at that tier and shallower ones are ignored.
    pub fn at_tier(h: &EmotionHierarchy, rv: &RefinedVocabulary, tier: Tier) -> Self {
        let at: Vec<usize> = (0..h.len()).filter(|&i| h.node_at(i).tier == tier).collect();
        let labels = at.iter().map(|&i| h.node_at(i).name.clone()).collect();
        let pos: HashMap<usize, usize> = at.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        Self::build(h, rv, labels, |i| {
            h.ancestor_at_tier(i, tier).and_then(|a| pos.get(&a).copied())
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Matched phrases with their label index, left to right.
    pub fn matches(&self, text: &str) -> Vec<(String, usize)> {
        let ws = words(text);
        let mut out = Vec::new();
        let mut p = 0;
        while p < ws.len() {
            let longest = self.max_len.min(ws.len() - p);
            let hit = (1..=longest).rev().find_map(|len| {
                let phrase = ws[p..p + len].join(" ");
                self.phrases.get(&phrase).map(|&l| (phrase, l, len))
            });
            match hit {
                Some((phrase, label, len)) => {
                    out.push((phrase, label));
                    p += len;
                }
                None => p += 1,
            }
        }
        out
    }

    /// Match counts per label.
    pub fn counts(&self, text: &str) -> Vec<u32> {
        let mut counts = vec![0; self.labels.len()];
        for (_, l) in self.matches(text) {
            counts[l] += 1;
        }
        counts
    }

    /// Label with the most matches, earliest label on ties.
    pub fn detect(&self, sentence: &str) -> DetectionResult {
        let matches = self.matches(sentence);
        let mut counts = vec![0u32; self.labels.len()];
        for (_, l) in &matches {
            counts[*l] += 1;
        }
        let mut best: Option<usize> = None;
        for (l, &c) in counts.iter().enumerate() {
            if c > 0 && best.is_none_or(|b| c > counts[b]) {
                best = Some(l);
            }
        }
        DetectionResult {
            sentence: sentence.to_owned(),
            matched_terms: matches
                .into_iter()
                .map(|(term, l)| TermMatch {
                    term,
                    emotion: self.labels[l].clone(),
                })
                .collect(),
            label: best.map(|b| self.labels[b].clone()),
        }
    }
}

/// Detects the dominant emotion of a sentence at the given tier.
pub fn detect_emotion(o: &Ontology, sentence: &str, tier: Tier) -> DetectionResult {
    Matcher::at_tier(&o.hierarchy, &o.vocabulary, tier).detect(sentence)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// One count per emotion (144 for the canonical hierarchy).
    Tone,
    /// One count per Primary emotion.
    PTone,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub mode: FeatureMode,
    pub counts: Vec<u32>,
}

/// Reusable featurizer for one ontology and mode.
#[derive(Debug, Clone)]
pub struct Featurizer {
    mode: FeatureMode,
    matcher: Matcher,
}

impl Featurizer {
    pub fn new(o: &Ontology, mode: FeatureMode) -> Self {
        let matcher = match mode {
            FeatureMode::Tone => Matcher::own(&o.hierarchy, &o.vocabulary),
            FeatureMode::PTone => Matcher::at_tier(&o.hierarchy, &o.vocabulary, Tier::Primary),
        };
        Featurizer { mode, matcher }
    }

    /// Column names in index order.
    pub fn header(&self) -> &[String] {
        self.matcher.labels()
    }

    pub fn featurize(&self, text: &str) -> FeatureVector {
        FeatureVector {
            mode: self.mode,
            counts: self.matcher.counts(text),
        }
    }
}

pub fn featurize(o: &Ontology, text: &str, mode: FeatureMode) -> FeatureVector {
    Featurizer::new(o, mode).featurize(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Polarity of a Primary emotion: Joy and Love are positive, Anger, Fear
/// and Sadness negative, Surprise neutral. `None` for other names.
pub fn polarity(primary: &str) -> Option<Polarity> {
    let p = PRIMARY_EMOTIONS
        .iter()
        .find(|p| p.eq_ignore_ascii_case(primary.trim()))?;
    Some(match *p {
        "Joy" | "Love" => Polarity::Positive,
        "Surprise" => Polarity::Neutral,
        _ => Polarity::Negative,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidanceResult {
    pub source: String,
    pub target: String,
    pub addends: Vec<String>,
}

/// For a detected negative Primary emotion: the first opposite under a
/// positive root, and every addend whose plus-LeadsTo result is positive.
pub fn empathetic_guidance(o: &Ontology, detected: &str) -> Result<GuidanceResult, ApplicationError> {
    let h = &o.hierarchy;
    let source = h
        .get(detected)
        .filter(|n| n.tier == Tier::Primary && polarity(&n.name) == Some(Polarity::Negative))
        .map(|n| n.name.clone())
        .ok_or_else(|| ApplicationError::NotNegativePrimary(detected.to_owned()))?;
    let positive = |name: &str| {
        h.root_of(name)
            .map(|r| polarity(r) == Some(Polarity::Positive))
            .unwrap_or(false)
    };
    let opposites = query_opposites(o, &source)
        .map_err(|_| ApplicationError::NotNegativePrimary(detected.to_owned()))?;
    let target = opposites
        .emotions
        .into_iter()
        .find(|e| positive(e))
        .ok_or_else(|| ApplicationError::NoPositiveOpposite(source.clone()))?;
    let mut addends: Vec<String> = Vec::new();
    for t in &o.triples {
        if t.base.eq_ignore_ascii_case(&source)
            && polarity(&t.result) == Some(Polarity::Positive)
            && !addends.contains(&t.addend)
        {
            addends.push(t.addend.clone());
        }
    }
    Ok(GuidanceResult {
        source,
        target,
        addends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependencies::{OppositeEdge, PlusLeadsToTriple};

    fn small() -> Ontology {
        let h = EmotionHierarchy::load_canonical().unwrap();
        let mut rv = RefinedVocabulary::empty_for(&h);
        rv.insert_term("Guilt", "guilty");
        rv.insert_term("Anger", "ill temper");
        rv.insert_term("Irritability", "ill");
        rv.insert_term("Horror", "horror-struck");
        rv.insert_term("Joy", "happy");
        let mut o = Ontology::new(h, rv);
        o.opposites = vec![
            OppositeEdge {
                from: "Joy".into(),
                to: "Sadness".into(),
            },
            OppositeEdge {
                from: "Anger".into(),
                to: "Serenity".into(),
            },
        ];
        o.triples = vec![
            PlusLeadsToTriple::new("Anger", "Compassion", "Joy"),
            PlusLeadsToTriple::new("Anger", "Pity", "Sadness"),
        ];
        o
    }

    #[test]
    fn detects_at_tiers() {
        let o = small();
        let r = detect_emotion(&o, "I feel very GUILTY!", Tier::Primary);
        assert_eq!(r.label.as_deref(), Some("Sadness"));
        assert_eq!(
            r.matched_terms,
            vec![TermMatch {
                term: "guilty".into(),
                emotion: "Sadness".into()
            }]
        );
        assert_eq!(
            detect_emotion(&o, "I feel very guilty", Tier::Tertiary).label.as_deref(),
            Some("Guilt")
        );
        assert_eq!(
            detect_emotion(&o, "I am full of joy", Tier::Primary).label.as_deref(),
            Some("Joy")
        );
        assert!(detect_emotion(&o, "the table is brown", Tier::Primary).label.is_none());
        assert!(detect_emotion(&o, "joy", Tier::Secondary).label.is_none());
    }

    #[test]
    fn longest_phrase_first() {
        let o = small();
        let m = Matcher::own(&o.hierarchy, &o.vocabulary);
        let got: Vec<String> = m.matches("So much ill temper, ill.").into_iter().map(|x| x.0).collect();
        assert_eq!(got, vec!["ill temper", "ill"]);
        assert_eq!(m.matches("horror struck").len(), 1);
    }

    #[test]
    fn ties_go_to_document_order() {
        let o = small();
        let r = detect_emotion(&o, "happy and guilty and angry fear", Tier::Primary);
        // Fear (1) vs Joy (1) vs Sadness (1): Fear comes first.
        assert_eq!(r.label.as_deref(), Some("Fear"));
    }

    #[test]
    fn featurize_modes() {
        let o = small();
        let tone = featurize(&o, "guilty guilty horror-struck", FeatureMode::Tone);
        assert_eq!(tone.counts.len(), 144);
        assert_eq!(tone.counts.iter().sum::<u32>(), 3);
        let p = featurize(&o, "guilty guilty horror-struck", FeatureMode::PTone);
        assert_eq!(p.counts, vec![0, 1, 0, 0, 2, 0]);
        assert!(featurize(&o, "", FeatureMode::Tone).counts.iter().all(|&c| c == 0));
        let f = Featurizer::new(&o, FeatureMode::PTone);
        assert_eq!(f.header(), PRIMARY_EMOTIONS.map(String::from).as_slice());
    }

    #[test]
    fn guidance() {
        let o = small();
        let g = empathetic_guidance(&o, "anger").unwrap();
        assert_eq!(g.target, "Serenity");
        assert_eq!(g.addends, vec!["Compassion"]);
        let g = empathetic_guidance(&o, "Sadness").unwrap();
        assert_eq!(g.target, "Joy");
        assert!(g.addends.is_empty());
        assert!(matches!(
            empathetic_guidance(&o, "Joy"),
            Err(ApplicationError::NotNegativePrimary(_))
        ));
        assert!(matches!(
            empathetic_guidance(&o, "Guilt"),
            Err(ApplicationError::NotNegativePrimary(_))
        ));
        assert!(matches!(
            empathetic_guidance(&o, "Fear"),
            Err(ApplicationError::NoPositiveOpposite(_))
        ));
    }

    #[test]
    fn polarity_map() {
        assert_eq!(polarity("joy"), Some(Polarity::Positive));
        assert_eq!(polarity("Love"), Some(Polarity::Positive));
        assert_eq!(polarity("Fear"), Some(Polarity::Negative));
        assert_eq!(polarity("Surprise"), Some(Polarity::Neutral));
        assert_eq!(polarity("Guilt"), None);
    }
}
