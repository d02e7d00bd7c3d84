//! End-to-end ontology build: lexicon ingestion, vocabulary refinement,
//! dependency building.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use thiserror::Error;

use crate::dependencies::{
    apply_suppressions, build_compositions, build_opposites, build_plus_leads_to,
    default_statements, parse_adjectives, parse_suppressions, statements_from_adjectives,
    FallbackClassifier, LexiconClassifier, RecordedClassifier,
};
use crate::hierarchy::EmotionHierarchy;
use crate::lexicon::Lexicon;
use crate::ontology::{DisjointPolicy, Ontology, DEFAULT_IRI_PREFIX};
use crate::similarity::{EmbeddingProvider, RecordedScores, VectorTable};
use crate::vocabulary::{
    apply_decisions, auto_decisions, build_pseudo_vocabulary, bundled_decisions, find_overlaps,
    majority_vote, parse_decisions, score_overlaps, AnnotationDecision, OverlapRecord,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("stage {stage}: {cause}")]
pub struct BuildError {
    pub stage: &'static str,
    pub cause: String,
}

fn fail(stage: &'static str) -> impl Fn(String) -> BuildError {
    move |cause| BuildError { stage, cause }
}

/// Input paths and flags for a build. Absent paths select the bundled data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildConfig {
    pub hierarchy: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// One decision file, or three verifier files combined by majority vote.
    pub decisions: Vec<PathBuf>,
    pub adjectives: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub classifier: Option<PathBuf>,
    pub suppress: Option<PathBuf>,
    pub auto_accept_suggestions: bool,
    pub iri_prefix: String,
    pub disjoint: DisjointPolicy,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            hierarchy: None,
            lexicon: None,
            decisions: Vec::new(),
            adjectives: None,
            vectors: None,
            scores: None,
            classifier: None,
            suppress: None,
            auto_accept_suggestions: false,
            iri_prefix: DEFAULT_IRI_PREFIX.to_owned(),
            disjoint: DisjointPolicy::default(),
        }
    }
}

impl BuildConfig {
    /// Parses a flat `key = value` file. Relative paths are resolved against
    /// `base_dir`. `decisions` may repeat or hold a comma-separated list.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, BuildError> {
        let err = fail("config");
        let mut cfg = BuildConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("line {}: expected key = value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let path = || Some(base_dir.join(value));
            match key {
                "hierarchy" => cfg.hierarchy = path(),
                "lexicon" => cfg.lexicon = path(),
                "decisions" => cfg.decisions.extend(
                    value
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(|v| base_dir.join(v)),
                ),
                "adjectives" => cfg.adjectives = path(),
                "vectors" => cfg.vectors = path(),
                "scores" => cfg.scores = path(),
                "classifier" => cfg.classifier = path(),
                "suppress" => cfg.suppress = path(),
                "auto_accept_suggestions" => {
                    cfg.auto_accept_suggestions = match value {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        _ => return Err(err(format!("line {}: bad boolean '{value}'", i + 1))),
                    }
                }
                "iri_prefix" => cfg.iri_prefix = value.to_owned(),
                "disjoint" => {
                    cfg.disjoint = match value {
                        "opposite-primaries" => DisjointPolicy::OppositePrimaries,
                        "all-primaries" => DisjointPolicy::AllPrimaries,
                        _ => return Err(err(format!("line {}: bad disjoint policy '{value}'", i + 1))),
                    }
                }
                _ => return Err(err(format!("line {}: unknown key '{key}'", i + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, BuildError> {
        let text = read(path, "config")?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn read(path: &Path, stage: &'static str) -> Result<String, BuildError> {
    fs::read_to_string(path).map_err(|e| BuildError {
        stage,
        cause: format!("{}: {e}", path.display()),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub emotions: usize,
    pub terms: usize,
    pub overlaps: usize,
    pub opposite_edges: usize,
    pub dropped_antonyms: usize,
    pub compositions: usize,
    pub triples: usize,
    pub suppressed_triples: usize,
    pub disjoint_pairs: usize,
}

impl fmt::Display for BuildReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "emotions: {}", self.emotions)?;
        writeln!(f, "vocabulary terms: {}", self.terms)?;
        writeln!(f, "overlapping terms resolved: {}", self.overlaps)?;
        writeln!(f, "opposite edges: {}", self.opposite_edges)?;
        writeln!(f, "dropped antonyms: {}", self.dropped_antonyms)?;
        writeln!(f, "composition edges: {}", self.compositions)?;
        writeln!(f, "plus-leadsTo triples: {}", self.triples)?;
        writeln!(f, "suppressed triples: {}", self.suppressed_triples)?;
        write!(f, "disjoint pairs: {}", self.disjoint_pairs)
    }
}

/// Everything a build produces.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub ontology: Ontology,
    pub report: BuildReport,
    /// Overlap records, scored when a provider was configured.
    pub overlaps: Vec<OverlapRecord>,
}

fn load_decisions(cfg: &BuildConfig, bundled_lexicon: bool) -> Result<Vec<AnnotationDecision>, BuildError> {
    let err = fail("decisions");
    let mut lists = Vec::new();
    for p in &cfg.decisions {
        lists.push(parse_decisions(&read(p, "decisions")?).map_err(|e| err(format!("{}: {e}", p.display())))?);
    }
    match lists.len() {
        0 if bundled_lexicon => Ok(bundled_decisions()),
        0 => Ok(Vec::new()),
        1 => Ok(lists.remove(0)),
        3 => majority_vote([&lists[0], &lists[1], &lists[2]]).map_err(|e| err(e.to_string())),
        n => Err(err(format!("expected one decision file or three verifier files, got {n}"))),
    }
}

/// Runs the full build.
pub fn run_build(cfg: &BuildConfig) -> Result<BuildOutput, BuildError> {
    let h = match &cfg.hierarchy {
        Some(p) => EmotionHierarchy::parse(&read(p, "hierarchy")?),
        None => EmotionHierarchy::load_canonical(),
    }
    .map_err(|e| fail("hierarchy")(e.to_string()))?;

    let lexicon = match &cfg.lexicon {
        Some(p) => Lexicon::parse(&read(p, "lexicon")?).map_err(|e| fail("lexicon")(e.to_string()))?,
        None => Lexicon::bundled(),
    };
    for e in lexicon.entries() {
        if !h.contains(&e.emotion) {
            warn!("lexicon entry for unknown emotion '{}' ignored", e.emotion);
        }
    }

    let pv = build_pseudo_vocabulary(&h, &lexicon);
    let mut overlaps = find_overlaps(&pv);
    let provider: Option<Box<dyn EmbeddingProvider>> = match (&cfg.vectors, &cfg.scores) {
        (Some(_), Some(_)) => {
            return Err(fail("scoring")("configure either vectors or scores, not both".into()))
        }
        (Some(p), None) => Some(Box::new(
            VectorTable::parse(&read(p, "scoring")?).map_err(|e| fail("scoring")(e.to_string()))?,
        )),
        (None, Some(p)) => Some(Box::new(
            RecordedScores::parse(&read(p, "scoring")?).map_err(|e| fail("scoring")(e.to_string()))?,
        )),
        (None, None) => None,
    };
    if let Some(provider) = &provider {
        overlaps =
            score_overlaps(&overlaps, provider.as_ref()).map_err(|e| fail("scoring")(e.to_string()))?;
    }

    let mut decisions = load_decisions(cfg, cfg.lexicon.is_none())?;
    if cfg.auto_accept_suggestions {
        if provider.is_none() {
            return Err(fail("decisions")(
                "auto-accepting suggestions needs an embedding provider (vectors or scores)".into(),
            ));
        }
        decisions = auto_decisions(&overlaps, &decisions);
    }
    let rv = apply_decisions(&pv, &decisions, &lexicon.definitions())
        .map_err(|e| fail("vocabulary")(e.to_string()))?;

    let opposites = build_opposites(&h, &rv, &lexicon);
    let compositions = build_compositions(&h);

    let statements = match &cfg.adjectives {
        Some(p) => statements_from_adjectives(
            &h,
            &parse_adjectives(&read(p, "statements")?).map_err(|e| fail("statements")(e.to_string()))?,
        ),
        None => default_statements(&h),
    };
    let recorded = match &cfg.classifier {
        Some(p) => RecordedClassifier::parse(&read(p, "plus-leads-to")?)
            .map_err(|e| fail("plus-leads-to")(e.to_string()))?,
        None => RecordedClassifier::bundled(),
    };
    let triples = if rv.total_terms() == 0 {
        // The lexicon classifier cannot label statements without a vocabulary.
        warn!("empty vocabulary: plus-LeadsTo stage skipped");
        Vec::new()
    } else {
        let clf = FallbackClassifier {
            first: recorded,
            second: LexiconClassifier::new(&h, &rv),
        };
        build_plus_leads_to(&h, &statements, &clf).map_err(|e| fail("plus-leads-to")(e.to_string()))?
    };
    let before = triples.len();
    let triples = match &cfg.suppress {
        Some(p) => {
            let rejected = parse_suppressions(&read(p, "plus-leads-to")?)
                .map_err(|e| fail("plus-leads-to")(e.to_string()))?;
            apply_suppressions(triples, &rejected)
        }
        None => triples,
    };

    let mut o = Ontology::new(h, rv);
    o.iri_prefix = cfg.iri_prefix.clone();
    o.opposites = opposites.edges;
    o.compositions = compositions;
    o.triples = triples;
    o.derive_disjoint(cfg.disjoint);

    let report = BuildReport {
        emotions: o.hierarchy.len(),
        terms: o.vocabulary.total_terms(),
        overlaps: overlaps.len(),
        opposite_edges: o.opposites.len(),
        dropped_antonyms: opposites.unresolved.len(),
        compositions: o.compositions.len(),
        triples: o.triples.len(),
        suppressed_triples: before - o.triples.len(),
        disjoint_pairs: o.disjoint.len(),
    };
    Ok(BuildOutput {
        ontology: o,
        report,
        overlaps,
    })
}
