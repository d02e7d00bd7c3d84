//! The ontology: hierarchy, vocabulary and dependency relations together.

use thiserror::Error;

use crate::dependencies::{CompositionEdge, OppositeEdge, PlusLeadsToTriple};
use crate::hierarchy::{EmotionHierarchy, Tier};
use crate::vocabulary::RefinedVocabulary;

pub const DEFAULT_IRI_PREFIX: &str = "http://www.semanticweb.org/tone";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("{relation} refers to unknown emotion '{name}'")]
    DanglingEndpoint { relation: &'static str, name: String },
}

/// Which pairs of Primary emotions are declared disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisjointPolicy {
    /// Primary pairs linked by an opposite edge.
    #[default]
    OppositePrimaries,
    /// Every pair of Primary emotions.
    AllPrimaries,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    pub iri_prefix: String,
    pub hierarchy: EmotionHierarchy,
    pub vocabulary: RefinedVocabulary,
    pub opposites: Vec<OppositeEdge>,
    pub compositions: Vec<CompositionEdge>,
    pub triples: Vec<PlusLeadsToTriple>,
    /// Unordered pairs declared disjoint.
    pub disjoint: Vec<(String, String)>,
    /// SubClassOf axioms beyond each node's tree parent, as (child, parent).
    pub extra_subclass_of: Vec<(String, String)>,
}

impl Ontology {
    /// An ontology with no dependency edges. Definitions are synced both
    /// ways between the hierarchy and the vocabulary, the vocabulary's
    /// taking precedence.
    pub fn new(mut hierarchy: EmotionHierarchy, mut vocabulary: RefinedVocabulary) -> Self {
        for i in 0..hierarchy.len() {
            let name = hierarchy.node_at(i).name.clone();
            match vocabulary.definition(&name) {
                Some(def) => {
                    let def = def.to_owned();
                    hierarchy.set_definition(i, def);
                }
                None => {
                    let def = hierarchy.node_at(i).definition.clone();
                    vocabulary.set_definition(&name, &def);
                }
            }
        }
        Ontology {
            iri_prefix: DEFAULT_IRI_PREFIX.to_owned(),
            hierarchy,
            vocabulary,
            opposites: Vec::new(),
            compositions: Vec::new(),
            triples: Vec::new(),
            disjoint: Vec::new(),
            extra_subclass_of: Vec::new(),
        }
    }

    /// Computes the disjoint pairs from the opposite edges, in edge order.
    pub fn derive_disjoint(&mut self, policy: DisjointPolicy) {
        let h = &self.hierarchy;
        let is_primary = |n: &str| h.tier_of(n).map(|t| t == Tier::Primary).unwrap_or(false);
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut push = |a: &str, b: &str| {
            let dup = pairs
                .iter()
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a));
            if !dup {
                pairs.push((a.to_owned(), b.to_owned()));
            }
        };
        match policy {
            DisjointPolicy::OppositePrimaries => {
                for e in &self.opposites {
                    if is_primary(&e.from) && is_primary(&e.to) {
                        push(&e.from, &e.to);
                    }
                }
            }
            DisjointPolicy::AllPrimaries => {
                let ps = h.primaries();
                for (i, a) in ps.iter().enumerate() {
                    for b in &ps[i + 1..] {
                        push(a, b);
                    }
                }
            }
        }
        self.disjoint = pairs;
    }

    /// Fails on the first dependency, disjointness or extra axiom that names
    /// an unknown emotion.
    pub fn check_endpoints(&self) -> Result<(), OntologyError> {
        self.dangling().into_iter().next().map_or(Ok(()), Err)
    }

    /// Every endpoint that names an unknown emotion.
    pub fn dangling(&self) -> Vec<OntologyError> {
        let h = &self.hierarchy;
        let mut out = Vec::new();
        let mut check = |relation: &'static str, name: &str| {
            if !h.contains(name) {
                out.push(OntologyError::DanglingEndpoint {
                    relation,
                    name: name.to_owned(),
                });
            }
        };
        for e in &self.opposites {
            check("isOppositeOf", &e.from);
            check("isOppositeOf", &e.to);
        }
        for e in &self.compositions {
            check("isComposedOf", &e.parent);
            check("isComposedOf", &e.child);
        }
        for t in &self.triples {
            check("Plus", &t.base);
            check("Plus", &t.addend);
            check("LeadsTo", &t.result);
        }
        for (a, b) in &self.disjoint {
            check("DisjointClasses", a);
            check("DisjointClasses", b);
        }
        for (c, p) in &self.extra_subclass_of {
            check("SubClassOf", c);
            check("SubClassOf", p);
        }
        out
    }
}
