//! Queries over the materialized relations and the structural consistency
//! checker.
//!
//! Query syntax, names case-insensitive:
//!
//! ```text
//! opposite(<Emotion>)
//! components(<Emotion>[, transitive])
//! leadsTo(<Emotion> + <Emotion>)
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hierarchy::{HierarchyError, Tier};
use crate::ontology::Ontology;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error("cannot parse query '{0}'")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub emotions: Vec<String>,
    pub query_echo: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Opposite(String),
    Components { emotion: String, transitive: bool },
    LeadsTo { base: String, addend: String },
}

impl FromStr for Query {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || QueryError::Syntax(s.trim().to_owned());
        let text = s.trim();
        let open = text.find('(').ok_or_else(syntax)?;
        let args = text[open + 1..].strip_suffix(')').ok_or_else(syntax)?;
        let name = |a: &str| {
            let a = a.trim();
            if a.is_empty() || a.contains(['(', ')', ',', '+']) {
                Err(syntax())
            } else {
                Ok(a.to_owned())
            }
        };
        match text[..open].trim().to_ascii_lowercase().as_str() {
            "opposite" => Ok(Query::Opposite(name(args)?)),
            "components" => match args.split_once(',') {
                None => Ok(Query::Components {
                    emotion: name(args)?,
                    transitive: false,
                }),
                Some((e, flag)) if flag.trim().eq_ignore_ascii_case("transitive") => {
                    Ok(Query::Components {
                        emotion: name(e)?,
                        transitive: true,
                    })
                }
                Some(_) => Err(syntax()),
            },
            "leadsto" => {
                let (b, a) = args.split_once('+').ok_or_else(syntax)?;
                Ok(Query::LeadsTo {
                    base: name(b)?,
                    addend: name(a)?,
                })
            }
            _ => Err(syntax()),
        }
    }
}

/// Runs a parsed query.
pub fn run_query(o: &Ontology, q: &Query) -> Result<QueryResult, QueryError> {
    match q {
        Query::Opposite(e) => query_opposites(o, e),
        Query::Components {
            emotion,
            transitive,
        } => query_components(o, emotion, *transitive),
        Query::LeadsTo { base, addend } => query_leads_to(o, base, addend),
    }
}

/// Emotions linked to `emotion` by an opposite edge in either direction,
/// in document order.
pub fn query_opposites(o: &Ontology, emotion: &str) -> Result<QueryResult, QueryError> {
    let h = &o.hierarchy;
    let name = h.canonical_name(emotion)?;
    let mut found = BTreeSet::new();
    for e in &o.opposites {
        if e.from.eq_ignore_ascii_case(name) {
            found.extend(h.position(&e.to));
        }
        if e.to.eq_ignore_ascii_case(name) {
            found.extend(h.position(&e.from));
        }
    }
    Ok(QueryResult {
        emotions: found.into_iter().map(|i| h.node_at(i).name.clone()).collect(),
        query_echo: format!("opposite({name})"),
    })
}

/// Direct components in edge order, or with `transitive` the pre-order
/// closure over composition edges.
pub fn query_components(
    o: &Ontology,
    emotion: &str,
    transitive: bool,
) -> Result<QueryResult, QueryError> {
    let h = &o.hierarchy;
    let name = h.canonical_name(emotion)?.to_owned();
    let children = |p: &str| -> Vec<String> {
        o.compositions
            .iter()
            .filter(|e| e.parent.eq_ignore_ascii_case(p))
            .filter_map(|e| h.canonical_name(&e.child).ok().map(str::to_owned))
            .collect()
    };
    let mut out: Vec<String> = Vec::new();
    if transitive {
        let mut seen = BTreeSet::from([name.clone()]);
        let mut stack: Vec<String> = children(&name).into_iter().rev().collect();
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            stack.extend(children(&c).into_iter().rev());
            out.push(c);
        }
    } else {
        for c in children(&name) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    let echo = if transitive {
        format!("components({name}, transitive)")
    } else {
        format!("components({name})")
    };
    Ok(QueryResult {
        emotions: out,
        query_echo: echo,
    })
}

/// Results of the plus-LeadsTo triples for (base, addend).
pub fn query_leads_to(o: &Ontology, base: &str, addend: &str) -> Result<QueryResult, QueryError> {
    let h = &o.hierarchy;
    let b = h.canonical_name(base)?;
    let a = h.canonical_name(addend)?;
    let mut out: Vec<String> = Vec::new();
    for t in &o.triples {
        if t.base.eq_ignore_ascii_case(b) && t.addend.eq_ignore_ascii_case(a) {
            let r = h.canonical_name(&t.result).unwrap_or(&t.result).to_owned();
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    Ok(QueryResult {
        emotions: out,
        query_echo: format!("leadsTo({b} + {a})"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// The is-a graph is acyclic.
    R1,
    /// Every non-Primary emotion has exactly one parent.
    R2,
    /// Exactly six parentless emotions, all Primary.
    R3,
    /// Vocabularies are mutually exclusive and never contain their own name.
    R4,
    /// Every dependency endpoint exists.
    R5,
    /// No disjoint pair is related by is-a.
    R6,
    /// Every plus-LeadsTo result is Primary.
    R7,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub names: Vec<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] {}", self.rule, self.names.join(", "), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn rules(&self) -> BTreeSet<Rule> {
        self.violations.iter().map(|v| v.rule).collect()
    }
}

/// Parent lists per node: the tree parent followed by any extra SubClassOf
/// parents.
fn all_parents(o: &Ontology) -> Vec<Vec<usize>> {
    let h = &o.hierarchy;
    let mut parents: Vec<Vec<usize>> = (0..h.len())
        .map(|i| h.parent_index(i).into_iter().collect())
        .collect();
    for (c, p) in &o.extra_subclass_of {
        if let (Some(ci), Some(pi)) = (h.position(c), h.position(p)) {
            parents[ci].push(pi);
        }
    }
    parents
}

/// Nodes reachable from `start` by following parent links, excluding
/// `start` unless it lies on a cycle.
fn reachable(parents: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; parents.len()];
    let mut stack = parents[start].clone();
    while let Some(n) = stack.pop() {
        if !std::mem::replace(&mut seen[n], true) {
            stack.extend(&parents[n]);
        }
    }
    seen
}

/// Evaluates rules R1 to R7.
pub fn check_consistency(o: &Ontology) -> ConsistencyReport {
    let h = &o.hierarchy;
    let parents = all_parents(o);
    let reach: Vec<Vec<bool>> = (0..h.len()).map(|i| reachable(&parents, i)).collect();
    let name = |i: usize| h.node_at(i).name.clone();
    let mut v = Vec::new();

    let mut on_cycle: Vec<bool> = (0..h.len()).map(|i| reach[i][i]).collect();
    for i in 0..h.len() {
        if on_cycle[i] {
            let members: Vec<usize> = (0..h.len()).filter(|&j| j == i || (reach[i][j] && reach[j][i])).collect();
            for &m in &members {
                on_cycle[m] = false;
            }
            v.push(Violation {
                rule: Rule::R1,
                names: members.into_iter().map(name).collect(),
                message: "is-a cycle".to_owned(),
            });
        }
    }

    for (i, ps) in parents.iter().enumerate() {
        if h.node_at(i).tier != Tier::Primary && ps.len() != 1 {
            let mut names = vec![name(i)];
            names.extend(ps.iter().map(|&p| name(p)));
            v.push(Violation {
                rule: Rule::R2,
                names,
                message: format!("{} parents, expected 1", ps.len()),
            });
        }
    }

    let roots: Vec<usize> = (0..h.len()).filter(|&i| h.parent_index(i).is_none()).collect();
    let bad_roots: Vec<usize> = roots
        .iter()
        .copied()
        .filter(|&i| h.node_at(i).tier != Tier::Primary)
        .collect();
    if roots.len() != 6 || !bad_roots.is_empty() {
        let names = if bad_roots.is_empty() { &roots } else { &bad_roots };
        v.push(Violation {
            rule: Rule::R3,
            names: names.iter().map(|&i| name(i)).collect(),
            message: format!(
                "{} root emotions ({} not primary), expected 6 primary roots",
                roots.len(),
                bad_roots.len()
            ),
        });
    }

    for (term, holders) in o.vocabulary.exclusivity_violations() {
        v.push(Violation {
            rule: Rule::R4,
            names: holders,
            message: format!("term '{term}' in more than one vocabulary"),
        });
    }
    for e in o.vocabulary.self_named_terms() {
        v.push(Violation {
            rule: Rule::R4,
            names: vec![e],
            message: "vocabulary contains the emotion's own name".to_owned(),
        });
    }

    for err in o.dangling() {
        let crate::ontology::OntologyError::DanglingEndpoint { name, .. } = &err;
        v.push(Violation {
            rule: Rule::R5,
            names: vec![name.clone()],
            message: err.to_string(),
        });
    }

    for (a, b) in &o.disjoint {
        if let (Some(ai), Some(bi)) = (h.position(a), h.position(b)) {
            if ai == bi || reach[ai][bi] || reach[bi][ai] {
                v.push(Violation {
                    rule: Rule::R6,
                    names: vec![name(ai), name(bi)],
                    message: "disjoint classes related by is-a".to_owned(),
                });
            }
        }
    }

    for t in &o.triples {
        if let Ok(tier) = h.tier_of(&t.result) {
            if tier != Tier::Primary {
                v.push(Violation {
                    rule: Rule::R7,
                    names: vec![t.base.clone(), t.addend.clone(), t.result.clone()],
                    message: format!("LeadsTo result is {tier}"),
                });
            }
        }
    }

    ConsistencyReport {
        ok: v.is_empty(),
        violations: v,
    }
}
