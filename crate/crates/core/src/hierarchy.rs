//! The three-tier emotion hierarchy and its is-a semantics.
//!
//! The canonical hierarchy ships as `data/hierarchy.tsv`, one node per line:
//!
//! ```text
//! tier<TAB>name<TAB>parent-or-"-"<TAB>definition
//! ```
//!
//! Lines starting with `#` are comments. Node order in the file is the
//! document order used by every list-returning operation in this crate.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::text::collapse_whitespace;

/// The six Primary emotions, in canonical document order.
pub const PRIMARY_EMOTIONS: [&str; 6] = ["Anger", "Fear", "Joy", "Love", "Sadness", "Surprise"];

/// Number of nodes in the canonical hierarchy.
pub const CANONICAL_NODE_COUNT: usize = 144;

const CANONICAL_DATA: &str = include_str!("../data/hierarchy.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Primary,
    Secondary,
    Tertiary,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Primary, Tier::Secondary, Tier::Tertiary];

    /// Depth of the tier below the (implicit) ontology root, starting at 1.
    pub fn depth(self) -> usize {
        match self {
            Tier::Primary => 1,
            Tier::Secondary => 2,
            Tier::Tertiary => 3,
        }
    }

    pub fn from_depth(depth: usize) -> Option<Tier> {
        match depth {
            1 => Some(Tier::Primary),
            2 => Some(Tier::Secondary),
            3 => Some(Tier::Tertiary),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Primary => "primary",
            Tier::Secondary => "secondary",
            Tier::Tertiary => "tertiary",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tier {
    type Err = HierarchyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "primary" => Ok(Tier::Primary),
            "secondary" => Ok(Tier::Secondary),
            "tertiary" => Ok(Tier::Tertiary),
            other => Err(HierarchyError::UnknownTier(other.to_owned())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("unknown emotion '{0}'")]
    NotFound(String),
    #[error("unknown tier '{0}'")]
    UnknownTier(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate emotion name '{0}'")]
    DuplicateName(String),
    #[error("emotion '{name}' refers to unknown parent '{parent}'")]
    UnknownParent { name: String, parent: String },
    #[error("emotion '{name}': {message}")]
    Invalid { name: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionNode {
    pub name: String,
    pub tier: Tier,
    pub definition: String,
    pub parent: Option<String>,
}

impl EmotionNode {
    /// Runs of whitespace in the definition collapse to single spaces.
    pub fn new(name: &str, tier: Tier, parent: Option<&str>, definition: &str) -> Self {
        EmotionNode {
            name: name.to_owned(),
            tier,
            definition: collapse_whitespace(definition),
            parent: parent.map(str::to_owned),
        }
    }
}

/// A forest of emotion nodes with a case-insensitive name index.
///
/// Hierarchies built with [`EmotionHierarchy::from_nodes`] satisfy the tier
/// invariants (and are therefore acyclic). [`EmotionHierarchy::from_nodes_unchecked`]
/// only resolves names, so a parsed document with planted defects can still
/// be loaded and handed to the consistency checker; every walk below guards
/// against cycles for that reason.
#[derive(Debug, Clone)]
pub struct EmotionHierarchy {
    nodes: Vec<EmotionNode>,
    index: HashMap<String, usize>,
    parents: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl PartialEq for EmotionHierarchy {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

impl Eq for EmotionHierarchy {}

impl EmotionHierarchy {
    /// Builds a hierarchy and enforces the tier invariants: Primary nodes
    /// have no parent, Secondary nodes hang off a Primary, Tertiary nodes
    /// off a Secondary.
    pub fn from_nodes(nodes: Vec<EmotionNode>) -> Result<Self, HierarchyError> {
        let hierarchy = Self::from_nodes_unchecked(nodes)?;
        for (i, node) in hierarchy.nodes.iter().enumerate() {
            let parent_tier = hierarchy.parents[i].map(|p| hierarchy.nodes[p].tier);
            let expected = match node.tier {
                Tier::Primary => None,
                Tier::Secondary => Some(Tier::Primary),
                Tier::Tertiary => Some(Tier::Secondary),
            };
            if parent_tier != expected {
                let message = match (expected, parent_tier) {
                    (None, Some(_)) => "a primary emotion cannot have a parent".to_owned(),
                    (Some(t), None) => format!("a {} emotion needs a {} parent", node.tier, t),
                    (Some(t), Some(got)) => {
                        format!("a {} emotion needs a {} parent, found {}", node.tier, t, got)
                    }
                    (None, None) => unreachable!(),
                };
                return Err(HierarchyError::Invalid {
                    name: node.name.clone(),
                    message,
                });
            }
        }
        Ok(hierarchy)
    }

    /// Builds a hierarchy resolving names and parent links only.
    pub fn from_nodes_unchecked(nodes: Vec<EmotionNode>) -> Result<Self, HierarchyError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node.name.trim().is_empty() {
                return Err(HierarchyError::Invalid {
                    name: node.name.clone(),
                    message: "empty emotion name".to_owned(),
                });
            }
            if index.insert(node.name.to_lowercase(), i).is_some() {
                return Err(HierarchyError::DuplicateName(node.name.clone()));
            }
        }
        let mut parents = Vec::with_capacity(nodes.len());
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            let parent = match &node.parent {
                None => None,
                Some(p) => match index.get(&p.to_lowercase()) {
                    Some(&pi) => Some(pi),
                    None => {
                        return Err(HierarchyError::UnknownParent {
                            name: node.name.clone(),
                            parent: p.clone(),
                        })
                    }
                },
            };
            if let Some(pi) = parent {
                children[pi].push(i);
            }
            parents.push(parent);
        }
        // Store parent names in their canonical spelling.
        let mut nodes = nodes;
        for (i, parent) in parents.iter().enumerate() {
            if let Some(pi) = parent {
                nodes[i].parent = Some(nodes[*pi].name.clone());
            }
        }
        Ok(EmotionHierarchy {
            nodes,
            index,
            parents,
            children,
        })
    }

    /// Parses the line-based hierarchy format.
    pub fn parse(text: &str) -> Result<Self, HierarchyError> {
        let mut nodes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(HierarchyError::Malformed {
                    line: line_no,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            }
            let tier: Tier = fields[0].parse().map_err(|e: HierarchyError| {
                HierarchyError::Malformed {
                    line: line_no,
                    message: e.to_string(),
                }
            })?;
            let name = fields[1].trim();
            let parent = match fields[2].trim() {
                "-" | "" => None,
                p => Some(p),
            };
            nodes.push(EmotionNode::new(name, tier, parent, fields[3]));
        }
        Self::from_nodes(nodes)
    }

    /// Loads the bundled canonical hierarchy: six Primary roots and 144 nodes.
    pub fn load_canonical() -> Result<Self, HierarchyError> {
        let hierarchy = Self::parse(CANONICAL_DATA)?;
        for node in hierarchy.nodes.iter().filter(|n| n.tier == Tier::Primary) {
            if !PRIMARY_EMOTIONS
                .iter()
                .any(|p| p.eq_ignore_ascii_case(&node.name))
            {
                return Err(HierarchyError::Invalid {
                    name: node.name.clone(),
                    message: "not one of the six primary emotions".to_owned(),
                });
            }
        }
        for primary in PRIMARY_EMOTIONS {
            if hierarchy.position(primary).map(|i| hierarchy.nodes[i].tier) != Some(Tier::Primary) {
                return Err(HierarchyError::Invalid {
                    name: primary.to_owned(),
                    message: "missing primary emotion".to_owned(),
                });
            }
        }
        if hierarchy.len() != CANONICAL_NODE_COUNT {
            return Err(HierarchyError::Invalid {
                name: hierarchy
                    .nodes
                    .last()
                    .map(|n| n.name.clone())
                    .unwrap_or_default(),
                message: format!(
                    "canonical hierarchy has {} nodes, expected {}",
                    hierarchy.len(),
                    CANONICAL_NODE_COUNT
                ),
            });
        }
        Ok(hierarchy)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in document order.
    pub fn nodes(&self) -> &[EmotionNode] {
        &self.nodes
    }

    pub fn node_at(&self, idx: usize) -> &EmotionNode {
        &self.nodes[idx]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    /// Case-insensitive lookup of a node's document position.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(&name.trim().to_lowercase()).copied()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, HierarchyError> {
        self.position(name)
            .ok_or_else(|| HierarchyError::NotFound(name.to_owned()))
    }

    pub fn get(&self, name: &str) -> Option<&EmotionNode> {
        self.position(name).map(|i| &self.nodes[i])
    }

    pub fn node(&self, name: &str) -> Result<&EmotionNode, HierarchyError> {
        self.index_of(name).map(|i| &self.nodes[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    /// The stored spelling of `name`.
    pub fn canonical_name(&self, name: &str) -> Result<&str, HierarchyError> {
        self.node(name).map(|n| n.name.as_str())
    }

    pub fn tier_of(&self, name: &str) -> Result<Tier, HierarchyError> {
        self.node(name).map(|n| n.tier)
    }

    pub fn parent_index(&self, idx: usize) -> Option<usize> {
        self.parents[idx]
    }

    pub fn child_indices(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    /// Direct children in document order.
    pub fn children(&self, name: &str) -> Result<Vec<&str>, HierarchyError> {
        let i = self.index_of(name)?;
        Ok(self.children[i]
            .iter()
            .map(|&c| self.nodes[c].name.as_str())
            .collect())
    }

    /// Names at one tier, in document order.
    pub fn names_at(&self, tier: Tier) -> Vec<&str> {
        self.nodes
            .iter()
            .filter(|n| n.tier == tier)
            .map(|n| n.name.as_str())
            .collect()
    }

    pub fn primaries(&self) -> Vec<&str> {
        self.names_at(Tier::Primary)
    }

    /// Ancestor indices, nearest first. Stops if a parent link revisits a node.
    pub fn ancestor_indices(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.nodes.len()];
        seen[idx] = true;
        let mut cur = self.parents[idx];
        while let Some(p) = cur {
            if seen[p] {
                break;
            }
            seen[p] = true;
            out.push(p);
            cur = self.parents[p];
        }
        out
    }

    pub fn ancestors(&self, name: &str) -> Result<Vec<&str>, HierarchyError> {
        let i = self.index_of(name)?;
        Ok(self
            .ancestor_indices(i)
            .into_iter()
            .map(|a| self.nodes[a].name.as_str())
            .collect())
    }

    /// Reflexive subsumption: `a` is-a `b` when they are the same emotion or
    /// `b` is an ancestor of `a`.
    pub fn is_a(&self, a: &str, b: &str) -> Result<bool, HierarchyError> {
        let ai = self.index_of(a)?;
        let bi = self.index_of(b)?;
        Ok(ai == bi || self.ancestor_indices(ai).contains(&bi))
    }

    /// Strict subsumption: `b` is a proper ancestor of `a`.
    pub fn is_a_strict(&self, a: &str, b: &str) -> Result<bool, HierarchyError> {
        let ai = self.index_of(a)?;
        let bi = self.index_of(b)?;
        Ok(ai != bi && self.ancestor_indices(ai).contains(&bi))
    }

    /// Strict descendants of a node, in pre-order.
    pub fn descendant_indices(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.nodes.len()];
        seen[idx] = true;
        let mut stack: Vec<usize> = self.children[idx].iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            if seen[n] {
                continue;
            }
            seen[n] = true;
            out.push(n);
            stack.extend(self.children[n].iter().rev().copied());
        }
        out
    }

    pub fn descendants(&self, name: &str) -> Result<Vec<&str>, HierarchyError> {
        let i = self.index_of(name)?;
        Ok(self
            .descendant_indices(i)
            .into_iter()
            .map(|d| self.nodes[d].name.as_str())
            .collect())
    }

    /// The topmost ancestor of a node (the node itself when it has no parent).
    pub fn root_index(&self, idx: usize) -> usize {
        self.ancestor_indices(idx).last().copied().unwrap_or(idx)
    }

    pub fn root_of(&self, name: &str) -> Result<&str, HierarchyError> {
        let i = self.index_of(name)?;
        Ok(self.nodes[self.root_index(i)].name.as_str())
    }

    /// The node itself or its nearest ancestor sitting at `tier`.
    pub fn ancestor_at_tier(&self, idx: usize, tier: Tier) -> Option<usize> {
        std::iter::once(idx)
            .chain(self.ancestor_indices(idx))
            .find(|&i| self.nodes[i].tier == tier)
    }

    pub(crate) fn set_definition(&mut self, idx: usize, definition: String) {
        self.nodes[idx].definition = definition;
    }
}
