//! OWL 2 XML serialization.
//!
//! The writer emits one canonical form (4-space indentation, LF line
//! endings, fixed element order) and the reader accepts exactly the element
//! shapes the writer produces.

mod reader;
mod writer;

pub use reader::parse;
pub use writer::serialize;

use thiserror::Error;

pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const XML: &str = "http://www.w3.org/XML/1998/namespace";

pub(crate) const XSD_STRING: &str = "&xsd;string";
pub(crate) const RDFS_LITERAL: &str = "&rdfs;Literal";
pub(crate) const RDFS_LABEL: &str = "rdfs:label";
pub(crate) const DEFINITION: &str = "#definition";
pub(crate) const EMOTION_NAME: &str = "#emotionName";
pub(crate) const IS_COMPOSED_OF: &str = "#isComposedOf";
pub(crate) const IS_OPPOSITE_OF: &str = "#isOppositeOf";
pub(crate) const PLUS: &str = "#Plus";
pub(crate) const LEADS_TO: &str = "#LeadsTo";
pub(crate) const OBJECT_PROPERTIES: [&str; 4] = [IS_COMPOSED_OF, IS_OPPOSITE_OF, PLUS, LEADS_TO];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OwlError {
    #[error("line {line}: malformed XML: {message}")]
    Xml { line: usize, message: String },
    #[error("line {line}: {message}")]
    Structure { line: usize, message: String },
    #[error("line {line}: reference to undeclared entity '{iri}'")]
    Reference { line: usize, iri: String },
    #[error("class '{name}' sits at depth {depth}; at most 3 tiers are allowed")]
    Tier { name: String, depth: usize },
    #[error("cannot serialize: {0}")]
    Serialize(String),
}

/// The IRI fragment for an emotion name: ASCII PascalCase with every
/// non-alphanumeric character removed ("ill temper" becomes "IllTemper").
pub fn iri_fragment(name: &str) -> String {
    name.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut cs = w.chars();
            let first = cs.next().expect("non-empty word").to_ascii_uppercase();
            std::iter::once(first).chain(cs).collect::<String>()
        })
        .collect()
}
