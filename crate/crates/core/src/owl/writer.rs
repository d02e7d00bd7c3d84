use std::collections::HashMap;

use quick_xml::escape::{escape, partial_escape};

use super::*;
use crate::ontology::Ontology;
use crate::text::collapse_whitespace;

struct Out {
    buf: String,
}

impl Out {
    fn line(&mut self, depth: usize, s: &str) {
        for _ in 0..depth {
            self.buf.push_str("    ");
        }
        self.buf.push_str(s);
        self.buf.push('\n');
    }

    fn class(&mut self, depth: usize, frag: &str) {
        self.line(depth, &format!("<Class IRI=\"#{}\"/>", escape(frag)));
    }

    fn annotation(&mut self, property: &str, frag: &str, datatype: &str, value: &str) {
        self.line(1, "<AnnotationAssertion>");
        self.line(2, property);
        self.line(2, &format!("<IRI>#{}</IRI>", partial_escape(frag)));
        self.line(
            2,
            &format!(
                "<Literal datatypeIRI=\"{datatype}\">{}</Literal>",
                partial_escape(collapse_whitespace(value))
            ),
        );
        self.line(1, "</AnnotationAssertion>");
    }

    fn equivalent(&mut self, outer: &str, restriction: &str, property: &str, inner: &str) {
        let open = match restriction {
            "ObjectExactCardinality" => "<ObjectExactCardinality cardinality=\"1\">".to_owned(),
            r => format!("<{r}>"),
        };
        self.line(1, "<EquivalentClasses>");
        self.class(2, outer);
        self.line(2, &open);
        self.line(3, &format!("<ObjectProperty IRI=\"{property}\"/>"));
        self.class(3, inner);
        self.line(2, &format!("</{restriction}>"));
        self.line(1, "</EquivalentClasses>");
    }
}

/// Serializes an ontology to its canonical OWL/XML form.
pub fn serialize(o: &Ontology) -> Result<String, OwlError> {
    o.check_endpoints()
        .map_err(|e| OwlError::Serialize(e.to_string()))?;
    let h = &o.hierarchy;

    let mut frags: HashMap<String, String> = HashMap::new();
    let mut owners: HashMap<String, &str> = HashMap::new();
    for n in h.nodes() {
        let f = iri_fragment(&n.name);
        if f.is_empty() {
            return Err(OwlError::Serialize(format!(
                "emotion '{}' has no ASCII letters or digits for an IRI",
                n.name
            )));
        }
        if let Some(other) = owners.insert(f.clone(), &n.name) {
            return Err(OwlError::Serialize(format!(
                "emotions '{other}' and '{}' share the IRI #{f}",
                n.name
            )));
        }
        frags.insert(n.name.to_lowercase(), f);
    }
    let frag = |name: &str| frags[&name.to_lowercase()].as_str();
    let renamed: Vec<&str> = h
        .names()
        .filter(|n| frag(n) != *n)
        .collect();

    let mut w = Out { buf: String::new() };
    w.line(0, "<?xml version=\"1.0\"?>");
    w.line(0, "<!DOCTYPE Ontology [");
    for (name, iri) in [("owl", OWL), ("xsd", XSD), ("rdfs", RDFS), ("rdf", RDF), ("xml", XML)] {
        w.line(1, &format!("<!ENTITY {name} \"{iri}\" >"));
    }
    w.line(0, "]>");
    let prefix = escape(o.iri_prefix.as_str()).into_owned();
    w.line(
        0,
        &format!("<Ontology xmlns=\"{OWL}\" xml:base=\"{prefix}\" ontologyIRI=\"{prefix}\">"),
    );
    w.line(1, &format!("<Prefix name=\"\" IRI=\"{prefix}#\"/>"));
    for (name, iri) in [("owl", OWL), ("rdf", RDF), ("xml", XML), ("xsd", XSD), ("rdfs", RDFS)] {
        w.line(1, &format!("<Prefix name=\"{name}\" IRI=\"{iri}\"/>"));
    }

    for n in h.nodes() {
        w.line(1, "<Declaration>");
        w.class(2, frag(&n.name));
        w.line(1, "</Declaration>");
    }
    for p in OBJECT_PROPERTIES {
        w.line(1, "<Declaration>");
        w.line(2, &format!("<ObjectProperty IRI=\"{p}\"/>"));
        w.line(1, "</Declaration>");
    }
    let mut annotation_props = vec![DEFINITION];
    if !renamed.is_empty() {
        annotation_props.push(EMOTION_NAME);
    }
    for p in annotation_props {
        w.line(1, "<Declaration>");
        w.line(2, &format!("<AnnotationProperty IRI=\"{p}\"/>"));
        w.line(1, "</Declaration>");
    }

    let tree = h
        .nodes()
        .iter()
        .filter_map(|n| n.parent.as_deref().map(|p| (n.name.as_str(), p)));
    let extra = o
        .extra_subclass_of
        .iter()
        .map(|(c, p)| (c.as_str(), p.as_str()));
    for (child, parent) in tree.chain(extra) {
        w.line(1, "<SubClassOf>");
        w.class(2, frag(child));
        w.class(2, frag(parent));
        w.line(1, "</SubClassOf>");
    }

    for (a, b) in &o.disjoint {
        w.line(1, "<DisjointClasses>");
        w.class(2, frag(a));
        w.class(2, frag(b));
        w.line(1, "</DisjointClasses>");
    }

    let definition_prop = format!("<AnnotationProperty IRI=\"{DEFINITION}\"/>");
    for n in h.nodes() {
        let def = o
            .vocabulary
            .definition(&n.name)
            .unwrap_or(n.definition.as_str());
        w.annotation(&definition_prop, frag(&n.name), XSD_STRING, def);
    }
    let name_prop = format!("<AnnotationProperty IRI=\"{EMOTION_NAME}\"/>");
    for n in &renamed {
        w.annotation(&name_prop, frag(n), XSD_STRING, n);
    }
    let label_prop = format!("<AnnotationProperty abbreviatedIRI=\"{RDFS_LABEL}\"/>");
    for n in h.nodes() {
        for term in o.vocabulary.terms(&n.name).into_iter().flatten() {
            w.annotation(&label_prop, frag(&n.name), RDFS_LITERAL, term);
        }
    }

    for e in &o.compositions {
        w.equivalent(frag(&e.parent), "ObjectSomeValuesFrom", IS_COMPOSED_OF, frag(&e.child));
    }
    for e in &o.opposites {
        w.equivalent(frag(&e.from), "ObjectSomeValuesFrom", IS_OPPOSITE_OF, frag(&e.to));
    }
    for t in &o.triples {
        w.equivalent(frag(&t.addend), "ObjectExactCardinality", PLUS, frag(&t.base));
        w.equivalent(frag(&t.result), "ObjectExactCardinality", LEADS_TO, frag(&t.addend));
    }

    w.line(0, "</Ontology>");
    Ok(w.buf)
}
