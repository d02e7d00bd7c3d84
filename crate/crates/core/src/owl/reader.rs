use std::collections::HashMap;

use quick_xml::escape::unescape;
use quick_xml::events::Event;
use quick_xml::Reader;

use super::*;
use crate::dependencies::{CompositionEdge, OppositeEdge, PlusLeadsToTriple};
use crate::hierarchy::{EmotionHierarchy, EmotionNode, HierarchyError, Tier};
use crate::ontology::{Ontology, DEFAULT_IRI_PREFIX};
use crate::text::collapse_whitespace;
use crate::vocabulary::RefinedVocabulary;

#[derive(Debug)]
struct Element {
    name: String,
    /// Attribute values as written, entity references left unexpanded.
    attrs: Vec<(String, String)>,
    children: Vec<Element>,
    text: String,
    line: usize,
}

impl Element {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Attribute value with the predefined XML entities expanded.
    fn attr_value(&self, key: &str) -> Option<String> {
        self.attr(key)
            .map(|v| unescape(v).map(|c| c.into_owned()).unwrap_or_else(|_| v.to_owned()))
    }

    fn structure(&self, message: impl Into<String>) -> OwlError {
        OwlError::Structure {
            line: self.line,
            message: message.into(),
        }
    }

    fn expect_children(&self, names: &[&str]) -> Result<(), OwlError> {
        let got: Vec<&str> = self.children.iter().map(|c| c.name.as_str()).collect();
        if got != names {
            return Err(self.structure(format!(
                "<{}> must contain [{}], found [{}]",
                self.name,
                names.join(", "),
                got.join(", ")
            )));
        }
        Ok(())
    }
}

/// Byte offsets of every newline, for offset to line lookups.
struct Lines(Vec<usize>);

impl Lines {
    fn new(doc: &str) -> Self {
        Lines(doc.bytes().enumerate().filter(|&(_, b)| b == b'\n').map(|(i, _)| i).collect())
    }

    fn at(&self, pos: u64) -> usize {
        self.0.partition_point(|&nl| nl < pos as usize) + 1
    }
}

fn build_tree(doc: &str) -> Result<Element, OwlError> {
    let lines = Lines::new(doc);
    let mut reader = Reader::from_str(doc);
    let xml_err = |reader: &Reader<&[u8]>, message: String| OwlError::Xml {
        line: lines.at(reader.error_position()),
        message,
    };
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;
    loop {
        let start = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| xml_err(&reader, e.to_string()))?;
        let line = lines.at(start);
        let open = |e: &quick_xml::events::BytesStart| -> Result<Element, OwlError> {
            let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
            let mut attrs = Vec::new();
            for a in e.attributes() {
                let a = a.map_err(|err| OwlError::Xml {
                    line,
                    message: err.to_string(),
                })?;
                attrs.push((
                    String::from_utf8_lossy(a.key.as_ref()).into_owned(),
                    String::from_utf8_lossy(&a.value).into_owned(),
                ));
            }
            Ok(Element {
                name,
                attrs,
                children: Vec::new(),
                text: String::new(),
                line,
            })
        };
        match event {
            Event::Start(e) => {
                if root.is_some() {
                    return Err(OwlError::Xml {
                        line,
                        message: "content after the root element".into(),
                    });
                }
                stack.push(open(&e)?);
            }
            Event::Empty(e) => {
                let el = open(&e)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None if root.is_none() => root = Some(el),
                    None => {
                        return Err(OwlError::Xml {
                            line,
                            message: "content after the root element".into(),
                        })
                    }
                }
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| OwlError::Xml {
                    line,
                    message: "unexpected closing tag".into(),
                })?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None => root = Some(el),
                }
            }
            Event::Text(t) => {
                let s = t
                    .decode()
                    .map_err(|e| xml_err(&reader, e.to_string()))?;
                match stack.last_mut() {
                    Some(el) => el.text.push_str(&s),
                    None if s.trim().is_empty() => {}
                    None => {
                        return Err(OwlError::Xml {
                            line,
                            message: "text outside the root element".into(),
                        })
                    }
                }
            }
            Event::CData(t) => {
                let s = t.decode().map_err(|e| xml_err(&reader, e.to_string()))?;
                if let Some(el) = stack.last_mut() {
                    el.text.push_str(&s);
                }
            }
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref() {
                    Ok(Some(c)) => c.to_string(),
                    _ => {
                        let name = r.decode().map_err(|e| xml_err(&reader, e.to_string()))?;
                        match name.as_ref() {
                            "lt" => "<".into(),
                            "gt" => ">".into(),
                            "amp" => "&".into(),
                            "apos" => "'".into(),
                            "quot" => "\"".into(),
                            other => {
                                return Err(OwlError::Xml {
                                    line,
                                    message: format!("unsupported entity reference '&{other};'"),
                                })
                            }
                        }
                    }
                };
                if let Some(el) = stack.last_mut() {
                    el.text.push_str(&resolved);
                }
            }
            Event::Eof => break,
            Event::Decl(_) | Event::DocType(_) | Event::Comment(_) | Event::PI(_) => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(OwlError::Xml {
            line: lines.at(doc.len() as u64),
            message: format!("unexpected end of document inside <{}>", open.name),
        });
    }
    root.ok_or_else(|| OwlError::Xml {
        line: 1,
        message: "no root element".into(),
    })
}

/// Raw parse state before the hierarchy is assembled.
#[derive(Default)]
struct Collected {
    classes: Vec<String>,
    class_index: HashMap<String, usize>,
    subclass_of: Vec<(usize, usize)>,
    disjoint: Vec<(usize, usize)>,
    definitions: HashMap<usize, String>,
    names: HashMap<usize, String>,
    labels: Vec<(usize, String)>,
    compositions: Vec<(usize, usize)>,
    opposites: Vec<(usize, usize)>,
    triples: Vec<(usize, usize, usize)>,
}

impl Collected {
    fn class_ref(&self, el: &Element) -> Result<usize, OwlError> {
        if el.name != "Class" {
            return Err(el.structure(format!("expected <Class>, found <{}>", el.name)));
        }
        let iri = el
            .attr_value("IRI")
            .ok_or_else(|| el.structure("<Class> without IRI"))?;
        self.iri_ref(el, &iri)
    }

    fn iri_ref(&self, el: &Element, iri: &str) -> Result<usize, OwlError> {
        iri.strip_prefix('#')
            .and_then(|f| self.class_index.get(f).copied())
            .ok_or_else(|| OwlError::Reference {
                line: el.line,
                iri: iri.to_owned(),
            })
    }
}

fn declaration(c: &mut Collected, el: &Element) -> Result<(), OwlError> {
    if el.children.len() != 1 {
        return Err(el.structure("<Declaration> must contain exactly one entity"));
    }
    let entity = &el.children[0];
    let iri = entity.attr_value("IRI");
    match (entity.name.as_str(), iri.as_deref()) {
        ("Class", Some(iri)) => {
            let frag = iri
                .strip_prefix('#')
                .filter(|f| !f.is_empty())
                .ok_or_else(|| entity.structure(format!("class IRI '{iri}' must be '#Name'")))?;
            if c.class_index.insert(frag.to_owned(), c.classes.len()).is_some() {
                return Err(entity.structure(format!("class '{iri}' declared twice")));
            }
            c.classes.push(frag.to_owned());
            Ok(())
        }
        ("ObjectProperty", Some(iri)) if OBJECT_PROPERTIES.contains(&iri) => Ok(()),
        ("AnnotationProperty", Some(DEFINITION | EMOTION_NAME)) => Ok(()),
        ("AnnotationProperty", None) if entity.attr("abbreviatedIRI") == Some(RDFS_LABEL) => Ok(()),
        (name, iri) => Err(entity.structure(format!(
            "unsupported declaration <{name}> {}",
            iri.unwrap_or_default()
        ))),
    }
}

fn literal(el: &Element, datatypes: &[&str]) -> Result<String, OwlError> {
    if el.name != "Literal" || !el.children.is_empty() {
        return Err(el.structure("expected a <Literal> with text content"));
    }
    match el.attr("datatypeIRI") {
        Some(dt) if datatypes.contains(&dt) => Ok(collapse_whitespace(&el.text)),
        other => Err(el.structure(format!(
            "unexpected literal datatype '{}'",
            other.unwrap_or_default()
        ))),
    }
}

fn annotation(c: &mut Collected, el: &Element) -> Result<(), OwlError> {
    el.expect_children(&["AnnotationProperty", "IRI", "Literal"])?;
    let (prop, subject, lit) = (&el.children[0], &el.children[1], &el.children[2]);
    let target = c.iri_ref(subject, subject.text.trim())?;
    let xsd_string = format!("{XSD}string");
    let rdfs_literal = format!("{RDFS}Literal");
    match (prop.attr_value("IRI").as_deref(), prop.attr("abbreviatedIRI")) {
        (Some(DEFINITION), None) => {
            let def = literal(lit, &[XSD_STRING, &xsd_string])?;
            c.definitions.insert(target, def);
        }
        (Some(EMOTION_NAME), None) => {
            let name = literal(lit, &[XSD_STRING, &xsd_string])?;
            c.names.insert(target, name);
        }
        (None, Some(RDFS_LABEL)) => {
            let term = literal(lit, &[RDFS_LITERAL, &rdfs_literal])?;
            c.labels.push((target, term));
        }
        _ => return Err(prop.structure("unsupported annotation property")),
    }
    Ok(())
}

/// Returns (outer, property, inner) of an EquivalentClasses block.
fn equivalent(c: &Collected, el: &Element) -> Result<(usize, &'static str, usize), OwlError> {
    if el.children.len() != 2 {
        return Err(el.structure("<EquivalentClasses> must contain a class and a restriction"));
    }
    let outer = c.class_ref(&el.children[0])?;
    let r = &el.children[1];
    r.expect_children(&["ObjectProperty", "Class"])?;
    let prop = r.children[0].attr_value("IRI").unwrap_or_default();
    let inner = c.class_ref(&r.children[1])?;
    let allowed: &[&'static str] = match r.name.as_str() {
        "ObjectSomeValuesFrom" => &[IS_COMPOSED_OF, IS_OPPOSITE_OF],
        "ObjectExactCardinality" => {
            if r.attr("cardinality") != Some("1") {
                return Err(r.structure("cardinality must be 1"));
            }
            &[PLUS, LEADS_TO]
        }
        other => return Err(r.structure(format!("unsupported restriction <{other}>"))),
    };
    let prop = allowed
        .iter()
        .find(|p| **p == prop)
        .ok_or_else(|| r.structure(format!("property '{prop}' not allowed in <{}>", r.name)))?;
    Ok((outer, prop, inner))
}

/// Parses an OWL/XML document produced by [`serialize`](super::serialize).
pub fn parse(doc: &str) -> Result<Ontology, OwlError> {
    let root = build_tree(doc)?;
    if root.name != "Ontology" {
        return Err(root.structure(format!("root element is <{}>, expected <Ontology>", root.name)));
    }
    let iri_prefix = root
        .attr_value("ontologyIRI")
        .or_else(|| root.attr_value("xml:base"))
        .unwrap_or_else(|| DEFAULT_IRI_PREFIX.to_owned());

    let mut c = Collected::default();
    for el in root.children.iter().filter(|e| e.name == "Declaration") {
        declaration(&mut c, el)?;
    }

    let mut pending_plus: Option<(usize, usize, &Element)> = None;
    for el in &root.children {
        let plus = pending_plus.take();
        let mut consumed = false;
        match el.name.as_str() {
            "Prefix" | "Declaration" => {}
            "SubClassOf" => {
                el.expect_children(&["Class", "Class"])?;
                let child = c.class_ref(&el.children[0])?;
                let parent = c.class_ref(&el.children[1])?;
                c.subclass_of.push((child, parent));
            }
            "DisjointClasses" => {
                if el.children.len() < 2 {
                    return Err(el.structure("<DisjointClasses> needs at least two classes"));
                }
                let ids = el
                    .children
                    .iter()
                    .map(|ch| c.class_ref(ch))
                    .collect::<Result<Vec<_>, _>>()?;
                for (i, a) in ids.iter().enumerate() {
                    for b in &ids[i + 1..] {
                        c.disjoint.push((*a, *b));
                    }
                }
            }
            "AnnotationAssertion" => annotation(&mut c, el)?,
            "EquivalentClasses" => {
                let (outer, prop, inner) = equivalent(&c, el)?;
                match prop {
                    IS_COMPOSED_OF => c.compositions.push((outer, inner)),
                    IS_OPPOSITE_OF => c.opposites.push((outer, inner)),
                    PLUS => pending_plus = Some((outer, inner, el)),
                    _ => match plus {
                        Some((addend, base, _)) if addend == inner => {
                            c.triples.push((base, addend, outer));
                            consumed = true;
                        }
                        _ => {
                            return Err(el.structure(
                                "LeadsTo block must directly follow the Plus block for the same class",
                            ))
                        }
                    },
                }
            }
            other => return Err(el.structure(format!("unsupported element <{other}>"))),
        }
        if let (Some((_, _, p)), false) = (plus, consumed) {
            return Err(p.structure("Plus block without a following LeadsTo block"));
        }
    }
    if let Some((_, _, p)) = pending_plus {
        return Err(p.structure("Plus block without a following LeadsTo block"));
    }

    assemble(c, iri_prefix)
}

fn assemble(c: Collected, iri_prefix: String) -> Result<Ontology, OwlError> {
    let n = c.classes.len();
    let names: Vec<String> = (0..n)
        .map(|i| c.names.get(&i).cloned().unwrap_or_else(|| c.classes[i].clone()))
        .collect();
    let mut tree_parent: Vec<Option<usize>> = vec![None; n];
    let mut extra = Vec::new();
    for &(child, parent) in &c.subclass_of {
        if tree_parent[child].is_none() {
            tree_parent[child] = Some(parent);
        } else {
            extra.push((names[child].clone(), names[parent].clone()));
        }
    }
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let mut depth = 1;
        let mut seen = vec![false; n];
        seen[i] = true;
        let mut cur = tree_parent[i];
        while let Some(p) = cur {
            if std::mem::replace(&mut seen[p], true) {
                break;
            }
            depth += 1;
            cur = tree_parent[p];
        }
        let tier = Tier::from_depth(depth).ok_or_else(|| OwlError::Tier {
            name: names[i].clone(),
            depth,
        })?;
        nodes.push(EmotionNode {
            name: names[i].clone(),
            tier,
            definition: c.definitions.get(&i).cloned().unwrap_or_default(),
            parent: tree_parent[i].map(|p| names[p].clone()),
        });
    }
    let hierarchy = EmotionHierarchy::from_nodes_unchecked(nodes).map_err(|e| match e {
        HierarchyError::DuplicateName(name) => OwlError::Structure {
            line: 1,
            message: format!("two classes map to the emotion name '{name}'"),
        },
        other => OwlError::Structure {
            line: 1,
            message: other.to_string(),
        },
    })?;

    let mut vocabulary = RefinedVocabulary::default();
    for (i, name) in names.iter().enumerate() {
        vocabulary.add_emotion(name);
        if let Some(def) = c.definitions.get(&i) {
            vocabulary.set_definition(name, def);
        }
    }
    for (i, term) in &c.labels {
        vocabulary.insert_term(&names[*i], term);
    }

    let mut o = Ontology::new(hierarchy, vocabulary);
    o.iri_prefix = iri_prefix;
    o.extra_subclass_of = extra;
    o.disjoint = c
        .disjoint
        .iter()
        .map(|&(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    o.compositions = c
        .compositions
        .iter()
        .map(|&(p, ch)| CompositionEdge {
            parent: names[p].clone(),
            child: names[ch].clone(),
        })
        .collect();
    o.opposites = c
        .opposites
        .iter()
        .map(|&(f, t)| OppositeEdge {
            from: names[f].clone(),
            to: names[t].clone(),
        })
        .collect();
    o.triples = c
        .triples
        .iter()
        .map(|&(b, a, r)| PlusLeadsToTriple::new(&names[b], &names[a], &names[r]))
        .collect();
    Ok(o)
}
