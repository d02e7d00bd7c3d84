mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use tone::applications::{detect_emotion, FeatureMode, Featurizer};
use tone::dependencies::build_compositions;
use tone::hierarchy::{EmotionHierarchy, EmotionNode, Tier};
use tone::ontology::Ontology;
use tone::owl;
use tone::query::{check_consistency, query_components, query_opposites, Rule};
use tone::vocabulary::RefinedVocabulary;

fn onto() -> &'static Ontology {
    static O: OnceLock<Ontology> = OnceLock::new();
    O.get_or_init(common::canonical)
}

/// Every vocabulary phrase of the canonical ontology, names included.
fn phrases() -> &'static Vec<String> {
    static P: OnceLock<Vec<String>> = OnceLock::new();
    P.get_or_init(|| {
        let o = onto();
        let mut out: Vec<String> = o.hierarchy.names().map(str::to_lowercase).collect();
        for n in o.hierarchy.names() {
            out.extend(o.vocabulary.terms(n).into_iter().flatten().cloned());
        }
        out
    })
}

/// Ancestors by walking parent names, independent of the library's indices.
fn chain(nodes: &[EmotionNode], name: &str) -> Vec<String> {
    let mut out = vec![name.to_owned()];
    let mut cur = name.to_owned();
    while let Some(p) = nodes.iter().find(|n| n.name == cur).and_then(|n| n.parent.clone()) {
        out.push(p.clone());
        cur = p;
    }
    out
}

#[test]
fn is_a_matches_parent_walk() {
    let h = EmotionHierarchy::load_canonical().unwrap();
    let names: Vec<&str> = h.names().collect();
    for a in &names {
        let up = chain(h.nodes(), a);
        for b in &names {
            assert_eq!(h.is_a(a, b).unwrap(), up.iter().any(|x| x == b), "{a} is-a {b}");
        }
    }
}

#[test]
fn opposites_are_symmetric() {
    let o = onto();
    for e in &o.opposites {
        assert!(query_opposites(o, &e.from).unwrap().emotions.contains(&e.to));
        assert!(query_opposites(o, &e.to).unwrap().emotions.contains(&e.from));
        assert_ne!(e.from, e.to);
    }
}

#[test]
fn transitive_components_are_descendants() {
    let o = onto();
    for n in o.hierarchy.names() {
        let got: BTreeSet<String> = query_components(o, n, true).unwrap().emotions.into_iter().collect();
        let want: BTreeSet<String> = o
            .hierarchy
            .nodes()
            .iter()
            .filter(|m| m.name != n && chain(o.hierarchy.nodes(), &m.name).iter().any(|x| x == n))
            .map(|m| m.name.clone())
            .collect();
        assert_eq!(got, want, "{n}");
    }
}

fn mangle(s: &str, mask: &[bool]) -> String {
    s.chars()
        .zip(mask.iter().cycle())
        .map(|(c, &up)| if up { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ptone_is_fold_of_tone(picks in prop::collection::vec(any::<prop::sample::Index>(), 0..12)) {
        let o = onto();
        let ps = phrases();
        let text = picks.iter().map(|i| ps[i.index(ps.len())].as_str()).collect::<Vec<_>>().join(" , xq , ");
        let tone = Featurizer::new(o, FeatureMode::Tone).featurize(&text).counts;
        let ptone = Featurizer::new(o, FeatureMode::PTone).featurize(&text).counts;
        prop_assert_eq!(tone.iter().sum::<u32>() as usize, picks.len());
        let roots: Vec<&str> = o.hierarchy.primaries();
        let mut fold = vec![0u32; roots.len()];
        for (i, n) in o.hierarchy.names().enumerate() {
            let top = chain(o.hierarchy.nodes(), n).pop().unwrap();
            fold[roots.iter().position(|r| *r == top).unwrap()] += tone[i];
        }
        prop_assert_eq!(ptone, fold);
    }

    #[test]
    fn detection_ignores_case(
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..6),
        mask in prop::collection::vec(any::<bool>(), 1..16),
        tier in prop_oneof![Just(Tier::Primary), Just(Tier::Secondary), Just(Tier::Tertiary)],
    ) {
        let o = onto();
        let ps = phrases();
        let text = format!("I felt {} today.", picks.iter().map(|i| ps[i.index(ps.len())].as_str()).collect::<Vec<_>>().join(" and "));
        let plain = detect_emotion(o, &text, tier);
        let loud = detect_emotion(o, &mangle(&text, &mask), tier);
        prop_assert_eq!(plain.label, loud.label);
        prop_assert_eq!(plain.matched_terms, loud.matched_terms);
    }

    #[test]
    fn removing_axioms_keeps_consistency(keep in prop::collection::vec(any::<bool>(), 64)) {
        let mut o = onto().clone();
        let mut k = keep.iter().cycle();
        o.opposites.retain(|_| *k.next().unwrap());
        o.triples.retain(|_| *k.next().unwrap());
        o.disjoint.retain(|_| *k.next().unwrap());
        o.compositions.retain(|_| *k.next().unwrap());
        prop_assert!(check_consistency(&o).ok);
    }

    #[test]
    fn second_parent_always_breaks_r2(child in any::<prop::sample::Index>(), parent in any::<prop::sample::Index>()) {
        let mut o = onto().clone();
        let names: Vec<String> = o.hierarchy.names().map(str::to_owned).collect();
        let non_primary: Vec<&String> = names.iter().filter(|n| o.hierarchy.tier_of(n).unwrap() != Tier::Primary).collect();
        let c = non_primary[child.index(non_primary.len())].clone();
        let p = names[parent.index(names.len())].clone();
        prop_assume!(o.hierarchy.node(&c).unwrap().parent.as_deref() != Some(p.as_str()) && c != p);
        o.extra_subclass_of.push((c, p));
        prop_assert!(check_consistency(&o).rules().contains(&Rule::R2));
    }

    #[test]
    fn random_ontologies_round_trip(
        shape in prop::collection::vec((0usize..3, 0usize..8), 1..20),
        terms in prop::collection::vec(("[a-z&<>\"']{1,8}( [a-z&<>]{1,6})?", any::<prop::sample::Index>()), 0..20),
        def in "[ -~]{0,30}",
    ) {
        let mut nodes = vec![EmotionNode::new("Root", Tier::Primary, None, def.trim())];
        for (i, &(tier, parent)) in shape.iter().enumerate() {
            let candidates: Vec<&EmotionNode> = nodes.iter().filter(|n| n.tier.depth() < 3 && (tier > 0 || n.tier == Tier::Primary)).collect();
            let p = candidates[parent % candidates.len()];
            let t = Tier::from_depth(p.tier.depth() + 1).unwrap();
            nodes.push(EmotionNode::new(&format!("E{i}"), t, Some(&p.name.clone()), ""));
        }
        let h = EmotionHierarchy::from_nodes(nodes).unwrap();
        let mut rv = RefinedVocabulary::empty_for(&h);
        let names: Vec<String> = h.names().map(str::to_owned).collect();
        let mut seen = BTreeSet::new();
        for (t, at) in &terms {
            if seen.insert(t.clone()) {
                rv.insert_term(&names[at.index(names.len())], t);
            }
        }
        let mut o = Ontology::new(h, rv);
        o.compositions = build_compositions(&o.hierarchy);
        let doc = owl::serialize(&o).unwrap();
        prop_assert_eq!(owl::parse(&doc).unwrap(), o);
    }
}
