//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tone::applications::{detect_emotion, FeatureMode, Featurizer};
use tone::dependencies::{
    build_compositions, build_opposites, build_plus_leads_to, default_statements, FallbackClassifier,
    LexiconClassifier, RecordedClassifier,
};
use tone::hierarchy::{EmotionHierarchy, Tier, PRIMARY_EMOTIONS};
use tone::lexicon::Lexicon;
use tone::ontology::Ontology;
use tone::owl;
use tone::query::{check_consistency, run_query, Rule};
use tone::similarity::RecordedScores;
use tone::vocabulary::{apply_decisions, build_pseudo_vocabulary, bundled_decisions, find_overlaps, score_overlaps};

type Check = Result<(), String>;
type Plant = fn(&str) -> String;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn parent_walk(h: &EmotionHierarchy, name: &str) -> Vec<String> {
    let mut out = vec![name.to_owned()];
    let mut cur = name.to_owned();
    while let Some(p) = h.nodes().iter().find(|n| n.name == cur).and_then(|n| n.parent.clone()) {
        out.push(p.clone());
        cur = p;
    }
    out
}

fn ac1() -> Check {
    let t = Instant::now();
    let h = EmotionHierarchy::load_canonical().map_err(|e| e.to_string())?;
    let roots: Vec<&str> = h.nodes().iter().filter(|n| n.parent.is_none()).map(|n| n.name.as_str()).collect();
    ensure!(roots == PRIMARY_EMOTIONS, "roots {roots:?}");
    ensure!(h.len() == 144, "{} nodes", h.len());
    let rv = tone::vocabulary::RefinedVocabulary::empty_for(&h);
    let report = check_consistency(&Ontology::new(h, rv));
    let structural: Vec<_> = report
        .violations
        .iter()
        .filter(|v| matches!(v.rule, Rule::R1 | Rule::R2 | Rule::R3))
        .collect();
    ensure!(structural.is_empty(), "{structural:?}");
    let took = t.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(())
}

fn ac2() -> Check {
    let h = EmotionHierarchy::load_canonical().unwrap();
    let names: Vec<&str> = h.names().collect();
    let mut mismatches = 0;
    for a in &names {
        let up = parent_walk(&h, a);
        for b in &names {
            if h.is_a(a, b).unwrap() != up.iter().any(|x| x == b) {
                mismatches += 1;
            }
        }
    }
    ensure!(mismatches == 0, "{mismatches} mismatches over {} pairs", names.len() * names.len());
    Ok(())
}

fn ac3() -> Check {
    let h = EmotionHierarchy::load_canonical().unwrap();
    let lexicon = Lexicon::bundled();
    let pv = build_pseudo_vocabulary(&h, &lexicon);
    let rv = apply_decisions(&pv, &bundled_decisions(), &lexicon.definitions()).map_err(|e| e.to_string())?;
    ensure!(rv.exclusivity_violations().is_empty(), "exclusivity violated");
    ensure!(find_overlaps(&rv.to_pseudo()).is_empty(), "overlaps remain");

    let dislike = find_overlaps(&pv).into_iter().find(|r| r.term == "dislike").ok_or("no dislike overlap")?;
    let scored = score_overlaps(&[dislike], &RecordedScores::bundled()).map_err(|e| e.to_string())?;
    let r = &scored[0];
    // Recorded similarities: dislike/loathing 0.459, dislike/revulsion 0.415.
    let recorded = [("Loathing", 0.459_f64), ("Revulsion", 0.415)];
    let best = recorded.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
    for (name, score) in recorded {
        let i = r.candidates.iter().position(|c| c == name).ok_or(format!("{name} not a candidate"))?;
        ensure!((r.scores[i] - score).abs() < 1e-9, "{name} scored {}", r.scores[i]);
    }
    ensure!(r.suggested.as_deref() == Some(best), "suggested {:?}", r.suggested);
    ensure!(rv.terms("Loathing").unwrap().contains("dislike"), "dislike not in Loathing");
    Ok(())
}

fn ac4() -> Check {
    let h = EmotionHierarchy::load_canonical().unwrap();
    let got: BTreeSet<(String, String)> =
        build_compositions(&h).into_iter().map(|e| (e.parent, e.child)).collect();
    let want: BTreeSet<(String, String)> = h
        .nodes()
        .iter()
        .filter_map(|n| n.parent.clone().map(|p| (p, n.name.clone())))
        .collect();
    ensure!(got == want, "edge sets differ");
    ensure!(got.len() == 138, "{} edges", got.len());
    for child in ["Horror", "Nervousness"] {
        ensure!(got.contains(&("Fear".into(), child.into())), "missing (Fear, {child})");
    }
    Ok(())
}

fn ac5() -> Check {
    let o = common::canonical();
    let mut antonyms = Lexicon::new();
    antonyms.add_antonym("Joy", "Sadness");
    antonyms.add_antonym("Joy", "Unhappiness");
    let built = build_opposites(&o.hierarchy, &o.vocabulary, &antonyms);
    let edges: BTreeSet<(&str, &str)> = built.edges.iter().map(|e| (e.from.as_str(), e.to.as_str())).collect();
    ensure!(edges == BTreeSet::from([("Joy", "Sadness"), ("Joy", "Annoyance")]), "edges {edges:?}");
    let loops = o.opposites.iter().filter(|e| e.from == e.to).count();
    ensure!(loops == 0, "{loops} self-loops in the canonical build");
    Ok(())
}

fn ac6() -> Check {
    let o = common::canonical();
    let h = &o.hierarchy;
    let statements = default_statements(h);
    let clf = FallbackClassifier {
        first: RecordedClassifier::bundled(),
        second: LexiconClassifier::new(h, &o.vocabulary),
    };
    let triples = build_plus_leads_to(h, &statements, &clf).map_err(|e| e.to_string())?;
    ensure!(
        triples.iter().any(|t| (t.base.as_str(), t.addend.as_str(), t.result.as_str()) == ("Anger", "Compassion", "Joy")),
        "(Anger, Compassion, Joy) missing"
    );
    ensure!(triples.iter().all(|t| t.result != t.base), "a triple has result = base");

    let t = Instant::now();
    let lexicon_only = LexiconClassifier::new(h, &o.vocabulary);
    build_plus_leads_to(h, &statements, &lexicon_only).map_err(|e| e.to_string())?;
    let took = t.elapsed();
    ensure!(took < Duration::from_secs(5), "sweep took {took:?}");
    Ok(())
}

fn ac7() -> Check {
    let o = common::canonical();
    let doc = owl::serialize(&o).map_err(|e| e.to_string())?;
    let back = owl::parse(&doc).map_err(|e| e.to_string())?;
    ensure!(back == o, "parse(serialize(o)) differs from o");
    let squash = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
    let flat = squash(&doc);
    let golden = include_str!("fixtures/golden_snippets.xml");
    for block in golden.split("\n\n") {
        ensure!(flat.contains(&squash(block)), "golden block missing:\n{block}");
    }
    Ok(())
}

fn ac8() -> Check {
    let o = common::canonical();
    let q = |text: &str| -> Result<Vec<String>, String> {
        let query = text.parse().map_err(|e: tone::query::QueryError| e.to_string())?;
        Ok(run_query(&o, &query).map_err(|e| e.to_string())?.emotions)
    };
    ensure!(q("opposite(Joy)")?.contains(&"Sadness".to_owned()), "Sadness not opposite Joy");
    ensure!(q("components(Love)")? == ["Affection", "Lust", "Longing"], "components(Love)");
    ensure!(q("leadsTo(Anger + Compassion)")? == ["Joy"], "leadsTo(Anger + Compassion)");
    for e in &o.opposites {
        ensure!(q(&format!("opposite({})", e.to))?.contains(&e.from), "{} -> {} not symmetric", e.from, e.to);
        ensure!(q(&format!("opposite({})", e.from))?.contains(&e.to), "{} -> {} not listed", e.from, e.to);
    }
    Ok(())
}

fn ac9() -> Check {
    let o = common::canonical();
    let text = std::fs::read_to_string(common::corpus_path()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let oracle = common::oracle_rows();
    ensure!(lines.len() == 20 && oracle.len() == 20, "corpus has {} lines", lines.len());
    let mut agree = 0;
    for (line, (_, want, _)) in lines.iter().zip(&oracle) {
        let got = detect_emotion(&o, line, Tier::Primary).label.unwrap_or_else(|| "NONE".into());
        let upper = detect_emotion(&o, &line.to_uppercase(), Tier::Primary).label;
        let swapped: String = line
            .chars()
            .map(|c| if c.is_lowercase() { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() })
            .collect();
        let swapped = detect_emotion(&o, &swapped, Tier::Primary).label;
        let plain = detect_emotion(&o, line, Tier::Primary).label;
        ensure!(upper == plain && swapped == plain, "case changes the label of '{line}'");
        if got == *want {
            agree += 1;
        }
    }
    ensure!(agree == 20, "{agree}/20 agree with the oracle");
    Ok(())
}

fn ac10() -> Check {
    let o = common::canonical();
    let h = &o.hierarchy;
    let mut phrases: Vec<String> = h.names().map(str::to_lowercase).collect();
    for n in h.names() {
        phrases.extend(o.vocabulary.terms(n).into_iter().flatten().cloned());
    }
    let tone = Featurizer::new(&o, FeatureMode::Tone);
    let ptone = Featurizer::new(&o, FeatureMode::PTone);
    let roots: Vec<String> = ptone.header().to_vec();
    let root_of: Vec<usize> = h
        .names()
        .map(|n| roots.iter().position(|r| *r == *parent_walk(h, n).last().unwrap()).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x70e);
    for i in 0..100 {
        let k = rng.random_range(0..15);
        let picks: Vec<&str> = (0..k).map(|_| phrases[rng.random_range(0..phrases.len())].as_str()).collect();
        let text = picks.join(" ; filler ; ");
        let t = tone.featurize(&text).counts;
        let p = ptone.featurize(&text).counts;
        ensure!(t.iter().sum::<u32>() as usize == k, "text {i}: {} counted, {k} placed", t.iter().sum::<u32>());
        let mut fold = vec![0u32; roots.len()];
        for (e, c) in t.iter().enumerate() {
            fold[root_of[e]] += c;
        }
        ensure!(p == fold, "text {i}: P-TONE {p:?} is not the fold {fold:?}");
    }
    Ok(())
}

fn ac11() -> Check {
    let doc = common::canonical_owl();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let plants: [(&str, Plant, Rule); 3] = [
        ("cycle", common::plant_cycle, Rule::R1),
        ("duplicate parent", common::plant_duplicate_parent, Rule::R2),
        ("disjoint subsumption", common::plant_disjoint_subsumption, Rule::R6),
    ];
    for (name, plant, rule) in plants {
        let planted = plant(&doc);
        let o = owl::parse(&planted).map_err(|e| format!("{name}: {e}"))?;
        let rules = check_consistency(&o).rules();
        ensure!(rules == BTreeSet::from([rule]), "{name}: rules {rules:?}");
        let path = dir.path().join(format!("{}.owl", rule));
        std::fs::write(&path, planted).unwrap();
        let out = common::tone(&["validate", path.to_str().unwrap()]);
        ensure!(out.status.code() == Some(1), "{name}: exit {:?}", out.status.code());
        let listed = common::stdout(&out);
        ensure!(listed.lines().all(|l| l.starts_with(&format!("{rule} "))), "{name}: {listed}");
    }
    Ok(())
}

fn main() -> ExitCode {
    type Criterion = (&'static str, &'static str, fn() -> Check);
    let criteria: [Criterion; 11] = [
        ("AC1", "hierarchy integrity", ac1),
        ("AC2", "subsumption oracle", ac2),
        ("AC3", "vocabulary exclusivity", ac3),
        ("AC4", "composition edges", ac4),
        ("AC5", "opposite edge fixtures", ac5),
        ("AC6", "plus-LeadsTo fixtures", ac6),
        ("AC7", "OWL round trip and golden snippets", ac7),
        ("AC8", "query suite", ac8),
        ("AC9", "detection oracle", ac9),
        ("AC10", "featurization conservation", ac10),
        ("AC11", "consistency checker fixtures", ac11),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(()) => println!("{id} PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
