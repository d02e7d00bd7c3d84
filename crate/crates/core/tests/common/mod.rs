#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tone::ontology::Ontology;
use tone::owl;
use tone::pipeline::{run_build, BuildConfig};

pub fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus_path() -> PathBuf {
    manifest_dir().join("data/corpus/micro.txt")
}

/// Frozen oracle rows: (index, label, matched terms).
pub fn oracle_rows() -> Vec<(usize, String, Vec<String>)> {
    let text = std::fs::read_to_string(manifest_dir().join("tests/fixtures/micro_oracle.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let terms = f[2].split(';').filter(|t| !t.is_empty()).map(str::to_owned).collect();
            (f[0].parse().unwrap(), f[1].to_owned(), terms)
        })
        .collect()
}

pub fn canonical() -> Ontology {
    run_build(&BuildConfig::default()).unwrap().ontology
}

pub fn canonical_owl() -> String {
    owl::serialize(&canonical()).unwrap()
}

fn subclass(child: &str, parent: &str) -> String {
    format!(
        "    <SubClassOf>\n        <Class IRI=\"#{child}\"/>\n        <Class IRI=\"#{parent}\"/>\n    </SubClassOf>\n"
    )
}

fn insert_before_first(doc: &str, marker: &str, block: &str) -> String {
    let at = doc.find(marker).expect("marker present");
    format!("{}{block}{}", &doc[..at], &doc[at..])
}

/// Nervousness is detached from Fear and placed under Uneasiness, its own child.
pub fn plant_cycle(doc: &str) -> String {
    let from = subclass("Nervousness", "Fear");
    assert!(doc.contains(&from));
    doc.replacen(&from, &subclass("Nervousness", "Uneasiness"), 1)
}

/// Uneasiness gains Horror as a second parent.
pub fn plant_duplicate_parent(doc: &str) -> String {
    insert_before_first(doc, "    <DisjointClasses>", &subclass("Uneasiness", "Horror"))
}

/// Fear is declared disjoint from its own sub-class Nervousness.
pub fn plant_disjoint_subsumption(doc: &str) -> String {
    let block = "    <DisjointClasses>\n        <Class IRI=\"#Fear\"/>\n        <Class IRI=\"#Nervousness\"/>\n    </DisjointClasses>\n";
    insert_before_first(doc, "    <DisjointClasses>", block)
}

pub fn tone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tone"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}
