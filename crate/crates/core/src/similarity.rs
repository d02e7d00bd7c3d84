//! Embedding providers and cosine similarity.
//!
//! Two providers ship with the crate: [`VectorTable`], a file-backed dense
//! vector table, and [`RecordedScores`], which returns stored pairwise scores
//! without going through vectors.

use std::collections::HashMap;

use thiserror::Error;

use crate::text::normalize_term;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine undefined for a zero vector")]
    ZeroVector,
    #[error("no embedding for '{0}'")]
    UnknownText(String),
    #[error("no recorded score for ('{0}', '{1}')")]
    UnknownPair(String, String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

pub type EmbeddingVector = Vec<f64>;

/// Cosine similarity of two vectors of equal dimension.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, SimilarityError> {
    if u.len() != v.len() {
        return Err(SimilarityError::DimensionMismatch(u.len(), v.len()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(SimilarityError::ZeroVector);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Source of similarity scores between words or phrases.
pub trait EmbeddingProvider {
    /// Symmetric similarity of two texts.
    fn pair_score(&self, a: &str, b: &str) -> Result<f64, SimilarityError>;
}

/// Dense vectors keyed by lowercase text. Phrases are looked up whole.
#[derive(Debug, Clone, Default)]
pub struct VectorTable {
    dim: usize,
    vectors: HashMap<String, EmbeddingVector>,
}

impl VectorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, text: &str, vector: EmbeddingVector) -> Result<(), SimilarityError> {
        if self.vectors.is_empty() {
            self.dim = vector.len();
        } else if vector.len() != self.dim {
            return Err(SimilarityError::DimensionMismatch(self.dim, vector.len()));
        }
        self.vectors.insert(normalize_term(text), vector);
        Ok(())
    }

    pub fn embed(&self, text: &str) -> Result<&[f64], SimilarityError> {
        self.vectors
            .get(&normalize_term(text))
            .map(Vec::as_slice)
            .ok_or_else(|| SimilarityError::UnknownText(text.to_owned()))
    }

    /// Parses `text<TAB>v1 v2 ... vd` lines. `#` lines are comments.
    pub fn parse(data: &str) -> Result<Self, SimilarityError> {
        let mut table = VectorTable::new();
        for (i, line) in data.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| SimilarityError::Malformed {
                line: i + 1,
                message,
            };
            let (text, values) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected text<TAB>values".into()))?;
            let vector = values
                .split_whitespace()
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| malformed(e.to_string()))?;
            if vector.is_empty() {
                return Err(malformed("empty vector".into()));
            }
            table.insert(text, vector).map_err(|e| malformed(e.to_string()))?;
        }
        Ok(table)
    }
}

impl EmbeddingProvider for VectorTable {
    fn pair_score(&self, a: &str, b: &str) -> Result<f64, SimilarityError> {
        let u = self.embed(a)?;
        let v = self.embed(b)?;
        // Cosine is symmetric in exact arithmetic but not always in floating
        // point; order the operands so that swapping a and b is bit-identical.
        if normalize_term(a) <= normalize_term(b) {
            cosine(u, v)
        } else {
            cosine(v, u)
        }
    }
}

/// Stored pairwise scores, looked up without regard to argument order.
#[derive(Debug, Clone, Default)]
pub struct RecordedScores {
    scores: HashMap<(String, String), f64>,
}

impl RecordedScores {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: &str, b: &str) -> (String, String) {
        let (a, b) = (normalize_term(a), normalize_term(b));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn insert(&mut self, a: &str, b: &str, score: f64) {
        self.scores.insert(Self::key(a, b), score);
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Parses `textA<TAB>textB<TAB>score` lines. `#` lines are comments.
    pub fn parse(data: &str) -> Result<Self, SimilarityError> {
        let mut table = RecordedScores::new();
        for (i, line) in data.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| SimilarityError::Malformed {
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(malformed(format!(
                    "expected 3 tab-separated fields, found {}",
                    fields.len()
                )));
            }
            let score: f64 = fields[2]
                .trim()
                .parse()
                .map_err(|e: std::num::ParseFloatError| malformed(e.to_string()))?;
            if !(-1.0..=1.0).contains(&score) {
                return Err(malformed(format!("score {score} outside [-1, 1]")));
            }
            table.insert(fields[0], fields[1], score);
        }
        Ok(table)
    }

    /// The recorded scores bundled with the crate.
    pub fn bundled() -> Self {
        Self::parse(include_str!("../data/scores.tsv")).expect("bundled score table is valid")
    }
}

impl EmbeddingProvider for RecordedScores {
    fn pair_score(&self, a: &str, b: &str) -> Result<f64, SimilarityError> {
        self.scores
            .get(&Self::key(a, b))
            .copied()
            .ok_or_else(|| SimilarityError::UnknownPair(a.to_owned(), b.to_owned()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), -1.0);
        assert_eq!(
            cosine(&[1.0], &[1.0, 2.0]),
            Err(SimilarityError::DimensionMismatch(1, 2))
        );
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 2.0]), Err(SimilarityError::ZeroVector));
    }

    #[test]
    fn bundled_scores() {
        let s = RecordedScores::bundled();
        assert_eq!(s.pair_score("Dislike", "Loathing").unwrap(), 0.459);
        assert_eq!(s.pair_score("Revulsion", "dislike").unwrap(), 0.415);
        assert!(s.pair_score("dislike", "joy").is_err());
    }

    #[test]
    fn vector_table_file() {
        let t = VectorTable::parse("# c\nill temper\t1 2 3\nrage\t0 1 0\n").unwrap();
        assert_eq!(t.dim(), 3);
        assert!((t.pair_score("Ill  Temper", "ill temper").unwrap() - 1.0).abs() < 1e-9);
        assert!(t.pair_score("ill", "rage").is_err());
        assert!(VectorTable::parse("a\t1 2\nb\t1\n").is_err());
        assert!(VectorTable::parse("a\t1 x\n").is_err());
    }

    #[test]
    fn malformed_scores() {
        assert!(RecordedScores::parse("a\tb\n").is_err());
        assert!(RecordedScores::parse("a\tb\t1.5\n").is_err());
    }

    proptest! {
        #[test]
        fn cosine_scale_invariant(
            u in prop::collection::vec(-100.0f64..100.0, 4),
            v in prop::collection::vec(-100.0f64..100.0, 4),
            k in 0.01f64..100.0,
        ) {
            prop_assume!(u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3));
            let scaled: Vec<f64> = u.iter().map(|x| x * k).collect();
            let a = cosine(&u, &v).unwrap();
            let b = cosine(&scaled, &v).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
            prop_assert!((-1.0..=1.0).contains(&a));
        }

        #[test]
        fn vector_pair_score_symmetric(
            u in prop::collection::vec(-10.0f64..10.0, 3),
            v in prop::collection::vec(-10.0f64..10.0, 3),
        ) {
            prop_assume!(u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3));
            let mut t = VectorTable::new();
            t.insert("alpha", u).unwrap();
            t.insert("beta", v).unwrap();
            prop_assert_eq!(t.pair_score("alpha", "beta").unwrap(), t.pair_score("beta", "alpha").unwrap());
        }
    }
}
