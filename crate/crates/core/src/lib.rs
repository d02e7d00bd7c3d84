pub mod applications;
pub mod cli;
pub mod dependencies;
pub mod hierarchy;
pub mod lexicon;
pub mod ontology;
pub mod owl;
pub mod pipeline;
pub mod query;
pub mod similarity;
pub mod text;
pub mod vocabulary;
