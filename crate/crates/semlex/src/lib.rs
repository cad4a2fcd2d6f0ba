//! Bootstraps category lexicons and compound-noun lists from bracketed
//! treebank corpora.
//!
//! The pipeline parses Penn-style bracketed trees, lemmatizes nouns,
//! counts head-noun co-occurrences inside conjunction and appositive
//! constructions, and then grows a small seed list in two phases: a
//! selection-ratio pass that decides which nouns belong to the category at
//! all, and a log-likelihood pass that ranks the survivors. Compounds
//! headed by accepted nouns are scored and listed afterwards.

pub mod bootstrap;
pub mod cli;
pub mod compound;
pub mod extract;
pub mod morph;
pub mod stats;
pub mod synth;
pub mod treebank;
