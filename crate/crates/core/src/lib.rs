//! Vocabulary distillation and transfer for LaTeX formula recognition.
//!
//! The crate builds a compact rule-based LaTeX tokenizer from a macro
//! catalog, normalizes formula corpora, maps the distilled vocabulary onto a
//! large BPE tokenizer and mean-pools the base model's embedding rows into
//! matrices sized for the new vocabulary.
//!
//! Pipeline overview:
//!
//! 1. [`catalog::load_catalog`] + [`catalog::build_vocab`] produce a
//!    [`CuratedVocabulary`].
//! 2. [`normalizer::normalize`] canonicalizes raw formulas.
//! 3. [`tokenizer::encode`] / [`tokenizer::decode`] convert between LaTeX and
//!    curated ids, dropping whitespace.
//! 4. [`transfer::build_mapping`] and [`transfer::transfer_embeddings`]
//!    re-map a [`BaseTokenizer`]'s embedding matrices.
//! 5. [`eval`] measures sequence lengths and sequence metrics on corpora.

pub mod bpe;
pub mod catalog;
pub mod error;
pub mod eval;
pub mod normalizer;
pub mod tensor;
pub mod tokenizer;
pub mod transfer;

pub use bpe::BaseTokenizer;
pub use catalog::{CuratedVocabulary, MacroCatalog};
pub use error::{Error, Result};
pub use normalizer::NormalizationRuleset;
pub use tensor::EmbeddingMatrix;
pub use transfer::TokenMapping;
