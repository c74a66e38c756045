//! Morphology-aware diagnostics for subword tokenizers.
//!
//! Load gold morphological analyses ([`morphdata`]), tokenize their surface
//! words with one of several schemes ([`tokenizers`]), and score the result
//! with boundary, lemma, granularity, sequence and affix metrics
//! ([`metrics`], [`pipeline`]). [`wptrainer`] trains WordPiece vocabularies
//! and [`coverage`] measures top-K word vocabulary coverage.

pub mod coverage;
pub mod error;
pub mod metrics;
pub mod morphdata;
pub mod normalize;
pub mod pipeline;
pub mod report;
pub mod tokenizers;
pub mod wptrainer;

pub use error::{Error, LineError, Result};
