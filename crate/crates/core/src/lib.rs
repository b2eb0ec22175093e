//! Toolkit for probing where text-to-speech systems place intonational phrase
//! boundaries.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! - [`stimuli`] builds controlled sentence sets (garden-path, PP-attachment,
//!   corpus sentences under four comma/syntax cue conditions, function-word
//!   evaluation sets) and finetuning manifests.
//! - [`textgrid`] reads forced-alignment output and lines it up with the
//!   stimulus tokens; [`prosody`] turns that into durational boundary cues
//!   (pre-boundary lengthening and pause duration).
//! - [`syntax`] ingests CoNLL-U and bracketed trees, selects corpus sentences,
//!   detects clause boundaries and extracts positional predictors.
//! - [`score`] computes pause precision/recall/F1 at syntactic vs.
//!   non-syntactic positions and audits corpora; [`lasso`] fits sparse
//!   regressions explaining boundary durations from textual cues.
//!
//! All token indices across the crate refer to the word sequence produced by
//! [`text::words`]: whitespace split with punctuation detached and dropped.

pub mod cli;
pub mod error;
pub mod lasso;
pub mod prosody;
pub mod score;
pub mod stimuli;
pub mod syntax;
pub mod text;
pub mod textgrid;

pub use error::{Error, Result};

/// Version string embedded in every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
