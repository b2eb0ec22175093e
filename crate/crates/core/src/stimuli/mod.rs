//! Controlled stimulus sets and synthesis/finetuning manifests.

mod attachment;
mod cue;
mod eval_set;
mod finetune;
mod garden_path;
mod manifest;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::text;

pub use attachment::{generate_attachment, generate_attachment_with_arity, AttachmentTemplate, SLOT_SIZE};
pub use cue::{apply_all_cue_conditions, apply_cue_condition, select_position_b, CorpusSentence};
pub use eval_set::{generate_eval_set, EvalCategory, EvalLexicon, EvalSentence, EVAL_SENTENCES_PER_CATEGORY};
pub use finetune::{make_finetune_manifests, AuditedUtterance, FinetuneManifestEntry, FinetuneSource};
pub use garden_path::{generate_garden_path, parse_garden_path_tsv, GardenPathItem};
pub use manifest::{build_manifest, read_jsonl, utterance_id, write_jsonl, SynthesisJob};

#[derive(Debug, thiserror::Error)]
pub enum StimulusError {
    #[error("item {id}: {reason}")]
    InvalidItem { id: String, reason: String },
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("sentence {id} skipped: {reason}")]
    NoPositionB { id: String, reason: String },
    #[error("eval lexicon short of sentences: {}", format_deficits(.0))]
    InsufficientSentences(Vec<(String, usize)>),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn format_deficits(d: &[(String, usize)]) -> String {
    d.iter().map(|(c, n)| format!("{c} needs {n} more")).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    EarlyClosure,
    LateClosure,
    HighAttach,
    LowAttach,
    CommaSyntax,
    SyntaxOnly,
    UnnaturalComma,
    NoCue,
    EvalPause,
    EvalNoPause,
}

impl Condition {
    pub const ALL: [Condition; 10] = [
        Condition::EarlyClosure,
        Condition::LateClosure,
        Condition::HighAttach,
        Condition::LowAttach,
        Condition::CommaSyntax,
        Condition::SyntaxOnly,
        Condition::UnnaturalComma,
        Condition::NoCue,
        Condition::EvalPause,
        Condition::EvalNoPause,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::EarlyClosure => "early_closure",
            Condition::LateClosure => "late_closure",
            Condition::HighAttach => "high_attach",
            Condition::LowAttach => "low_attach",
            Condition::CommaSyntax => "comma_syntax",
            Condition::SyntaxOnly => "syntax_only",
            Condition::UnnaturalComma => "unnatural_comma",
            Condition::NoCue => "no_cue",
            Condition::EvalPause => "eval_pause",
            Condition::EvalNoPause => "eval_no_pause",
        }
    }

    /// The four cue conditions applied to corpus sentences.
    pub const CUES: [Condition; 4] =
        [Condition::CommaSyntax, Condition::SyntaxOnly, Condition::UnnaturalComma, Condition::NoCue];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Labeled half-open word span `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

impl Region {
    pub fn new(label: impl Into<String>, start: usize, end: usize) -> Self {
        Region { label: label.into(), start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionedStimulus {
    pub id: String,
    /// Shared by all variants built from the same item/sentence; used to pair
    /// observations across conditions.
    pub source_id: String,
    pub text: String,
    pub condition: Condition,
    pub comma_variant: bool,
    pub position_a: Option<usize>,
    pub position_b: Option<usize>,
    pub regions: Vec<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

impl ConditionedStimulus {
    pub fn words(&self) -> Vec<String> {
        text::words(&self.text)
    }

    pub fn comma_positions(&self) -> Vec<usize> {
        text::comma_positions(&self.text)
    }

    /// Checks the structural invariants: regions partition the words, marked
    /// positions are in range, and comma variants carry exactly one comma at a
    /// marked position while other variants carry none.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.words().len();
        let mut cursor = 0;
        for r in &self.regions {
            if r.start != cursor || r.end <= r.start {
                return Err(format!("region '{}' [{}, {}) breaks the partition at {}", r.label, r.start, r.end, cursor));
            }
            cursor = r.end;
        }
        if cursor != n {
            return Err(format!("regions cover {cursor} of {n} words"));
        }
        for (name, p) in [("position_a", self.position_a), ("position_b", self.position_b)] {
            if let Some(p) = p {
                if p + 1 >= n {
                    return Err(format!("{name}={p} is not sentence-internal ({n} words)"));
                }
            }
        }
        let commas = self.comma_positions();
        if self.comma_variant {
            if commas.len() != 1 {
                return Err(format!("comma variant has {} commas", commas.len()));
            }
            if Some(commas[0]) != self.position_a && Some(commas[0]) != self.position_b {
                return Err(format!("comma after word {} is not at a marked position", commas[0]));
            }
        } else if !commas.is_empty() {
            return Err("non-comma variant contains a comma".into());
        }
        Ok(())
    }
}

/// Regions split at the given boundary positions: each boundary closes the
/// region that ends with that word.
pub(crate) fn split_regions(n_words: usize, cuts: &[(usize, &str)], last_label: &str) -> Vec<Region> {
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0;
    for &(pos, label) in cuts {
        out.push(Region::new(label, start, pos + 1));
        start = pos + 1;
    }
    out.push(Region::new(last_label, start, n_words));
    out
}
