use serde::{Deserialize, Serialize};

use super::{detect_clause_boundary, ClauseRelations, ParsedSentence};
use crate::stimuli::CorpusSentence;
use crate::text;

pub const MIN_WORDS: usize = 7;
pub const MAX_WORDS: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub sent_id: String,
    pub text: String,
    pub accepted: bool,
    pub reason: String,
    pub position_a: Option<usize>,
    pub label: Option<String>,
}

impl SelectionRecord {
    pub fn to_corpus_sentence(&self) -> Option<CorpusSentence> {
        self.accepted.then(|| CorpusSentence {
            id: self.sent_id.clone(),
            text: self.text.clone(),
            position_a: self.position_a.expect("accepted records carry position A"),
            label: self.label.clone(),
        })
    }
}

/// Accepts sentences with a single comma sitting at a clause boundary.
/// Rules are checked in order and the first failure is the reason.
pub fn filter_corpus_sentence(s: &ParsedSentence, relations: &ClauseRelations) -> SelectionRecord {
    let text = s.raw_text.trim();
    let reject = |reason: &str| SelectionRecord {
        sent_id: s.sent_id.clone(),
        text: text.to_string(),
        accepted: false,
        reason: reason.to_string(),
        position_a: None,
        label: None,
    };
    let commas = text.matches(',').count();
    if commas != 1 {
        return reject(&format!("{commas} commas"));
    }
    if text.chars().any(|c| c.is_ascii_digit()) {
        return reject("digits");
    }
    if text.chars().any(|c| matches!(c, '(' | ')' | '[' | ']' | '{' | '}')) {
        return reject("bracketed phrase");
    }
    let body = text.strip_suffix('.').unwrap_or(text);
    if body.chars().any(|c| !c.is_alphanumeric() && !c.is_whitespace() && c != ',') {
        return reject("other punctuation");
    }
    let n = text::words(text).len();
    if !(MIN_WORDS..=MAX_WORDS).contains(&n) {
        return reject(&format!("{n} words"));
    }
    if s.word_to_token().is_none() {
        return reject("tokenization mismatch");
    }
    let a = text::comma_positions(text)[0];
    match detect_clause_boundary(s, a, relations) {
        (true, label) => SelectionRecord {
            sent_id: s.sent_id.clone(),
            text: text.to_string(),
            accepted: true,
            reason: "accepted".into(),
            position_a: Some(a),
            label,
        },
        (false, _) => reject("comma is not at a clause boundary"),
    }
}
