use serde::{Deserialize, Serialize};

use super::{extract_pauses, Alignment, Interval, TIME_EPS};
use crate::stimuli::ConditionedStimulus;
use crate::text;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatchError {
    #[error("alignment has no words tier")]
    NoWordsTier,
    #[error("token count mismatch: stimulus has {expected} words, alignment has {found}")]
    Count { expected: usize, found: usize },
    #[error("word {index} mismatch: stimulus '{expected}', alignment '{found}'")]
    Text { index: usize, expected: String, found: String },
}

/// Stimulus words paired with their aligned intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenAlignment {
    pub pairs: Vec<(usize, Interval)>,
    /// `(word index, duration)` for each pause following that word.
    pub pauses: Vec<(usize, f64)>,
    /// Phone labels inside each word interval; empty without a phone tier.
    pub phones: Vec<Vec<String>>,
}

impl TokenAlignment {
    pub fn interval(&self, idx: usize) -> Option<&Interval> {
        self.pairs.get(idx).filter(|(i, _)| *i == idx).map(|(_, iv)| iv)
    }

    pub fn pause_after(&self, idx: usize) -> f64 {
        self.pauses.iter().find(|(i, _)| *i == idx).map_or(0.0, |&(_, d)| d)
    }
}

/// Positional one-to-one matching of `words` against the spoken intervals.
/// Comparison ignores case and non-alphanumeric characters.
pub fn match_words(words: &[String], alignment: &Alignment, min_dur: f64) -> Result<TokenAlignment, MatchError> {
    alignment.words().ok_or(MatchError::NoWordsTier)?;
    let spoken = alignment.spoken_words();
    if spoken.len() != words.len() {
        return Err(MatchError::Count { expected: words.len(), found: spoken.len() });
    }
    for (index, (w, iv)) in words.iter().zip(&spoken).enumerate() {
        if text::normalize_word(w) != text::normalize_word(&iv.label) {
            return Err(MatchError::Text { index, expected: w.clone(), found: iv.label.clone() });
        }
    }
    let phones = match alignment.phones() {
        Some(tier) => spoken
            .iter()
            .map(|w| {
                tier.intervals
                    .iter()
                    .filter(|p| !p.is_silence() && p.start >= w.start - TIME_EPS && p.end <= w.end + TIME_EPS)
                    .map(|p| p.label.clone())
                    .collect()
            })
            .collect(),
        None => vec![Vec::new(); spoken.len()],
    };
    Ok(TokenAlignment {
        pairs: spoken.into_iter().cloned().enumerate().collect(),
        pauses: extract_pauses(alignment, min_dur).into_iter().map(|p| (p.after_word, p.duration)).collect(),
        phones,
    })
}

pub fn match_tokens(stim: &ConditionedStimulus, alignment: &Alignment, min_dur: f64) -> Result<TokenAlignment, MatchError> {
    match_words(&stim.words(), alignment, min_dur)
}
