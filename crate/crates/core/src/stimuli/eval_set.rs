use serde::{Deserialize, Serialize};

use super::{split_regions, Condition, ConditionedStimulus, StimulusError};
use crate::text;

pub const EVAL_SENTENCES_PER_CATEGORY: usize = 30;

/// A sentence is either plain text (critical word found by its first
/// occurrence) or text with an explicit word index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EvalSentence {
    Plain(String),
    Indexed { text: String, critical_index: usize },
}

impl EvalSentence {
    pub fn text(&self) -> &str {
        match self {
            EvalSentence::Plain(t) | EvalSentence::Indexed { text: t, .. } => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCategory {
    /// The function word, e.g. "as".
    pub word: String,
    /// How it is used, e.g. "conjunction".
    pub usage: String,
    /// Whether this usage is associated with a pause before the word.
    pub pause: bool,
    pub sentences: Vec<EvalSentence>,
}

impl EvalCategory {
    pub fn name(&self) -> String {
        format!("{} ({})", self.word, self.usage)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalLexicon {
    pub categories: Vec<EvalCategory>,
}

/// Function-word evaluation set: the first 30 sentences of each category,
/// with the word before the critical function word marked as position A.
pub fn generate_eval_set(lexicon: &EvalLexicon) -> Result<Vec<ConditionedStimulus>, StimulusError> {
    let deficits: Vec<(String, usize)> = lexicon
        .categories
        .iter()
        .filter(|c| c.sentences.len() < EVAL_SENTENCES_PER_CATEGORY)
        .map(|c| (c.name(), EVAL_SENTENCES_PER_CATEGORY - c.sentences.len()))
        .collect();
    if !deficits.is_empty() {
        return Err(StimulusError::InsufficientSentences(deficits));
    }

    let mut out = Vec::new();
    for cat in &lexicon.categories {
        if cat.sentences.len() > EVAL_SENTENCES_PER_CATEGORY {
            log::warn!("{}: using the first {EVAL_SENTENCES_PER_CATEGORY} of {} sentences", cat.name(), cat.sentences.len());
        }
        let slug = format!("{}-{}", cat.word, cat.usage)
            .chars()
            .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
            .collect::<String>();
        for (i, sentence) in cat.sentences.iter().take(EVAL_SENTENCES_PER_CATEGORY).enumerate() {
            let id = format!("eval-{slug}-{:02}", i + 1);
            let words = text::words(sentence.text());
            let invalid = |reason: String| StimulusError::InvalidItem { id: id.clone(), reason };
            let critical = match sentence {
                EvalSentence::Indexed { critical_index, .. } => *critical_index,
                EvalSentence::Plain(_) => words
                    .iter()
                    .position(|w| w.eq_ignore_ascii_case(&cat.word))
                    .ok_or_else(|| invalid(format!("critical word '{}' not found", cat.word)))?,
            };
            if critical == 0 || critical + 1 > words.len() {
                return Err(invalid(format!("critical index {critical} leaves no preceding word")));
            }
            if !words[critical].eq_ignore_ascii_case(&cat.word) {
                return Err(invalid(format!("word {critical} is '{}', not '{}'", words[critical], cat.word)));
            }
            if !text::comma_positions(sentence.text()).is_empty() {
                return Err(invalid("evaluation sentences must be comma-free".into()));
            }
            let a = critical - 1;
            out.push(ConditionedStimulus {
                id: id.clone(),
                source_id: id.clone(),
                text: sentence.text().to_string(),
                condition: if cat.pause { Condition::EvalPause } else { Condition::EvalNoPause },
                comma_variant: false,
                position_a: if critical + 1 < words.len() { Some(a) } else { None },
                position_b: None,
                regions: split_regions(words.len(), &[(a, "pre_critical")], "critical_onward"),
                critical_word: Some(words[critical].clone()),
                critical_index: Some(critical),
                category: Some(cat.name()),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHIPPED: &str = include_str!("../../data/eval_lexicon.json");

    fn category(word: &str, usage: &str, pause: bool, example: &str, n: usize) -> EvalCategory {
        EvalCategory {
            word: word.into(),
            usage: usage.into(),
            pause,
            sentences: (0..n).map(|_| EvalSentence::Plain(example.into())).collect(),
        }
    }

    #[test]
    fn as_conjunction_marks_word_before_as() {
        let lex = EvalLexicon {
            categories: vec![category("as", "conjunction", true, "She left early as she had an important meeting to attend.", 30)],
        };
        let out = generate_eval_set(&lex).unwrap();
        assert_eq!(out.len(), 30);
        let s = &out[0];
        assert_eq!(s.critical_word.as_deref(), Some("as"));
        assert_eq!(s.critical_index, Some(3));
        assert_eq!(s.position_a, Some(2));
        assert_eq!(s.condition, Condition::EvalPause);
        assert_eq!(s.category.as_deref(), Some("as (conjunction)"));
        s.validate().unwrap();
    }

    #[test]
    fn shipped_lexicon_reports_every_deficit() {
        let lex: EvalLexicon = serde_json::from_str(SHIPPED).unwrap();
        assert_eq!(lex.categories.len(), 8);
        match generate_eval_set(&lex) {
            Err(StimulusError::InsufficientSentences(d)) => {
                assert_eq!(d.len(), 8);
                assert!(d.iter().all(|(_, n)| *n == 29));
            }
            other => panic!("expected deficit error, got {other:?}"),
        }
    }

    #[test]
    fn empty_lexicon_gives_empty_set() {
        assert!(generate_eval_set(&EvalLexicon { categories: vec![] }).unwrap().is_empty());
    }

    #[test]
    fn explicit_index_must_point_at_word() {
        let mut c = category("to", "infinitive", true, "The man read the book to learn more about history.", 30);
        c.sentences[0] = EvalSentence::Indexed { text: "The man read the book to learn more.".into(), critical_index: 2 };
        assert!(generate_eval_set(&EvalLexicon { categories: vec![c] }).is_err());
    }
}
