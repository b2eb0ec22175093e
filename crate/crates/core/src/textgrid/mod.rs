//! Praat TextGrid ingestion for forced-aligner output.

mod matching;
mod parse;
mod serialize;

use serde::{Deserialize, Serialize};

pub use matching::{match_tokens, match_words, MatchError, TokenAlignment};
pub use parse::{decode_bytes, parse_textgrid, read_textgrid, TextGridError};
pub use serialize::{to_long_format, to_short_format};

/// Default minimum pause length in seconds.
pub const DEFAULT_MIN_PAUSE: f64 = 0.01;

/// Tolerance for time arithmetic (seconds).
pub const TIME_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub label: String,
}

impl Interval {
    pub fn new(start: f64, end: f64, label: impl Into<String>) -> Self {
        Interval { start, end, label: label.into() }
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_silence(&self) -> bool {
        is_silence(&self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    pub name: String,
    pub intervals: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub xmin: f64,
    pub xmax: f64,
    pub tiers: Vec<Tier>,
}

impl Alignment {
    pub fn tier(&self, name: &str) -> Option<&Tier> {
        self.tiers.iter().find(|t| t.name == name)
    }

    /// Tier named `suffix`, or ending in it (multi-speaker aligner output
    /// names tiers like `"spk1 - words"`).
    fn tier_by_suffix(&self, suffix: &str) -> Option<&Tier> {
        self.tier(suffix).or_else(|| self.tiers.iter().find(|t| t.name.to_lowercase().ends_with(suffix)))
    }

    pub fn words(&self) -> Option<&Tier> {
        self.tier_by_suffix("words")
    }

    pub fn phones(&self) -> Option<&Tier> {
        self.tier_by_suffix("phones")
    }

    /// Non-silent word intervals in order.
    pub fn spoken_words(&self) -> Vec<&Interval> {
        self.words().map(|t| t.intervals.iter().filter(|i| !i.is_silence()).collect()).unwrap_or_default()
    }
}

/// Labels the aligner uses for unannotated stretches.
pub fn is_silence(label: &str) -> bool {
    matches!(label.trim(), "" | "sil" | "sp" | "spn")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pause {
    /// Index of the spoken word the pause follows.
    pub after_word: usize,
    pub duration: f64,
}

/// Silent stretches strictly between two spoken words, at least `min_dur`
/// long. Adjacent silent intervals are merged; leading and trailing silence
/// is never reported.
pub fn extract_pauses(alignment: &Alignment, min_dur: f64) -> Vec<Pause> {
    let Some(words) = alignment.words() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut spoken: Option<usize> = None;
    let mut gap = 0.0;
    for iv in &words.intervals {
        if iv.is_silence() {
            if spoken.is_some() {
                gap += iv.duration();
            }
        } else {
            if let Some(prev) = spoken {
                if gap > 0.0 && gap >= min_dur - 1e-9 {
                    out.push(Pause { after_word: prev, duration: gap });
                }
            }
            spoken = Some(spoken.map_or(0, |w| w + 1));
            gap = 0.0;
        }
    }
    out
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn words_alignment(xmax: f64, words: &[(f64, f64, &str)]) -> Alignment {
        Alignment {
            xmin: 0.0,
            xmax,
            tiers: vec![Tier {
                name: "words".into(),
                intervals: words.iter().map(|&(s, e, l)| Interval::new(s, e, l)).collect(),
            }],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::words_alignment;
    use super::*;

    #[test]
    fn pause_between_words() {
        let a = words_alignment(1.0, &[(0.0, 0.5, "most"), (0.5, 0.62, ""), (0.62, 1.0, "links")]);
        let p = extract_pauses(&a, 0.01);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].after_word, 0);
        assert!((p[0].duration - 0.12).abs() < 1e-9);
        assert!(extract_pauses(&a, 0.2).is_empty());
    }

    #[test]
    fn edge_silence_is_not_a_pause() {
        let a = words_alignment(
            1.6,
            &[(0.0, 0.3, ""), (0.3, 0.8, "most"), (0.8, 1.2, "links"), (1.2, 1.6, "sil")],
        );
        assert!(extract_pauses(&a, 0.01).is_empty());
    }

    #[test]
    fn adjacent_silences_merge() {
        let a = words_alignment(1.0, &[(0.0, 0.4, "a"), (0.4, 0.5, "sp"), (0.5, 0.6, ""), (0.6, 1.0, "b")]);
        let p = extract_pauses(&a, 0.15);
        assert_eq!(p.len(), 1);
        assert!((p[0].duration - 0.2).abs() < 1e-9);
    }

    #[test]
    fn phone_tier_does_not_change_pauses() {
        let mut a = words_alignment(1.0, &[(0.0, 0.5, "most"), (0.5, 0.62, ""), (0.62, 1.0, "links")]);
        let before = extract_pauses(&a, 0.01);
        a.tiers.push(Tier {
            name: "phones".into(),
            intervals: vec![Interval::new(0.0, 0.3, "M"), Interval::new(0.3, 0.7, ""), Interval::new(0.7, 1.0, "L")],
        });
        assert_eq!(extract_pauses(&a, 0.01), before);
    }

    #[test]
    fn silence_labels() {
        for l in ["", " ", "sil", "sp", "spn"] {
            assert!(is_silence(l));
        }
        assert!(!is_silence("<unk>"));
    }
}
