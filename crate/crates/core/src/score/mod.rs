//! Syntactic sensitivity scoring and training-corpus audits.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::prosody::{BoundaryMeasurement, Site};
use crate::text;
use crate::textgrid::TokenAlignment;

/// Frequent prepositions checked by the corpus audit.
pub const DEFAULT_PREPOSITIONS: [&str; 9] = ["of", "to", "in", "for", "with", "as", "at", "on", "by"];

pub fn default_prepositions() -> BTreeSet<String> {
    DEFAULT_PREPOSITIONS.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("stimulus {0} contains a comma; scoring is defined on comma-free text")]
    CommaBearing(String),
    #[error("duplicate {site:?} measurement for {source_id} (seed {seed})")]
    Duplicate { source_id: String, seed: u64, site: Site },
    #[error("{source_id} (seed {seed}) has no {site:?} measurement")]
    MissingSite { source_id: String, seed: u64, site: Site },
    #[error("stimulus {0}: measurement is neither at A nor at B")]
    UnmarkedSite(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl SensitivityCounts {
    /// Direct rule on pause durations at A (boundary) and B (non-boundary)
    /// sites.
    pub fn from_pauses(at_a: &[f64], at_b: &[f64], threshold: f64) -> Self {
        let paused = |d: &&f64| **d >= threshold;
        let tp = at_a.iter().filter(paused).count() as u64;
        let fp = at_b.iter().filter(paused).count() as u64;
        SensitivityCounts { tp, fn_: at_a.len() as u64 - tp, fp, tn: at_b.len() as u64 - fp }
    }
}

/// Counts pauses at A and B. Each (source, seed) must contribute exactly
/// one A and one B measurement, all from comma-free stimuli.
pub fn classify(ms: &[BoundaryMeasurement], threshold: f64) -> Result<SensitivityCounts, ScoreError> {
    let mut seen: BTreeMap<(&str, u64), [Option<f64>; 2]> = BTreeMap::new();
    for m in ms {
        if m.comma_variant {
            return Err(ScoreError::CommaBearing(m.stimulus_id.clone()));
        }
        let slot = match m.site {
            Site::A => 0,
            Site::B => 1,
            Site::Other => return Err(ScoreError::UnmarkedSite(m.stimulus_id.clone())),
        };
        let entry = seen.entry((&m.source_id, m.seed)).or_default();
        if entry[slot].replace(m.pause_dur).is_some() {
            return Err(ScoreError::Duplicate { source_id: m.source_id.clone(), seed: m.seed, site: m.site });
        }
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for ((source, seed), [pa, pb]) in seen {
        let missing = |site| ScoreError::MissingSite { source_id: source.to_string(), seed, site };
        a.push(pa.ok_or_else(|| missing(Site::A))?);
        b.push(pb.ok_or_else(|| missing(Site::B))?);
    }
    Ok(SensitivityCounts::from_pauses(&a, &b, threshold))
}

/// A ratio that may have a zero denominator. Serialized as a number or the
/// string `"undefined"`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Metric {
    Defined(f64),
    #[default]
    Undefined,
}

impl Metric {
    pub fn ratio(num: f64, den: f64) -> Metric {
        if den > 0.0 {
            Metric::Defined(num / den)
        } else {
            Metric::Undefined
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Defined(v) => Some(v),
            Metric::Undefined => None,
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Defined(v) => s.serialize_f64(*v),
            Metric::Undefined => s.serialize_str("undefined"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Metric::Defined(v)),
            Raw::Str(s) if s == "undefined" => Ok(Metric::Undefined),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"undefined\", got \"{s}\""))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Defined(v) => write!(f, "{v}"),
            Metric::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub counts: SensitivityCounts,
    pub precision: Metric,
    pub recall: Metric,
    pub f1: Metric,
    /// F1 was set to 0 because there are no true positives.
    pub f1_zero_tp: bool,
}

pub fn sensitivity_score(c: SensitivityCounts) -> SensitivityReport {
    let precision = Metric::ratio(c.tp as f64, (c.tp + c.fp) as f64);
    let recall = Metric::ratio(c.tp as f64, (c.tp + c.fn_) as f64);
    let (f1, f1_zero_tp) = match (c.tp, precision, recall) {
        (0, _, _) => (Metric::Defined(0.0), true),
        (_, Metric::Defined(p), Metric::Defined(r)) => (Metric::Defined(2.0 * p * r / (p + r)), false),
        _ => (Metric::Undefined, false),
    };
    SensitivityReport { counts: c, precision, recall, f1, f1_zero_tp }
}

/// Position-level overlap of prepositions, preceding commas and preceding
/// pauses across a corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OverlapCounts {
    pub n_utterances: u64,
    pub n_positions: u64,
    pub n_prepositions: u64,
    pub n_commas: u64,
    pub n_pauses: u64,
    pub preposition_pause: u64,
    pub preposition_comma: u64,
    pub comma_pause: u64,
    pub all_three: u64,
    /// Positions with at least one of the three properties, counted directly.
    pub union: u64,
    /// The same via inclusion-exclusion.
    pub union_inclusion_exclusion: u64,
    pub prepositions_without_pause: u64,
    pub prepositions_with_pause: u64,
    /// `prepositions_without_pause / prepositions_with_pause`.
    pub without_to_with_pause_ratio: Metric,
}

impl OverlapCounts {
    pub fn is_consistent(&self) -> bool {
        let pairs_ok = self.preposition_pause <= self.n_prepositions.min(self.n_pauses)
            && self.preposition_comma <= self.n_prepositions.min(self.n_commas)
            && self.comma_pause <= self.n_commas.min(self.n_pauses);
        let triple_ok = self.all_three <= self.preposition_pause.min(self.preposition_comma).min(self.comma_pause);
        pairs_ok && triple_ok && self.union == self.union_inclusion_exclusion
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PositionFlags {
    preposition: bool,
    comma: bool,
    pause: bool,
}

/// "Preceded by" means immediately: a comma right after the previous word,
/// or a pause the alignment places after it.
fn position_flags(transcript: &str, ta: &TokenAlignment, prepositions: &BTreeSet<String>) -> Vec<PositionFlags> {
    let words = text::words(transcript);
    let commas: BTreeSet<usize> = text::comma_positions(transcript).into_iter().collect();
    (0..words.len())
        .map(|i| PositionFlags {
            preposition: prepositions.contains(&text::normalize_word(&words[i])),
            comma: i > 0 && commas.contains(&(i - 1)),
            pause: i > 0 && ta.pause_after(i - 1) > 0.0,
        })
        .collect()
}

/// Word indices of prepositions preceded by a pause.
pub fn pause_before_prepositions(transcript: &str, ta: &TokenAlignment, prepositions: &BTreeSet<String>) -> Vec<usize> {
    position_flags(transcript, ta, prepositions)
        .into_iter()
        .enumerate()
        .filter(|(_, f)| f.preposition && f.pause)
        .map(|(i, _)| i)
        .collect()
}

/// `utts` pairs each transcript with its alignment, whose pauses are
/// already thresholded.
pub fn corpus_audit(utts: &[(String, TokenAlignment)], prepositions: &BTreeSet<String>) -> OverlapCounts {
    let mut c = OverlapCounts { n_utterances: utts.len() as u64, ..Default::default() };
    for (transcript, ta) in utts {
        for f in position_flags(transcript, ta, prepositions) {
            let b = |x: bool| u64::from(x);
            c.n_positions += 1;
            c.n_prepositions += b(f.preposition);
            c.n_commas += b(f.comma);
            c.n_pauses += b(f.pause);
            c.preposition_pause += b(f.preposition && f.pause);
            c.preposition_comma += b(f.preposition && f.comma);
            c.comma_pause += b(f.comma && f.pause);
            c.all_three += b(f.preposition && f.comma && f.pause);
            c.union += b(f.preposition || f.comma || f.pause);
        }
    }
    c.union_inclusion_exclusion = c.n_prepositions + c.n_commas + c.n_pauses + c.all_three
        - c.preposition_pause
        - c.preposition_comma
        - c.comma_pause;
    c.prepositions_with_pause = c.preposition_pause;
    c.prepositions_without_pause = c.n_prepositions - c.preposition_pause;
    c.without_to_with_pause_ratio = Metric::ratio(c.prepositions_without_pause as f64, c.prepositions_with_pause as f64);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimuli::Condition;
    use crate::textgrid::{fixtures::words_alignment, match_words};
    use proptest::prelude::*;

    fn m(source: &str, site: Site, pause: f64) -> BoundaryMeasurement {
        BoundaryMeasurement {
            stimulus_id: format!("{source}-x"),
            source_id: source.into(),
            condition: if site == Site::A { Condition::SyntaxOnly } else { Condition::NoCue },
            comma_variant: false,
            seed: 0,
            position: 0,
            site,
            word: "w".into(),
            syllables: 1,
            pre_word_dur: 0.3,
            pre_word_dur_per_syll: 0.3,
            pause_dur: pause,
            category: None,
        }
    }

    #[test]
    fn direct_rule() {
        let c = SensitivityCounts::from_pauses(&[0.1, 0.0, 0.2], &[0.0, 0.0, 0.05], 0.01);
        assert_eq!(c, SensitivityCounts { tp: 2, fn_: 1, fp: 1, tn: 2 });
        let silent = SensitivityCounts::from_pauses(&[0.0; 4], &[0.0; 4], 0.01);
        assert_eq!(silent, SensitivityCounts { tp: 0, fn_: 4, fp: 0, tn: 4 });
    }

    #[test]
    fn classify_pairs_sites_by_source() {
        let ms = vec![m("s1", Site::A, 0.1), m("s1", Site::B, 0.0), m("s2", Site::B, 0.05), m("s2", Site::A, 0.0)];
        assert_eq!(classify(&ms, 0.01).unwrap(), SensitivityCounts { tp: 1, fn_: 1, fp: 1, tn: 1 });
    }

    #[test]
    fn classify_errors() {
        let mut comma = m("s1", Site::A, 0.1);
        comma.comma_variant = true;
        assert!(matches!(classify(&[comma], 0.01), Err(ScoreError::CommaBearing(_))));
        assert!(matches!(classify(&[m("s1", Site::A, 0.1)], 0.01), Err(ScoreError::MissingSite { .. })));
        let dup = vec![m("s1", Site::A, 0.1), m("s1", Site::A, 0.1), m("s1", Site::B, 0.0)];
        assert!(matches!(classify(&dup, 0.01), Err(ScoreError::Duplicate { .. })));
    }

    #[test]
    fn scores() {
        let r = sensitivity_score(SensitivityCounts { tp: 3, fp: 1, fn_: 1, tn: 5 });
        assert_eq!((r.precision, r.recall, r.f1), (Metric::Defined(0.75), Metric::Defined(0.75), Metric::Defined(0.75)));
        let r = sensitivity_score(SensitivityCounts { tp: 4, fp: 0, fn_: 0, tn: 4 });
        assert_eq!((r.precision, r.recall, r.f1), (Metric::Defined(1.0), Metric::Defined(1.0), Metric::Defined(1.0)));
        let r = sensitivity_score(SensitivityCounts { tp: 0, fp: 2, fn_: 3, tn: 1 });
        assert_eq!((r.precision, r.recall, r.f1, r.f1_zero_tp), (Metric::Defined(0.0), Metric::Defined(0.0), Metric::Defined(0.0), true));
        let r = sensitivity_score(SensitivityCounts { tp: 0, fp: 0, fn_: 3, tn: 1 });
        assert_eq!(r.precision, Metric::Undefined);
        assert_eq!(serde_json::to_string(&r.precision).unwrap(), "\"undefined\"");
    }

    #[test]
    fn audit_triple() {
        let t = "He left, with the dog";
        let a = words_alignment(
            2.0,
            &[(0.0, 0.3, "he"), (0.3, 0.7, "left"), (0.7, 0.9, ""), (0.9, 1.2, "with"), (1.2, 1.5, "the"), (1.5, 2.0, "dog")],
        );
        let ta = match_words(&text::words(t), &a, 0.01).unwrap();
        let c = corpus_audit(&[(t.to_string(), ta.clone())], &default_prepositions());
        assert_eq!((c.n_prepositions, c.n_commas, c.n_pauses, c.all_three), (1, 1, 1, 1));
        assert!(c.is_consistent());
        assert_eq!(pause_before_prepositions(t, &ta, &default_prepositions()), vec![2]);
        assert_eq!(c.without_to_with_pause_ratio, Metric::Defined(0.0));
    }

    #[test]
    fn audit_without_commas() {
        let t = "He sat on the bench";
        let a = words_alignment(1.5, &[(0.0, 0.3, "he"), (0.3, 0.6, "sat"), (0.6, 0.9, "on"), (0.9, 1.2, "the"), (1.2, 1.5, "bench")]);
        let c = corpus_audit(&[(t.to_string(), match_words(&text::words(t), &a, 0.01).unwrap())], &default_prepositions());
        assert_eq!((c.n_commas, c.preposition_comma, c.comma_pause, c.all_three), (0, 0, 0, 0));
        assert_eq!(c.without_to_with_pause_ratio, Metric::Undefined);
        let empty = corpus_audit(&[], &default_prepositions());
        assert_eq!(empty.n_positions, 0);
        assert!(empty.is_consistent());
    }

    proptest! {
        #[test]
        fn bounded_and_f1_zero_iff_no_tp(tp in 0u64..50, fp in 0u64..50, fn_ in 0u64..50, tn in 0u64..50) {
            let r = sensitivity_score(SensitivityCounts { tp, fp, fn_, tn });
            for v in [r.precision, r.recall, r.f1].iter().filter_map(|m| m.value()) {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert_eq!(r.f1 == Metric::Defined(0.0), tp == 0);
        }

        #[test]
        fn threshold_monotone(a in prop::collection::vec(0.0f64..0.5, 1..30), b in prop::collection::vec(0.0f64..0.5, 1..30), t1 in 0.0f64..0.5, dt in 0.0f64..0.5) {
            let lo = SensitivityCounts::from_pauses(&a, &b, t1);
            let hi = SensitivityCounts::from_pauses(&a, &b, t1 + dt);
            prop_assert!(hi.tp <= lo.tp && hi.fp <= lo.fp);
        }

        #[test]
        fn inclusion_exclusion(flags in prop::collection::vec((any::<bool>(), any::<bool>(), 0u8..3), 1..15)) {
            // Build "w0 w1, with ..." style sentences from random flags.
            let mut words = Vec::new();
            let mut ivs = Vec::new();
            let mut t = 0.0;
            for (i, (prep, comma, pause)) in flags.iter().enumerate() {
                let w = if *prep { "with".to_string() } else { format!("w{i}") };
                words.push(if *comma { format!("{w},") } else { w.clone() });
                ivs.push((t, t + 0.3, w));
                t += 0.3;
                if *pause > 0 {
                    ivs.push((t, t + 0.1 * f64::from(*pause), String::new()));
                    t += 0.1 * f64::from(*pause);
                }
            }
            let text = words.join(" ");
            let ivs: Vec<(f64, f64, &str)> = ivs.iter().map(|(s, e, l)| (*s, *e, l.as_str())).collect();
            let ta = match_words(&text::words(&text), &words_alignment(t, &ivs), 0.01).unwrap();
            let c = corpus_audit(&[(text, ta)], &default_prepositions());
            prop_assert!(c.is_consistent());
        }
    }
}
