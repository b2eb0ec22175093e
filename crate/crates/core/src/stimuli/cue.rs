use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{split_regions, Condition, ConditionedStimulus, StimulusError};
use crate::text;

/// A corpus sentence with a single comma at a clause boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSentence {
    pub id: String,
    pub text: String,
    /// Word right before the comma.
    pub position_a: usize,
    /// Dependency relation that made A a clause boundary.
    #[serde(default)]
    pub label: Option<String>,
}

/// Stable 64-bit FNV-1a, so tie-breaks do not depend on the std hasher.
pub(crate) fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Picks the non-boundary position B for the unnatural-comma and no-cue
/// conditions.
///
/// The target is `ceil(k/2)` words after A, where `k` is the number of words
/// after A. Candidates must not touch punctuation on either side (which also
/// rules out A+1 and the final two words). The nearest valid candidate wins;
/// equidistant candidates are resolved by a generator seeded from `seed` and
/// the sentence id.
pub fn select_position_b(text: &str, position_a: usize, sentence_id: &str, seed: u64) -> Result<usize, String> {
    let n = text::words(text).len();
    if position_a + 1 >= n {
        return Err(format!("position_a {position_a} is not sentence-internal"));
    }
    let mut touched = text::punct_positions(text);
    touched.push(position_a);
    let blocked = |b: usize| {
        touched.iter().any(|&p| p == b || p + 1 == b || b + 1 == p)
    };
    let k = n - position_a - 1;
    let target = position_a + k.div_ceil(2);
    let candidates: Vec<usize> = (position_a + 1..n.saturating_sub(2)).filter(|&b| !blocked(b)).collect();
    let best = candidates.iter().map(|&b| b.abs_diff(target)).min().ok_or_else(|| {
        format!("no admissible position after A={position_a} in a {n}-word sentence")
    })?;
    let ties: Vec<usize> = candidates.into_iter().filter(|&b| b.abs_diff(target) == best).collect();
    if ties.len() == 1 {
        return Ok(ties[0]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(sentence_id));
    Ok(ties[rng.random_range(0..ties.len())])
}

/// Builds the stimulus for one cue condition. Every condition carries both A
/// and the same B, so conditions can be compared at either site.
pub fn apply_cue_condition(
    sentence: &CorpusSentence,
    condition: Condition,
    seed: u64,
) -> Result<ConditionedStimulus, StimulusError> {
    let invalid = |reason: String| StimulusError::InvalidItem { id: sentence.id.clone(), reason };
    let commas = text::comma_positions(&sentence.text);
    if commas != [sentence.position_a] {
        return Err(invalid(format!("expected one comma after word {}, found {:?}", sentence.position_a, commas)));
    }
    let stripped = text::strip_commas(&sentence.text);
    let b = select_position_b(&stripped, sentence.position_a, &sentence.id, seed)
        .map_err(|reason| StimulusError::NoPositionB { id: sentence.id.clone(), reason })?;
    let a = sentence.position_a;
    let (text, comma_variant) = match condition {
        Condition::CommaSyntax => (text::insert_comma_after(&stripped, a), true),
        Condition::SyntaxOnly | Condition::NoCue => (Some(stripped.clone()), false),
        Condition::UnnaturalComma => (text::insert_comma_after(&stripped, b), true),
        other => return Err(invalid(format!("{other} is not a cue condition"))),
    };
    let text = text.ok_or_else(|| invalid("marked position out of range".into()))?;
    let n = text::words(&text).len();
    Ok(ConditionedStimulus {
        id: format!("{}-{}", sentence.id, condition.as_str()),
        source_id: sentence.id.clone(),
        text,
        condition,
        comma_variant,
        position_a: Some(a),
        position_b: Some(b),
        regions: split_regions(n, &[(a, "pre_a"), (b, "a_to_b")], "post_b"),
        critical_word: None,
        critical_index: None,
        category: sentence.label.clone(),
    })
}

/// All four cue conditions, in [`Condition::CUES`] order.
pub fn apply_all_cue_conditions(sentence: &CorpusSentence, seed: u64) -> Result<Vec<ConditionedStimulus>, StimulusError> {
    Condition::CUES.iter().map(|&c| apply_cue_condition(sentence, c, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn links() -> CorpusSentence {
        CorpusSentence {
            id: "wiki-1".into(),
            text: "Most links are blue, but they can be any color.".into(),
            position_a: 3,
            label: Some("conj".into()),
        }
    }

    #[test]
    fn four_conditions_for_links_example() {
        let out = apply_all_cue_conditions(&links(), 13).unwrap();
        let texts: Vec<_> = out.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(
            texts,
            [
                "Most links are blue, but they can be any color.",
                "Most links are blue but they can be any color.",
                "Most links are blue but they can, be any color.",
                "Most links are blue but they can be any color.",
            ]
        );
        for s in &out {
            assert_eq!(s.position_a, Some(3));
            assert_eq!(s.position_b, Some(6));
            assert_eq!(s.words()[6], "can");
            s.validate().unwrap();
        }
    }

    #[test]
    fn short_tail_is_skipped() {
        let s = CorpusSentence {
            id: "short".into(),
            text: "Cats and dogs sleep a lot, they say.".into(),
            position_a: 5,
            label: None,
        };
        assert!(matches!(apply_cue_condition(&s, Condition::NoCue, 1), Err(StimulusError::NoPositionB { .. })));
    }

    #[test]
    fn rejects_non_cue_condition_and_wrong_comma() {
        assert!(apply_cue_condition(&links(), Condition::EarlyClosure, 0).is_err());
        let mut s = links();
        s.position_a = 2;
        assert!(apply_cue_condition(&s, Condition::NoCue, 0).is_err());
    }

    #[test]
    fn tie_break_is_seeded() {
        // k = 7 words after A, target A+4; with blocked targets both sides can tie.
        let text = "One two three four five six seven eight nine ten eleven twelve.";
        let b1 = select_position_b(text, 2, "s", 5).unwrap();
        let b2 = select_position_b(text, 2, "s", 5).unwrap();
        assert_eq!(b1, b2);
    }

    proptest! {
        #[test]
        fn b_is_admissible_and_deterministic(n in 7usize..16, a_frac in 0.0f64..1.0, seed in any::<u64>()) {
            let a = ((n - 2) as f64 * a_frac) as usize;
            let words: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
            let text = format!("{}.", words.join(" "));
            match select_position_b(&text, a, "id", seed) {
                Ok(b) => {
                    prop_assert!(b >= a + 2 && b + 3 <= n, "a={a} b={b} n={n}");
                    prop_assert_eq!(Ok(b), select_position_b(&text, a, "id", seed));
                }
                Err(_) => prop_assert!(a + 2 > n - 3),
            }
        }
    }
}
