use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Condition, ConditionedStimulus, StimulusError};
use crate::text;

/// Transcript of a corpus utterance together with the word indices of
/// prepositions that the audio precedes with a pause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditedUtterance {
    pub utterance_id: String,
    pub transcript: String,
    pub audio_path: String,
    pub pause_before_preposition: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinetuneManifestEntry {
    pub utterance_id: String,
    pub original_text: String,
    pub stripped_text: String,
    pub audio_path: String,
    pub intended_pause_indices: Vec<usize>,
}

pub enum FinetuneSource<'a> {
    /// Keep audited corpus utterances with at least one pause before a
    /// preposition.
    Sampled(&'a [AuditedUtterance]),
    /// Draw `per_bias` high- and low-attachment sentences from template
    /// stimuli. High attachment comes from the comma controls, the comma
    /// marking where the pause is intended.
    Synthetic { stimuli: &'a [ConditionedStimulus], per_bias: usize, seed: u64, audio_dir: &'a str },
}

pub fn make_finetune_manifests(source: FinetuneSource<'_>) -> Result<Vec<FinetuneManifestEntry>, StimulusError> {
    match source {
        FinetuneSource::Sampled(utts) => Ok(utts
            .iter()
            .filter(|u| !u.pause_before_preposition.is_empty())
            .map(|u| FinetuneManifestEntry {
                utterance_id: u.utterance_id.clone(),
                original_text: u.transcript.clone(),
                stripped_text: text::strip_commas(&u.transcript),
                audio_path: u.audio_path.clone(),
                intended_pause_indices: u.pause_before_preposition.clone(),
            })
            .collect()),
        FinetuneSource::Synthetic { stimuli, per_bias, seed, audio_dir } => {
            let high: Vec<&ConditionedStimulus> =
                stimuli.iter().filter(|s| s.condition == Condition::HighAttach && s.comma_variant).collect();
            let low: Vec<&ConditionedStimulus> =
                stimuli.iter().filter(|s| s.condition == Condition::LowAttach && !s.comma_variant).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(2 * per_bias);
            for (tag, pool) in [("high", high), ("low", low)] {
                if per_bias > 0 && pool.is_empty() {
                    return Err(StimulusError::InvalidTemplate(format!("no {tag}-attachment stimuli to draw from")));
                }
                for (i, s) in draw_in_passes(&pool, per_bias, &mut rng).into_iter().enumerate() {
                    let utterance_id = format!("ft-{tag}-{:04}", i + 1);
                    out.push(FinetuneManifestEntry {
                        audio_path: format!("{audio_dir}/{utterance_id}.wav"),
                        utterance_id,
                        original_text: s.text.clone(),
                        stripped_text: text::strip_commas(&s.text),
                        intended_pause_indices: s.comma_positions().iter().map(|p| p + 1).collect(),
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Shuffled passes over the pool: no item repeats until every item has been
/// drawn once.
fn draw_in_passes<'a, T>(pool: &[&'a T], count: usize, rng: &mut ChaCha8Rng) -> Vec<&'a T> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut pass = pool.to_vec();
        pass.shuffle(rng);
        out.extend(pass.into_iter().take(count - out.len()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimuli::{generate_attachment, AttachmentTemplate};

    #[test]
    fn sampled_strips_commas_and_keeps_indices() {
        let utts = vec![
            AuditedUtterance {
                utterance_id: "u1".into(),
                transcript: "He left, with the dog".into(),
                audio_path: "u1.wav".into(),
                pause_before_preposition: vec![2],
            },
            AuditedUtterance {
                utterance_id: "u2".into(),
                transcript: "No pause here".into(),
                audio_path: "u2.wav".into(),
                pause_before_preposition: vec![],
            },
        ];
        let out = make_finetune_manifests(FinetuneSource::Sampled(&utts)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].stripped_text, "He left with the dog");
        assert_eq!(out[0].intended_pause_indices, vec![2]);
        assert_eq!(text::words(&out[0].stripped_text)[2], "with");
    }

    #[test]
    fn comma_free_transcript_is_unchanged() {
        let utts = vec![AuditedUtterance {
            utterance_id: "u".into(),
            transcript: "He sat on the bench".into(),
            audio_path: "u.wav".into(),
            pause_before_preposition: vec![2],
        }];
        let out = make_finetune_manifests(FinetuneSource::Sampled(&utts)).unwrap();
        assert_eq!(out[0].stripped_text, out[0].original_text);
    }

    #[test]
    fn synthetic_counts_and_pause_marks() {
        let t: AttachmentTemplate = serde_json::from_str(include_str!("../../data/attachment_template.json")).unwrap();
        let stimuli = generate_attachment(&t).unwrap();
        let out = make_finetune_manifests(FinetuneSource::Synthetic {
            stimuli: &stimuli,
            per_bias: 2500,
            seed: 13,
            audio_dir: "audio",
        })
        .unwrap();
        assert_eq!(out.len(), 5000);
        let (high, low): (Vec<_>, Vec<_>) = out.iter().partition(|e| e.utterance_id.starts_with("ft-high"));
        assert_eq!(high.len(), 2500);
        assert_eq!(low.len(), 2500);
        for e in &high {
            assert!(!e.stripped_text.contains(','));
            assert_eq!(e.intended_pause_indices.len(), 1);
            assert_eq!(text::words(&e.stripped_text)[e.intended_pause_indices[0]], "with");
        }
        assert!(low.iter().all(|e| e.intended_pause_indices.is_empty()));
        // First pass covers the whole pool before anything repeats.
        let first: std::collections::BTreeSet<_> = high.iter().take(1296).map(|e| &e.original_text).collect();
        assert_eq!(first.len(), 1296);
    }
}
