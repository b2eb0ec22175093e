use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::ConditionedStimulus;
use crate::error::{Error, Result};

/// One synthesis request. The synthesis driver writes
/// `<wav_path>` and the aligner `<textgrid_path>`, both named by
/// `utterance_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisJob {
    pub utterance_id: String,
    pub stimulus_id: String,
    pub text: String,
    pub seed: u64,
    pub wav_path: String,
    pub textgrid_path: String,
}

pub fn utterance_id(stimulus_id: &str, seed: u64) -> String {
    format!("{stimulus_id}__s{seed}")
}

/// Every stimulus repeated once per synthesis seed.
pub fn build_manifest(stimuli: &[ConditionedStimulus], seeds: &[u64], audio_dir: &str, textgrid_dir: &str) -> Vec<SynthesisJob> {
    let mut jobs = Vec::with_capacity(stimuli.len() * seeds.len());
    for s in stimuli {
        for &seed in seeds {
            let utt = utterance_id(&s.id, seed);
            jobs.push(SynthesisJob {
                wav_path: format!("{audio_dir}/{utt}.wav"),
                textgrid_path: format!("{textgrid_dir}/{utt}.TextGrid"),
                utterance_id: utt,
                stimulus_id: s.id.clone(),
                text: s.text.clone(),
                seed,
            });
        }
    }
    jobs
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut buf = String::new();
    for row in rows {
        buf.push_str(&serde_json::to_string(row).map_err(|e| Error::schema(path.display().to_string(), e.to_string()))?);
        buf.push('\n');
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::schema(format!("{}:{}", path.display(), i + 1), e.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimuli::{generate_garden_path, parse_garden_path_tsv};

    #[test]
    fn manifest_repeats_per_seed() {
        let items = parse_garden_path_tsv(include_str!("../../data/garden_path_items.tsv")).unwrap();
        let stimuli = generate_garden_path(&items[..1]).unwrap();
        let jobs = build_manifest(&stimuli, &[0, 1, 2], "wav", "tg");
        assert_eq!(jobs.len(), 12);
        assert_eq!(jobs[1].utterance_id, "gp01-early__s1");
        assert_eq!(jobs[1].textgrid_path, "tg/gp01-early__s1.TextGrid");
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let items = parse_garden_path_tsv(include_str!("../../data/garden_path_items.tsv")).unwrap();
        let stimuli = generate_garden_path(&items[..2]).unwrap();
        write_jsonl(&path, &stimuli).unwrap();
        let back: Vec<ConditionedStimulus> = read_jsonl(&path).unwrap();
        assert_eq!(back, stimuli);
    }
}
