use serde::{Deserialize, Serialize};

use super::{count_syllables, MeasureError};
use crate::stimuli::{Condition, ConditionedStimulus};
use crate::textgrid::TokenAlignment;

/// Which marked position a measurement was taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    A,
    B,
    Other,
}

impl Site {
    pub fn of(stim: &ConditionedStimulus, pos: usize) -> Site {
        if stim.position_a == Some(pos) {
            Site::A
        } else if stim.position_b == Some(pos) {
            Site::B
        } else {
            Site::Other
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMeasurement {
    pub stimulus_id: String,
    pub source_id: String,
    pub condition: Condition,
    pub comma_variant: bool,
    pub seed: u64,
    pub position: usize,
    pub site: Site,
    pub word: String,
    pub syllables: u32,
    pub pre_word_dur: f64,
    pub pre_word_dur_per_syll: f64,
    pub pause_dur: f64,
    #[serde(default)]
    pub category: Option<String>,
}

/// Pre-boundary word duration and following pause at word `pos`.
pub fn boundary_measures(stim: &ConditionedStimulus, ta: &TokenAlignment, pos: usize, seed: u64) -> Result<BoundaryMeasurement, MeasureError> {
    let unaligned = || MeasureError::Unaligned { stimulus_id: stim.id.clone(), pos };
    let iv = ta.interval(pos).ok_or_else(unaligned)?;
    if pos + 1 >= ta.pairs.len() {
        return Err(MeasureError::NotInternal { stimulus_id: stim.id.clone(), pos });
    }
    let syllables = count_syllables(&iv.label, ta.phones.get(pos).map(Vec::as_slice));
    let dur = iv.duration();
    Ok(BoundaryMeasurement {
        stimulus_id: stim.id.clone(),
        source_id: stim.source_id.clone(),
        condition: stim.condition,
        comma_variant: stim.comma_variant,
        seed,
        position: pos,
        site: Site::of(stim, pos),
        word: iv.label.clone(),
        syllables,
        pre_word_dur: dur,
        pre_word_dur_per_syll: dur / f64::from(syllables),
        pause_dur: ta.pause_after(pos),
        category: stim.category.clone(),
    })
}

/// Measurements at A and B, whichever the stimulus marks.
pub fn measure_marked(stim: &ConditionedStimulus, ta: &TokenAlignment, seed: u64) -> Result<Vec<BoundaryMeasurement>, MeasureError> {
    let mut positions: Vec<usize> = [stim.position_a, stim.position_b].into_iter().flatten().collect();
    positions.sort_unstable();
    positions.dedup();
    positions.into_iter().map(|p| boundary_measures(stim, ta, p, seed)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDuration {
    pub label: String,
    /// First word of the region.
    pub start: usize,
    /// One past the last word.
    pub end: usize,
    /// Last word end minus first word start; pauses inside the region count.
    pub duration: f64,
    /// Gap between this region's last word and the next region's first.
    pub pause_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDurations {
    pub stimulus_id: String,
    pub source_id: String,
    pub condition: Condition,
    pub seed: u64,
    pub regions: Vec<RegionDuration>,
}

impl RegionDurations {
    pub fn total(&self) -> f64 {
        self.regions.iter().map(|r| r.duration + r.pause_after).sum()
    }
}

pub fn measure_regions(stim: &ConditionedStimulus, ta: &TokenAlignment, seed: u64) -> Result<RegionDurations, MeasureError> {
    if stim.regions.is_empty() {
        return Err(MeasureError::NoRegions { stimulus_id: stim.id.clone() });
    }
    let mut regions = Vec::with_capacity(stim.regions.len());
    for (i, r) in stim.regions.iter().enumerate() {
        let out_of_range = || MeasureError::RegionOutOfRange { stimulus_id: stim.id.clone(), label: r.label.clone() };
        if r.end <= r.start {
            return Err(out_of_range());
        }
        let first = ta.interval(r.start).ok_or_else(out_of_range)?;
        let last = ta.interval(r.end - 1).ok_or_else(out_of_range)?;
        let pause_after = match stim.regions.get(i + 1) {
            Some(_) => ta.interval(r.end).map_or(0.0, |next| (next.start - last.end).max(0.0)),
            None => 0.0,
        };
        regions.push(RegionDuration {
            label: r.label.clone(),
            start: r.start,
            end: r.end,
            duration: last.end - first.start,
            pause_after,
        });
    }
    Ok(RegionDurations {
        stimulus_id: stim.id.clone(),
        source_id: stim.source_id.clone(),
        condition: stim.condition,
        seed,
        regions,
    })
}
