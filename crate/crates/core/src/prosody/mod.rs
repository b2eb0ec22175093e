//! Durational boundary cues: region durations, pre-boundary lengthening and
//! pauses, plus summaries and condition contrasts.

mod measure;
mod stats;
mod syllables;

pub use measure::{boundary_measures, measure_marked, measure_regions, BoundaryMeasurement, RegionDuration, RegionDurations, Site};
pub use stats::{aggregate, effect_test, paired_by_id, EffectResult, RankTest, SummaryStats, MIN_SAMPLE};
pub use syllables::{count_syllables, is_vowel_phone, orthographic_syllables};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("stimulus {stimulus_id}: word {pos} is not aligned")]
    Unaligned { stimulus_id: String, pos: usize },
    #[error("stimulus {stimulus_id}: word {pos} is the last word")]
    NotInternal { stimulus_id: String, pos: usize },
    #[error("stimulus {stimulus_id}: region '{label}' lies outside the alignment")]
    RegionOutOfRange { stimulus_id: String, label: String },
    #[error("stimulus {stimulus_id} has no regions")]
    NoRegions { stimulus_id: String },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("sample {sample} has {n} values; at least {min} needed")]
    InsufficientData { sample: String, n: usize, min: usize },
    #[error("paired samples differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("id {0} appears in only one paired sample")]
    UnpairedId(String),
    #[error("id {0} appears twice in a paired sample")]
    DuplicateId(String),
    #[error("samples contain non-finite values")]
    NonFinite,
}
