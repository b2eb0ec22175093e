use std::collections::BTreeMap;
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::{ensure_dir, sha256_hex, write_csv, write_json, Provenance, Report, RunConfig};
use crate::error::{Error, Result};
use crate::prosody::{aggregate, effect_test, measure_marked, measure_regions, paired_by_id, BoundaryMeasurement, Site, StatsError};
use crate::stimuli::{read_jsonl, utterance_id, Condition, ConditionedStimulus};
use crate::textgrid::{decode_bytes, match_tokens, parse_textgrid};

/// Failure share above which the report carries a warning banner.
pub const FAILURE_BANNER_RATE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub utterance_id: String,
    pub stimulus_id: String,
    pub seed: u64,
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
struct RegionRow<'a> {
    stimulus_id: &'a str,
    source_id: &'a str,
    condition: Condition,
    seed: u64,
    label: &'a str,
    start: usize,
    end: usize,
    duration: f64,
    pause_after: f64,
}

#[derive(Debug, Serialize)]
struct TargetRow {
    stimulus_id: String,
    position: usize,
    pause_dur: f64,
    pre_word_dur: f64,
    pre_word_dur_per_syll: f64,
    n_seeds: usize,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    measure: &'static str,
    condition: String,
    comma_variant: String,
    site: String,
    n: usize,
    mean: f64,
    sd: f64,
    se: f64,
    median: f64,
}

#[derive(Debug, Serialize)]
struct RegionSummaryRow {
    measure: &'static str,
    condition: String,
    region: String,
    n: usize,
    mean: f64,
    sd: f64,
    se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectRow {
    pub contrast: String,
    pub measure: &'static str,
    pub test: Option<String>,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: Option<f64>,
    pub mean_b: Option<f64>,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub exact: Option<bool>,
    pub significant: Option<bool>,
    pub note: String,
}

#[derive(Debug, Serialize)]
struct MeasureResults {
    n_stimuli: usize,
    n_utterances: usize,
    n_measured: usize,
    n_failed: usize,
    failure_rate: f64,
    n_measurements: usize,
    failures_by_stage: BTreeMap<&'static str, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    banner: Option<String>,
}

struct Measured {
    file: String,
    digest: String,
    marked: Vec<BoundaryMeasurement>,
    regions: Option<crate::prosody::RegionDurations>,
}

fn measure_one(stim: &ConditionedStimulus, seed: u64, dir: &Path, min_pause: f64) -> std::result::Result<Measured, Failure> {
    let utt = utterance_id(&stim.id, seed);
    let fail = |stage: &'static str, message: String| Failure {
        utterance_id: utt.clone(),
        stimulus_id: stim.id.clone(),
        seed,
        stage,
        message,
    };
    let file = format!("{utt}.TextGrid");
    let bytes = std::fs::read(dir.join(&file)).map_err(|e| fail("read", e.to_string()))?;
    let text = decode_bytes(&bytes).ok_or_else(|| fail("parse", "neither UTF-8 nor UTF-16".into()))?;
    let alignment = parse_textgrid(&text).map_err(|e| fail("parse", e.to_string()))?;
    let ta = match_tokens(stim, &alignment, min_pause).map_err(|e| fail("match", e.to_string()))?;
    let marked = measure_marked(stim, &ta, seed).map_err(|e| fail("measure", e.to_string()))?;
    let regions = if stim.regions.is_empty() {
        None
    } else {
        Some(measure_regions(stim, &ta, seed).map_err(|e| fail("measure", e.to_string()))?)
    };
    Ok(Measured { file, digest: sha256_hex(&bytes), marked, regions })
}

type Getter = fn(&BoundaryMeasurement) -> f64;

const MEASURES: [(&str, Getter); 3] = [
    ("pause_dur", |m| m.pause_dur),
    ("pre_word_dur", |m| m.pre_word_dur),
    ("pre_word_dur_per_syll", |m| m.pre_word_dur_per_syll),
];

#[derive(Debug, Clone, Copy)]
struct Selector {
    condition: Condition,
    comma: bool,
    site: Site,
}

impl Selector {
    const fn new(condition: Condition, comma: bool, site: Site) -> Self {
        Selector { condition, comma, site }
    }

    fn label(&self) -> String {
        format!("{}{}@{:?}", self.condition, if self.comma { "+comma" } else { "" }, self.site)
    }

    fn matches(&self, m: &BoundaryMeasurement) -> bool {
        m.condition == self.condition && m.comma_variant == self.comma && m.site == self.site
    }
}

/// Contrasts between conditions at a site, and between sites within a
/// condition. Absent conditions are skipped.
const CONTRASTS: [(Selector, Selector); 11] = {
    use Condition::*;
    use Site::{A, B};
    [
        (Selector::new(EarlyClosure, false, A), Selector::new(LateClosure, false, A)),
        (Selector::new(EarlyClosure, false, B), Selector::new(LateClosure, false, B)),
        (Selector::new(EarlyClosure, true, A), Selector::new(EarlyClosure, false, A)),
        (Selector::new(LateClosure, true, B), Selector::new(LateClosure, false, B)),
        (Selector::new(HighAttach, false, A), Selector::new(LowAttach, false, A)),
        (Selector::new(HighAttach, true, A), Selector::new(HighAttach, false, A)),
        (Selector::new(CommaSyntax, true, A), Selector::new(SyntaxOnly, false, A)),
        (Selector::new(UnnaturalComma, true, B), Selector::new(NoCue, false, B)),
        (Selector::new(SyntaxOnly, false, A), Selector::new(SyntaxOnly, false, B)),
        (Selector::new(NoCue, false, A), Selector::new(NoCue, false, B)),
        (Selector::new(EvalPause, false, A), Selector::new(EvalNoPause, false, A)),
    ]
};

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Paired on `(source, seed)` when both sides cover the same items,
/// otherwise a rank-sum test.
pub fn effect_rows(ms: &[BoundaryMeasurement], alpha: f64) -> Vec<EffectRow> {
    let mut rows = Vec::new();
    for (sa, sb) in CONTRASTS {
        let a: Vec<&BoundaryMeasurement> = ms.iter().filter(|m| sa.matches(m)).collect();
        let b: Vec<&BoundaryMeasurement> = ms.iter().filter(|m| sb.matches(m)).collect();
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let same_stimulus = sa.condition == sb.condition && sa.comma == sb.comma;
        let key = |m: &BoundaryMeasurement| {
            let id = if same_stimulus { &m.stimulus_id } else { &m.source_id };
            format!("{id}/{}", m.seed)
        };
        for (measure, value) in MEASURES {
            let ka: Vec<(String, f64)> = a.iter().map(|m| (key(m), value(m))).collect();
            let kb: Vec<(String, f64)> = b.iter().map(|m| (key(m), value(m))).collect();
            let va: Vec<f64> = ka.iter().map(|p| p.1).collect();
            let vb: Vec<f64> = kb.iter().map(|p| p.1).collect();
            let test = match paired_by_id(&ka, &kb) {
                Ok((x, y)) => effect_test(&x, &y, true, alpha),
                Err(StatsError::UnpairedId(_)) => effect_test(&va, &vb, false, alpha),
                Err(e) => Err(e),
            };
            let mut row = EffectRow {
                contrast: format!("{} vs {}", sa.label(), sb.label()),
                measure,
                test: None,
                n_a: va.len(),
                n_b: vb.len(),
                mean_a: mean(&va),
                mean_b: mean(&vb),
                statistic: None,
                p_value: None,
                exact: None,
                significant: None,
                note: String::new(),
            };
            match test {
                Ok(r) => {
                    row.test = Some(format!("{:?}", r.test));
                    row.statistic = Some(r.statistic);
                    row.p_value = Some(r.p_value);
                    row.exact = Some(r.exact);
                    row.significant = Some(r.significant);
                }
                Err(e) => row.note = e.to_string(),
            }
            rows.push(row);
        }
    }
    rows
}

/// Per `(stimulus, position)` means over synthesis seeds.
fn targets(ms: &[BoundaryMeasurement]) -> Vec<TargetRow> {
    let mut by_key: BTreeMap<(&str, usize), Vec<&BoundaryMeasurement>> = BTreeMap::new();
    for m in ms {
        by_key.entry((m.stimulus_id.as_str(), m.position)).or_default().push(m);
    }
    by_key
        .into_iter()
        .map(|((id, pos), group)| {
            let mut group = group;
            group.sort_by_key(|m| m.seed);
            let avg = |f: fn(&BoundaryMeasurement) -> f64| group.iter().map(|m| f(m)).sum::<f64>() / group.len() as f64;
            TargetRow {
                stimulus_id: id.to_string(),
                position: pos,
                pause_dur: avg(|m| m.pause_dur),
                pre_word_dur: avg(|m| m.pre_word_dur),
                pre_word_dur_per_syll: avg(|m| m.pre_word_dur_per_syll),
                n_seeds: group.len(),
            }
        })
        .collect()
}

pub(super) fn run(cfg: &RunConfig, stimuli_path: &Path, textgrids: &Path, out: &Path) -> Result<()> {
    let mut prov = Provenance::new(cfg);
    prov.read(stimuli_path)?;
    let stimuli: Vec<ConditionedStimulus> = read_jsonl(stimuli_path)?;
    if !textgrids.is_dir() {
        return Err(Error::io(textgrids, std::io::Error::new(std::io::ErrorKind::NotFound, "TextGrid directory not found")));
    }
    let jobs: Vec<(&ConditionedStimulus, u64)> =
        stimuli.iter().flat_map(|s| cfg.synthesis_seeds.iter().map(move |&seed| (s, seed))).collect();
    let outcomes: Vec<std::result::Result<Measured, Failure>> =
        jobs.par_iter().map(|&(s, seed)| measure_one(s, seed, textgrids, cfg.pause_threshold)).collect();

    let mut digests = BTreeMap::new();
    let mut marked = Vec::new();
    let mut regions = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(m) => {
                digests.insert(m.file, m.digest);
                marked.extend(m.marked);
                regions.extend(m.regions);
            }
            Err(f) => {
                warn!("{} ({}): {}", f.utterance_id, f.stage, f.message);
                failures.push(f);
            }
        }
    }
    let dir_name = textgrids.file_name().map_or_else(|| "textgrids".into(), |n| n.to_string_lossy().into_owned());
    prov.add_collection(&format!("{dir_name}/*.TextGrid"), &digests);

    ensure_dir(out)?;
    write_csv(&out.join("measurements.csv"), &marked)?;
    let region_rows: Vec<RegionRow> = regions
        .iter()
        .flat_map(|r| {
            r.regions.iter().map(move |g| RegionRow {
                stimulus_id: &r.stimulus_id,
                source_id: &r.source_id,
                condition: r.condition,
                seed: r.seed,
                label: &g.label,
                start: g.start,
                end: g.end,
                duration: g.duration,
                pause_after: g.pause_after,
            })
        })
        .collect();
    write_csv(&out.join("regions.csv"), &region_rows)?;
    write_csv(&out.join("targets.csv"), &targets(&marked))?;

    let mut summary = Vec::new();
    for (measure, value) in MEASURES {
        for s in aggregate(&marked, |m| vec![m.condition.to_string(), m.comma_variant.to_string(), format!("{:?}", m.site)], value) {
            let [condition, comma_variant, site]: [String; 3] = s.group.try_into().expect("three group keys");
            summary.push(SummaryRow { measure, condition, comma_variant, site, n: s.n, mean: s.mean, sd: s.sd, se: s.se, median: s.median });
        }
    }
    write_csv(&out.join("summary.csv"), &summary)?;
    let flat: Vec<&RegionRow> = region_rows.iter().collect();
    let mut region_summary = Vec::new();
    for (measure, value) in [("duration", (|r: &&RegionRow| r.duration) as fn(&&RegionRow) -> f64), ("pause_after", |r: &&RegionRow| r.pause_after)] {
        for s in aggregate(&flat, |r| vec![r.condition.to_string(), r.label.to_string()], value) {
            let [condition, region]: [String; 2] = s.group.try_into().expect("two group keys");
            region_summary.push(RegionSummaryRow { measure, condition, region, n: s.n, mean: s.mean, sd: s.sd, se: s.se });
        }
    }
    write_csv(&out.join("region_summary.csv"), &region_summary)?;
    write_csv(&out.join("effects.csv"), &effect_rows(&marked, cfg.alpha))?;
    write_csv(&out.join("failures.csv"), &failures)?;

    let n_utt = jobs.len();
    let rate = if n_utt == 0 { 0.0 } else { failures.len() as f64 / n_utt as f64 };
    let banner = (rate > FAILURE_BANNER_RATE).then(|| {
        format!("WARNING: {} of {n_utt} utterances ({:.1}%) failed alignment or measurement; see failures.csv", failures.len(), 100.0 * rate)
    });
    if let Some(b) = &banner {
        eprintln!("{b}");
    }
    let mut by_stage = BTreeMap::new();
    for f in &failures {
        *by_stage.entry(f.stage).or_insert(0) += 1;
    }
    let results = MeasureResults {
        n_stimuli: stimuli.len(),
        n_utterances: n_utt,
        n_measured: n_utt - failures.len(),
        n_failed: failures.len(),
        failure_rate: rate,
        n_measurements: marked.len(),
        failures_by_stage: by_stage,
        banner,
    };
    println!("{} of {} utterances measured, {} boundary rows", results.n_measured, n_utt, marked.len());
    write_json(&out.join("report.json"), &Report { command: "measure", provenance: &prov, config: cfg, results })
}
