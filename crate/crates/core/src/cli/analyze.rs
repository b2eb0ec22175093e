use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ensure_dir, sha256_hex, system_input, write_csv, write_json, Provenance, Report, RunConfig};
use crate::error::{Error, Result};
use crate::lasso::{ablation_runs, fit_regression, AblationResult, Dataset, RegressionReport};
use crate::prosody::{aggregate, effect_test, BoundaryMeasurement, EffectResult, Site};
use crate::score::{classify, corpus_audit, pause_before_prepositions, sensitivity_score, Metric, OverlapCounts, SensitivityReport};
use crate::stimuli::{read_jsonl, write_jsonl, AuditedUtterance, Condition};
use crate::syntax::read_keyed_csv;
use crate::text;
use crate::textgrid::{decode_bytes, match_words, parse_textgrid, TokenAlignment};

fn read_measurements(prov: &mut Provenance, path: &Path) -> Result<Vec<BoundaryMeasurement>> {
    let bytes = prov.read(path)?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::schema(format!("{}:{}", path.display(), i + 2), e.to_string())))
        .collect()
}

/// Named measurement sets; system names must be distinct.
fn read_systems(prov: &mut Provenance, inputs: &[String]) -> Result<Vec<(String, Vec<BoundaryMeasurement>)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(inputs.len());
    for arg in inputs {
        let (system, path) = system_input(arg);
        if !seen.insert(system.clone()) {
            return Err(Error::Usage(format!("system '{system}' given twice; name inputs as SYSTEM=PATH")));
        }
        out.push((system, read_measurements(prov, &path)?));
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SystemScore {
    system: String,
    n_pairs: usize,
    n_incomplete: usize,
    #[serde(flatten)]
    score: SensitivityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    mos: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ScoreRow<'a> {
    system: &'a str,
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    tn: u64,
    precision: Metric,
    recall: Metric,
    f1: Metric,
    f1_zero_tp: bool,
    mos: Option<f64>,
}

/// Position A of syntax-only stimuli and position B of no-cue stimuli: both
/// comma-free, paired by source sentence and seed. Pairs missing either side
/// are dropped and counted.
fn scoring_rows(ms: &[BoundaryMeasurement]) -> (Vec<BoundaryMeasurement>, usize, usize) {
    type Slot<'a> = (Option<&'a BoundaryMeasurement>, Option<&'a BoundaryMeasurement>);
    let mut pairs: BTreeMap<(&str, u64), Slot> = BTreeMap::new();
    for m in ms {
        let slot = pairs.entry((m.source_id.as_str(), m.seed)).or_default();
        match (m.condition, m.site) {
            (Condition::SyntaxOnly, Site::A) => slot.0 = Some(m),
            (Condition::NoCue, Site::B) => slot.1 = Some(m),
            _ => {}
        }
    }
    let mut rows = Vec::new();
    let mut incomplete = 0;
    for (a, b) in pairs.into_values() {
        match (a, b) {
            (Some(a), Some(b)) => {
                rows.push(a.clone());
                rows.push(b.clone());
            }
            (None, None) => {}
            _ => incomplete += 1,
        }
    }
    let n = rows.len() / 2;
    (rows, n, incomplete)
}

pub(super) fn score(cfg: &RunConfig, inputs: &[String], mos: Option<&Path>, out: &Path) -> Result<()> {
    let mut prov = Provenance::new(cfg);
    let systems = read_systems(&mut prov, inputs)?;
    let mut mos_by_system = BTreeMap::new();
    if let Some(path) = mos {
        let bytes = prov.read(path)?;
        let mut r = csv::Reader::from_reader(bytes.as_slice());
        for (i, rec) in r.deserialize::<(String, f64)>().enumerate() {
            let (system, value) = rec.map_err(|e| Error::schema(format!("{}:{}", path.display(), i + 2), e.to_string()))?;
            mos_by_system.insert(system, value);
        }
        for name in mos_by_system.keys() {
            if !systems.iter().any(|(s, _)| s == name) {
                warn!("MOS given for unknown system '{name}'");
            }
        }
    }
    let mut scores = Vec::with_capacity(systems.len());
    for (system, ms) in &systems {
        let (rows, n_pairs, n_incomplete) = scoring_rows(ms);
        if n_incomplete > 0 {
            warn!("{system}: {n_incomplete} sentence/seed pairs lack a measurement at A or B");
        }
        let score = sensitivity_score(classify(&rows, cfg.pause_threshold)?);
        println!("{system}: precision={} recall={} f1={} ({n_pairs} pairs)", score.precision, score.recall, score.f1);
        scores.push(SystemScore { system: system.clone(), n_pairs, n_incomplete, score, mos: mos_by_system.get(system).copied() });
    }
    ensure_dir(out)?;
    let rows: Vec<ScoreRow> = scores
        .iter()
        .map(|s| ScoreRow {
            system: &s.system,
            tp: s.score.counts.tp,
            fp: s.score.counts.fp,
            fn_: s.score.counts.fn_,
            tn: s.score.counts.tn,
            precision: s.score.precision,
            recall: s.score.recall,
            f1: s.score.f1,
            f1_zero_tp: s.score.f1_zero_tp,
            mos: s.mos,
        })
        .collect();
    write_csv(&out.join("scores.csv"), &rows)?;
    write_json(&out.join("report.json"), &Report { command: "score", provenance: &prov, config: cfg, results: scores })
}

#[derive(Debug, Deserialize)]
struct CorpusEntry {
    utterance_id: String,
    transcript: String,
    #[serde(default)]
    audio_path: String,
}

#[derive(Debug, Serialize)]
struct AuditFailure {
    utterance_id: String,
    stage: &'static str,
    message: String,
}

#[derive(Debug, Serialize)]
struct AuditResults {
    n_entries: usize,
    n_failed: usize,
    counts: OverlapCounts,
}

fn align_entry(e: &CorpusEntry, dir: &Path, min_pause: f64) -> std::result::Result<(String, String, TokenAlignment), AuditFailure> {
    let fail = |stage, message: String| AuditFailure { utterance_id: e.utterance_id.clone(), stage, message };
    let file = format!("{}.TextGrid", e.utterance_id);
    let bytes = std::fs::read(dir.join(&file)).map_err(|err| fail("read", err.to_string()))?;
    let text = decode_bytes(&bytes).ok_or_else(|| fail("parse", "neither UTF-8 nor UTF-16".into()))?;
    let alignment = parse_textgrid(&text).map_err(|err| fail("parse", err.to_string()))?;
    let ta = match_words(&text::words(&e.transcript), &alignment, min_pause).map_err(|err| fail("match", err.to_string()))?;
    Ok((file, sha256_hex(&bytes), ta))
}

pub(super) fn audit(cfg: &RunConfig, corpus: &Path, textgrids: &Path, out: &Path) -> Result<()> {
    let mut prov = Provenance::new(cfg);
    prov.read(corpus)?;
    let entries: Vec<CorpusEntry> = read_jsonl(corpus)?;
    if !entries.is_empty() && !textgrids.is_dir() {
        return Err(Error::io(textgrids, std::io::Error::new(std::io::ErrorKind::NotFound, "TextGrid directory not found")));
    }
    let preps: BTreeSet<String> = cfg.prepositions.iter().map(|p| text::normalize_word(p)).collect();
    let outcomes: Vec<_> = entries.par_iter().map(|e| align_entry(e, textgrids, cfg.pause_threshold)).collect();
    let mut digests = BTreeMap::new();
    let mut utts = Vec::new();
    let mut audited = Vec::new();
    let mut failures = Vec::new();
    for (e, o) in entries.iter().zip(outcomes) {
        match o {
            Ok((file, digest, ta)) => {
                digests.insert(file, digest);
                audited.push(AuditedUtterance {
                    utterance_id: e.utterance_id.clone(),
                    transcript: e.transcript.clone(),
                    audio_path: e.audio_path.clone(),
                    pause_before_preposition: pause_before_prepositions(&e.transcript, &ta, &preps),
                });
                utts.push((e.transcript.clone(), ta));
            }
            Err(f) => {
                warn!("{} ({}): {}", f.utterance_id, f.stage, f.message);
                failures.push(f);
            }
        }
    }
    let dir_name = textgrids.file_name().map_or_else(|| "textgrids".into(), |n| n.to_string_lossy().into_owned());
    prov.add_collection(&format!("{dir_name}/*.TextGrid"), &digests);
    let counts = corpus_audit(&utts, &preps);
    ensure_dir(out)?;
    write_jsonl(&out.join("audited.jsonl"), &audited)?;
    write_csv(&out.join("failures.csv"), &failures)?;
    println!(
        "{} utterances, {} prepositions ({} after a pause), {} commas, {} pauses",
        counts.n_utterances, counts.n_prepositions, counts.prepositions_with_pause, counts.n_commas, counts.n_pauses
    );
    let results = AuditResults { n_entries: entries.len(), n_failed: failures.len(), counts };
    write_json(&out.join("report.json"), &Report { command: "audit", provenance: &prov, config: cfg, results })
}

#[derive(Debug, Serialize)]
struct RegressResults {
    target: String,
    columns: Vec<String>,
    regression: RegressionReport,
    top10: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ablations: Option<Vec<AblationResult>>,
}

#[derive(Debug, Serialize)]
struct PathRow {
    lambda: f64,
    mean_mse: f64,
}

#[derive(Debug, Serialize)]
struct AblationRow {
    subset: String,
    n_rows: usize,
    skipped: Option<String>,
    clause_boundary_selected: Option<bool>,
    lambda: Option<f64>,
    n_selected: Option<usize>,
    r2_train: Option<Metric>,
    r2_test: Option<Metric>,
}

#[allow(clippy::too_many_arguments)]
pub(super) fn regress(
    cfg: &RunConfig,
    features: &Path,
    targets: &Path,
    target: &str,
    lambdas: &[f64],
    ablations: bool,
    out: &Path,
) -> Result<()> {
    let mut cfg = cfg.clone();
    if !lambdas.is_empty() {
        cfg.lasso.grid = Some(lambdas.to_vec());
        cfg.validate()?;
    }
    let mut prov = Provenance::new(&cfg);
    let ft = read_keyed_csv(prov.read(features)?.as_slice()).map_err(|e| Error::schema(features.display().to_string(), e.to_string()))?;
    let tt = read_keyed_csv(prov.read(targets)?.as_slice()).map_err(|e| Error::schema(targets.display().to_string(), e.to_string()))?;
    let ds = Dataset::from_tables(&ft, &tt, target)?;
    for c in &ds.dropped {
        warn!("column '{c}' has no values and was dropped");
    }
    let rc = cfg.regression();
    let (report, _) = fit_regression(&ds, &rc)?;
    let ablations = if ablations { Some(ablation_runs(&ds, &rc)?) } else { None };

    ensure_dir(out)?;
    write_csv(&out.join("coefficients.csv"), &report.coefficients)?;
    let path: Vec<PathRow> = report.grid.iter().zip(&report.cv_mean_mse).map(|(&lambda, &mean_mse)| PathRow { lambda, mean_mse }).collect();
    write_csv(&out.join("cv_path.csv"), &path)?;
    if let Some(runs) = &ablations {
        let rows: Vec<AblationRow> = runs
            .iter()
            .map(|r| AblationRow {
                subset: serde_json::to_value(r.subset).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                n_rows: r.n_rows,
                skipped: r.skipped.clone(),
                clause_boundary_selected: r.clause_boundary_selected,
                lambda: r.report.as_ref().map(|x| x.lambda),
                n_selected: r.report.as_ref().map(|x| x.coefficients.iter().filter(|c| c.selected).count()),
                r2_train: r.report.as_ref().map(|x| x.r2_train),
                r2_test: r.report.as_ref().map(|x| x.r2_test),
            })
            .collect();
        write_csv(&out.join("ablations.csv"), &rows)?;
    }
    let selected = report.coefficients.iter().filter(|c| c.selected).count();
    println!(
        "lambda={} selected {selected}/{} r2_train={} r2_test={}",
        report.lambda,
        report.coefficients.len(),
        report.r2_train,
        report.r2_test
    );
    let results = RegressResults {
        target: target.to_string(),
        columns: ds.columns.clone(),
        top10: report.top(10).into_iter().map(|c| c.name.clone()).collect(),
        regression: report,
        ablations,
    };
    write_json(&out.join("report.json"), &Report { command: "regress", provenance: &prov, config: &cfg, results })
}

#[derive(Debug, Serialize)]
struct FuncwordRow {
    system: String,
    category: String,
    pause_expected: bool,
    n: usize,
    mean_pause_dur: f64,
    se_pause_dur: f64,
    share_with_pause: f64,
    mean_pre_word_dur: f64,
    se_pre_word_dur: f64,
}

#[derive(Debug, Serialize)]
struct FuncwordSystem {
    system: String,
    categories: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pause_vs_no_pause: Option<EffectResult>,
    #[serde(skip_serializing_if = "String::is_empty")]
    note: String,
}

/// Pause before the function word (measured after the preceding word, i.e.
/// at position A) per category and system.
pub(super) fn eval_funcwords(cfg: &RunConfig, inputs: &[String], out: &Path) -> Result<()> {
    let mut prov = Provenance::new(cfg);
    let systems = read_systems(&mut prov, inputs)?;
    let mut rows = Vec::new();
    let mut per_system = Vec::new();
    for (system, ms) in &systems {
        let eval: Vec<&BoundaryMeasurement> = ms
            .iter()
            .filter(|m| m.site == Site::A && matches!(m.condition, Condition::EvalPause | Condition::EvalNoPause))
            .collect();
        let key = |m: &&BoundaryMeasurement| vec![m.category.clone().unwrap_or_else(|| "uncategorized".into()), m.condition.to_string()];
        let pause = aggregate(&eval, key, |m| m.pause_dur);
        let pre = aggregate(&eval, key, |m| m.pre_word_dur);
        let share = aggregate(&eval, key, |m| f64::from(u8::from(m.pause_dur >= cfg.pause_threshold)));
        for ((p, w), s) in pause.into_iter().zip(pre).zip(share) {
            rows.push(FuncwordRow {
                system: system.clone(),
                category: p.group[0].clone(),
                pause_expected: p.group[1] == Condition::EvalPause.as_str(),
                n: p.n,
                mean_pause_dur: p.mean,
                se_pause_dur: p.se,
                share_with_pause: s.mean,
                mean_pre_word_dur: w.mean,
                se_pre_word_dur: w.se,
            });
        }
        let with: Vec<f64> = eval.iter().filter(|m| m.condition == Condition::EvalPause).map(|m| m.pause_dur).collect();
        let without: Vec<f64> = eval.iter().filter(|m| m.condition == Condition::EvalNoPause).map(|m| m.pause_dur).collect();
        let (test, note) = match effect_test(&with, &without, false, cfg.alpha) {
            Ok(r) => (Some(r), String::new()),
            Err(e) => (None, e.to_string()),
        };
        let categories = rows.iter().filter(|r| &r.system == system).count();
        println!("{system}: {categories} categories, {} measurements", eval.len());
        per_system.push(FuncwordSystem { system: system.clone(), categories, pause_vs_no_pause: test, note });
    }
    ensure_dir(out)?;
    write_csv(&out.join("funcwords.csv"), &rows)?;
    write_json(&out.join("report.json"), &Report { command: "eval-funcwords", provenance: &prov, config: cfg, results: per_system })
}
