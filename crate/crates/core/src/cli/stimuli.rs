use std::collections::BTreeMap;
use std::path::Path;

use log::warn;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{ensure_dir, write_csv, write_json, Provenance, Report, RunConfig, StimulusKind};
use crate::error::{Error, Result};
use crate::stimuli::{
    apply_all_cue_conditions, build_manifest, generate_attachment, generate_eval_set, generate_garden_path,
    make_finetune_manifests, parse_garden_path_tsv, read_jsonl, write_jsonl, AttachmentTemplate, AuditedUtterance,
    ConditionedStimulus, EvalLexicon, FinetuneSource,
};
use crate::syntax::{
    attach_trees, extract_features, filter_corpus_sentence, parse_conllu, parse_tree_file, write_features_csv, FeatureRow,
};

const BUILTIN_GARDEN_PATH: &str = include_str!("../../data/garden_path_items.tsv");
const BUILTIN_ATTACHMENT: &str = include_str!("../../data/attachment_template.json");

fn kind_name(kind: StimulusKind) -> &'static str {
    match kind {
        StimulusKind::GardenPath => "garden-path",
        StimulusKind::Attachment => "attachment",
        StimulusKind::Eval => "eval",
        StimulusKind::Corpus => "corpus",
        StimulusKind::FinetuneSynthetic => "finetune-synthetic",
        StimulusKind::FinetuneSampled => "finetune-sampled",
    }
}

/// The input file, or the built-in table recorded under its own name.
fn input_or_builtin(prov: &mut Provenance, input: Option<&Path>, name: &str, builtin: &str) -> Result<String> {
    match input {
        Some(p) => prov.read_string(p),
        None => {
            prov.add_bytes(&format!("builtin:{name}"), builtin.as_bytes());
            Ok(builtin.to_string())
        }
    }
}

fn required<'a>(input: Option<&'a Path>, kind: StimulusKind, what: &str) -> Result<&'a Path> {
    input.ok_or_else(|| Error::Usage(format!("--kind {} needs --input ({what})", kind_name(kind))))
}

fn parse_json<T: DeserializeOwned>(content: &str, origin: &str) -> Result<T> {
    serde_json::from_str(content).map_err(|e| Error::schema(origin, e.to_string()))
}

#[derive(Debug, Serialize)]
struct StimulusSummary {
    kind: &'static str,
    n_stimuli: usize,
    n_comma_variants: usize,
    n_jobs: usize,
    by_condition: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_sentences: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_accepted: Option<usize>,
}

#[derive(Debug, Serialize)]
struct FinetuneSummary {
    kind: &'static str,
    n_entries: usize,
}

/// Corpus selection: filter records, the four cue conditions of every
/// accepted sentence and predictors at both marked positions.
fn corpus(cfg: &RunConfig, prov: &mut Provenance, input: &Path, trees: Option<&Path>, out: &Path) -> Result<(Vec<ConditionedStimulus>, usize, usize)> {
    let mut sentences = parse_conllu(&prov.read_string(input)?)?;
    if let Some(t) = trees {
        let missing = attach_trees(&mut sentences, parse_tree_file(&prov.read_string(t)?)?);
        if !missing.is_empty() {
            warn!("{} sentences have no constituency tree", missing.len());
        }
    }
    let rel = &cfg.clause_relations;
    let mut records = Vec::with_capacity(sentences.len());
    let mut stimuli = Vec::new();
    let mut features = Vec::new();
    for s in &sentences {
        let mut rec = filter_corpus_sentence(s, rel);
        if let Some(cs) = rec.to_corpus_sentence() {
            match apply_all_cue_conditions(&cs, cfg.seed) {
                Ok(variants) => {
                    for v in &variants {
                        let commas = v.comma_positions();
                        for pos in [v.position_a, v.position_b].into_iter().flatten() {
                            let f = extract_features(s, pos, commas.contains(&pos), rel)?;
                            features.push(FeatureRow { stimulus_id: v.id.clone(), position: pos, features: f });
                        }
                    }
                    stimuli.extend(variants);
                }
                Err(e) => {
                    rec.accepted = false;
                    rec.reason = e.to_string();
                }
            }
        }
        records.push(rec);
    }
    write_csv(&out.join("selection.csv"), &records)?;
    let path = out.join("features.csv");
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_features_csv(std::io::BufWriter::new(file), &features)?;
    let accepted = records.iter().filter(|r| r.accepted).count();
    Ok((stimuli, sentences.len(), accepted))
}

pub(super) fn run(cfg: &RunConfig, kind: StimulusKind, input: Option<&Path>, trees: Option<&Path>, out: &Path) -> Result<()> {
    let mut prov = Provenance::new(cfg);
    let (mut n_sentences, mut n_accepted) = (None, None);
    let stimuli = match kind {
        StimulusKind::GardenPath => {
            let tsv = input_or_builtin(&mut prov, input, "garden_path_items.tsv", BUILTIN_GARDEN_PATH)?;
            generate_garden_path(&parse_garden_path_tsv(&tsv)?)?
        }
        StimulusKind::Attachment => {
            let json = input_or_builtin(&mut prov, input, "attachment_template.json", BUILTIN_ATTACHMENT)?;
            generate_attachment(&parse_json::<AttachmentTemplate>(&json, "attachment template")?)?
        }
        StimulusKind::Eval => {
            let path = required(input, kind, "function-word lexicon JSON")?;
            let lexicon: EvalLexicon = parse_json(&prov.read_string(path)?, &path.display().to_string())?;
            generate_eval_set(&lexicon)?
        }
        StimulusKind::Corpus => {
            let path = required(input, kind, "CoNLL-U file")?;
            ensure_dir(out)?;
            let (s, n, a) = corpus(cfg, &mut prov, path, trees, out)?;
            (n_sentences, n_accepted) = (Some(n), Some(a));
            s
        }
        StimulusKind::FinetuneSynthetic | StimulusKind::FinetuneSampled => return finetune(cfg, prov, kind, input, out),
    };

    let problems: Vec<String> = stimuli.iter().filter_map(|s| s.validate().err().map(|e| format!("{}: {e}", s.id))).collect();
    if !problems.is_empty() {
        for p in &problems {
            log::error!("{p}");
        }
        return Err(Error::schema("stimulus validation", format!("{} invalid stimuli, first: {}", problems.len(), problems[0])));
    }

    ensure_dir(out)?;
    let jobs = build_manifest(&stimuli, &cfg.synthesis_seeds, &cfg.audio_dir, &cfg.textgrid_dir);
    write_jsonl(&out.join("stimuli.jsonl"), &stimuli)?;
    write_jsonl(&out.join("manifest.jsonl"), &jobs)?;
    let mut by_condition = BTreeMap::new();
    for s in &stimuli {
        let key = if s.comma_variant { format!("{}+comma", s.condition) } else { s.condition.to_string() };
        *by_condition.entry(key).or_insert(0) += 1;
    }
    let summary = StimulusSummary {
        kind: kind_name(kind),
        n_stimuli: stimuli.len(),
        n_comma_variants: stimuli.iter().filter(|s| s.comma_variant).count(),
        n_jobs: jobs.len(),
        by_condition,
        n_sentences,
        n_accepted,
    };
    let counts: Vec<String> = summary.by_condition.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("{} stimuli ({}), {} synthesis jobs", summary.n_stimuli, counts.join(", "), summary.n_jobs);
    write_json(&out.join("summary.json"), &Report { command: "stimuli", provenance: &prov, config: cfg, results: summary })
}

fn finetune(cfg: &RunConfig, mut prov: Provenance, kind: StimulusKind, input: Option<&Path>, out: &Path) -> Result<()> {
    let entries = if kind == StimulusKind::FinetuneSynthetic {
        let json = input_or_builtin(&mut prov, input, "attachment_template.json", BUILTIN_ATTACHMENT)?;
        let stimuli = generate_attachment(&parse_json::<AttachmentTemplate>(&json, "attachment template")?)?;
        make_finetune_manifests(FinetuneSource::Synthetic {
            stimuli: &stimuli,
            per_bias: cfg.finetune_per_bias,
            seed: cfg.seed,
            audio_dir: &cfg.audio_dir,
        })?
    } else {
        let path = required(input, kind, "audited corpus JSONL from `audit`")?;
        prov.read(path)?;
        let utts: Vec<AuditedUtterance> = read_jsonl(path)?;
        make_finetune_manifests(FinetuneSource::Sampled(&utts))?
    };
    ensure_dir(out)?;
    write_jsonl(&out.join("finetune.jsonl"), &entries)?;
    println!("{} finetuning entries", entries.len());
    let summary = FinetuneSummary { kind: kind_name(kind), n_entries: entries.len() };
    write_json(&out.join("summary.json"), &Report { command: "stimuli", provenance: &prov, config: cfg, results: summary })
}
