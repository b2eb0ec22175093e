//! Synthetic speakers and corpora shared by the integration suites.
#![allow(dead_code)]

use std::path::Path;

use phrasebound::prosody::count_syllables;
use phrasebound::stimuli::{utterance_id, ConditionedStimulus};
use phrasebound::textgrid::{to_long_format, Alignment, Interval, Tier};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EDGE_SILENCE: f64 = 0.1;

fn jitter(id: &str, seed: u64, i: usize) -> f64 {
    let mut h: u64 = 1469598103934665603;
    for b in id.bytes().chain(seed.to_le_bytes()).chain((i as u64).to_le_bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(1099511628211);
    }
    (h % 1000) as f64 * 1e-5
}

/// Words tier for `stim` with syllable-driven durations, edge silences and
/// `pause_after(i)` seconds of silence after word `i` (internal words only).
pub fn speak(stim: &ConditionedStimulus, seed: u64, pause_after: &dyn Fn(usize) -> f64) -> Alignment {
    let words = stim.words();
    let mut ivs = vec![Interval::new(0.0, EDGE_SILENCE, "")];
    let mut t = EDGE_SILENCE;
    for (i, w) in words.iter().enumerate() {
        let d = 0.12 + 0.06 * f64::from(count_syllables(w, None)) + jitter(&stim.id, seed, i);
        ivs.push(Interval::new(t, t + d, w.to_lowercase()));
        t += d;
        let p = pause_after(i);
        if p > 0.0 && i + 1 < words.len() {
            ivs.push(Interval::new(t, t + p, "sil"));
            t += p;
        }
    }
    ivs.push(Interval::new(t, t + EDGE_SILENCE, ""));
    t += EDGE_SILENCE;
    Alignment { xmin: 0.0, xmax: t, tiers: vec![Tier { name: "words".into(), intervals: ivs }] }
}

/// Pauses only where the text has a comma.
pub fn comma_slave(stim: &ConditionedStimulus) -> impl Fn(usize) -> f64 + '_ {
    let commas = stim.comma_positions();
    move |i| if commas.contains(&i) { 0.3 } else { 0.0 }
}

/// Pauses at every clause boundary (position A), comma or not.
pub fn syntax_oracle(stim: &ConditionedStimulus) -> impl Fn(usize) -> f64 + '_ {
    move |i| if stim.position_a == Some(i) { 0.25 } else { 0.0 }
}

pub fn write_textgrids(dir: &Path, stimuli: &[ConditionedStimulus], seeds: &[u64], policy: &dyn Fn(&ConditionedStimulus, u64, usize) -> f64) {
    std::fs::create_dir_all(dir).unwrap();
    for s in stimuli {
        for &seed in seeds {
            let a = speak(s, seed, &|i| policy(s, seed, i));
            std::fs::write(dir.join(format!("{}.TextGrid", utterance_id(&s.id, seed))), to_long_format(&a)).unwrap();
        }
    }
}

const NOUNS: [&str; 8] = ["man", "woman", "dog", "child", "farmer", "teacher", "doctor", "driver"];
const ADJS: [&str; 6] = ["old", "young", "tall", "quiet", "happy", "small"];
const VERBS: [&str; 6] = ["fixed", "painted", "washed", "sold", "moved", "cleaned"];
const OBJECTS: [&str; 6] = ["car", "fence", "house", "boat", "table", "window"];
const INTRANSITIVE: [&str; 6] = ["arrived", "left", "slept", "smiled", "waited", "returned"];

fn conllu_line(id: usize, form: &str, upos: &str, head: usize, deprel: &str, misc: &str) -> String {
    format!("{id}\t{form}\t{}\t{upos}\t_\t_\t{head}\t{deprel}\t_\t{misc}\n", form.to_lowercase())
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
}

/// `n` single-comma sentences whose comma sits at a clause boundary:
/// coordinated clauses (`conj`) and fronted adverbial clauses (`advcl`).
pub fn synthetic_conllu(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for k in 0..n {
        let mut pick = |xs: &[&'static str]| xs[rng.random_range(0..xs.len())];
        let (n1, n2, a1, a2, v1, v2, o1, o2, iv) =
            (pick(&NOUNS), pick(&NOUNS), pick(&ADJS), pick(&ADJS), pick(&VERBS), pick(&VERBS), pick(&OBJECTS), pick(&OBJECTS), pick(&INTRANSITIVE));
        let id = format!("syn{:04}", k + 1);
        let toks: Vec<(&str, &str, usize, &str)> = if k % 2 == 0 {
            vec![
                ("The", "DET", 3, "det"),
                (a1, "ADJ", 3, "amod"),
                (n1, "NOUN", 4, "nsubj"),
                (v1, "VERB", 0, "root"),
                ("the", "DET", 6, "det"),
                (o1, "NOUN", 4, "obj"),
                (",", "PUNCT", 12, "punct"),
                ("and", "CCONJ", 12, "cc"),
                ("the", "DET", 11, "det"),
                (a2, "ADJ", 11, "amod"),
                (n2, "NOUN", 12, "nsubj"),
                (v2, "VERB", 4, "conj"),
                ("the", "DET", 14, "det"),
                (o2, "NOUN", 12, "obj"),
                (".", "PUNCT", 4, "punct"),
            ]
        } else {
            vec![
                ("When", "SCONJ", 4, "mark"),
                ("the", "DET", 3, "det"),
                (n1, "NOUN", 4, "nsubj"),
                (iv, "VERB", 9, "advcl"),
                (",", "PUNCT", 9, "punct"),
                ("the", "DET", 8, "det"),
                (a1, "ADJ", 8, "amod"),
                (n2, "NOUN", 9, "nsubj"),
                (v1, "VERB", 0, "root"),
                ("the", "DET", 11, "det"),
                (o1, "NOUN", 9, "obj"),
                ("quickly", "ADV", 9, "advmod"),
                (".", "PUNCT", 9, "punct"),
            ]
        };
        let mut text = String::new();
        for (i, (form, ..)) in toks.iter().enumerate() {
            let form = if i == 0 { capitalize(form) } else { form.to_string() };
            let next_is_punct = toks.get(i + 1).is_some_and(|t| t.1 == "PUNCT");
            text.push_str(&form);
            if !next_is_punct && i + 1 < toks.len() {
                text.push(' ');
            }
        }
        out.push_str(&format!("# sent_id = {id}\n# text = {text}\n"));
        for (i, (form, upos, head, rel)) in toks.iter().enumerate() {
            let form = if i == 0 { capitalize(form) } else { form.to_string() };
            let space = if toks.get(i + 1).is_some_and(|t| t.1 == "PUNCT") { "SpaceAfter=No" } else { "_" };
            out.push_str(&conllu_line(i + 1, &form, upos, *head, rel, space));
        }
        out.push('\n');
    }
    out
}

/// Eight function-word categories with `per_category` sentences each.
pub fn synthetic_eval_lexicon(per_category: usize) -> String {
    let cats = [
        ("as", "preposition", false, "She worked as a {n} in the town."),
        ("as", "conjunction", true, "She left early as the {n} was tired."),
        ("for", "preposition", false, "He bought a gift for the {n} today."),
        ("for", "conjunction", true, "He stayed home for the {n} was ill."),
        ("to", "preposition", false, "They walked to the {n} after lunch."),
        ("to", "infinitive", false, "They wanted to see the {n} again."),
        ("with", "high attachment", true, "He painted the fence with the {n} yesterday."),
        ("with", "low attachment", false, "He met the man with the {n} yesterday."),
    ];
    let categories: Vec<serde_json::Value> = cats
        .iter()
        .map(|(word, usage, pause, template)| {
            let sentences: Vec<String> = (0..per_category).map(|i| template.replace("{n}", NOUNS[i % NOUNS.len()])).collect();
            serde_json::json!({ "word": word, "usage": usage, "pause": pause, "sentences": sentences })
        })
        .collect();
    serde_json::json!({ "categories": categories }).to_string()
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_phrasebound")
}

/// Runs the binary in `dir`; returns (exit code, stdout, stderr).
pub fn run_cli(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("PHRASEBOUND_CONFIG")
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

pub fn must(dir: &Path, args: &[&str]) {
    let (code, _, err) = run_cli(dir, args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
}

pub fn read_stimuli(path: &Path) -> Vec<ConditionedStimulus> {
    phrasebound::stimuli::read_jsonl(path).unwrap()
}

/// An imperfect speaker: usually pauses at A, sometimes at B, with
/// seed-dependent pause lengths.
pub fn noisy_speaker(s: &ConditionedStimulus, seed: u64, i: usize) -> f64 {
    let j = jitter(&s.id, seed, i);
    if s.position_a == Some(i) && j > 0.002 {
        0.15 + 10.0 * j
    } else if s.position_b == Some(i) && j > 0.008 {
        0.05 + j
    } else {
        0.0
    }
}

/// Every subcommand over synthetic inputs rooted at `root`, using relative
/// paths only. Returns the output directories.
pub fn run_pipeline(root: &Path) -> Vec<&'static str> {
    std::fs::create_dir_all(root).unwrap();
    std::fs::write(root.join("corpus.conllu"), synthetic_conllu(60, 3)).unwrap();
    std::fs::write(root.join("lexicon.json"), synthetic_eval_lexicon(30)).unwrap();
    std::fs::write(root.join("config.toml"), "synthesis_seeds = [0, 1]\n[lasso]\ngrid_size = 20\n").unwrap();
    let cfg = ["--config", "config.toml"];
    let with = |args: &[&'static str]| -> Vec<&'static str> { cfg.iter().copied().chain(args.iter().copied()).collect() };

    must(root, &with(&["stimuli", "--kind", "garden-path", "--out", "gp"]));
    must(root, &with(&["stimuli", "--kind", "attachment", "--out", "att"]));
    must(root, &with(&["stimuli", "--kind", "finetune-synthetic", "--out", "ft"]));
    must(root, &with(&["stimuli", "--kind", "corpus", "--input", "corpus.conllu", "--out", "corpus"]));
    must(root, &with(&["stimuli", "--kind", "eval", "--input", "lexicon.json", "--out", "eval"]));

    let seeds = [0, 1];
    write_textgrids(&root.join("tg"), &read_stimuli(&root.join("corpus/stimuli.jsonl")), &seeds, &noisy_speaker);
    write_textgrids(&root.join("tg"), &read_stimuli(&root.join("eval/stimuli.jsonl")), &seeds, &noisy_speaker);
    write_textgrids(&root.join("tg"), &read_stimuli(&root.join("gp/stimuli.jsonl")), &seeds, &noisy_speaker);
    must(root, &with(&["measure", "--stimuli", "corpus/stimuli.jsonl", "--textgrids", "tg", "--out", "m_corpus"]));
    must(root, &with(&["measure", "--stimuli", "eval/stimuli.jsonl", "--textgrids", "tg", "--out", "m_eval"]));
    must(root, &with(&["measure", "--stimuli", "gp/stimuli.jsonl", "--textgrids", "tg", "--out", "m_gp"]));
    must(root, &with(&["score", "--input", "noisy=m_corpus/measurements.csv", "--out", "score"]));
    must(root, &with(&["regress", "--features", "corpus/features.csv", "--targets", "m_corpus/targets.csv", "--out", "regress"]));
    must(root, &with(&["eval-funcwords", "--input", "noisy=m_eval/measurements.csv", "--out", "funcwords"]));

    // Audit the high-attachment comma controls as if they were a corpus.
    let att = read_stimuli(&root.join("att/stimuli.jsonl"));
    let sample: Vec<ConditionedStimulus> = att.into_iter().filter(|s| s.comma_variant).take(40).collect();
    let mut jsonl = String::new();
    for s in &sample {
        let utt = utterance_id(&s.id, 0);
        jsonl.push_str(&serde_json::json!({ "utterance_id": utt, "transcript": s.text, "audio_path": format!("audio/{utt}.wav") }).to_string());
        jsonl.push('\n');
    }
    std::fs::write(root.join("audit_corpus.jsonl"), jsonl).unwrap();
    write_textgrids(&root.join("tg_audit"), &sample, &[0], &|s, seed, i| if i % 2 == 0 { comma_slave(s)(i) } else { noisy_speaker(s, seed, i) });
    must(root, &with(&["audit", "--corpus", "audit_corpus.jsonl", "--textgrids", "tg_audit", "--out", "audit"]));
    must(root, &with(&["stimuli", "--kind", "finetune-sampled", "--input", "audit/audited.jsonl", "--out", "fs"]));

    vec!["gp", "att", "ft", "corpus", "eval", "m_corpus", "m_eval", "m_gp", "score", "regress", "funcwords", "audit", "fs"]
}
