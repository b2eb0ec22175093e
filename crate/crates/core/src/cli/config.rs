use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lasso::{RegressionConfig, Selection};
use crate::score::DEFAULT_PREPOSITIONS;
use crate::syntax::ClauseRelations;
use crate::textgrid::DEFAULT_MIN_PAUSE;

pub const CONFIG_ENV: &str = "PHRASEBOUND_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LassoSettings {
    pub grid_size: usize,
    pub min_ratio: f64,
    pub folds: usize,
    pub standardize_binary: bool,
    pub selection: Selection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
}

impl Default for LassoSettings {
    fn default() -> Self {
        let d = RegressionConfig::default();
        LassoSettings {
            grid_size: d.grid_size,
            min_ratio: d.min_ratio,
            folds: d.folds,
            standardize_binary: d.standardize_binary,
            selection: d.selection,
            grid: None,
        }
    }
}

/// Everything a run depends on. Read from TOML; flags override file values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Minimum silence (s) that counts as a pause, both when reading
    /// alignments and when classifying.
    pub pause_threshold: f64,
    pub alpha: f64,
    pub workers: usize,
    pub synthesis_seeds: Vec<u64>,
    pub audio_dir: String,
    pub textgrid_dir: String,
    pub finetune_per_bias: usize,
    pub clause_relations: ClauseRelations,
    pub prepositions: Vec<String>,
    /// Free text naming the parser or treebank behind the CoNLL-U input.
    pub annotation_source: String,
    /// Free text naming the aligner, acoustic model and dictionary.
    pub aligner: String,
    pub lasso: LassoSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 13,
            pause_threshold: DEFAULT_MIN_PAUSE,
            alpha: 0.05,
            workers: 4,
            synthesis_seeds: vec![0, 1, 2],
            audio_dir: "audio".into(),
            textgrid_dir: "textgrids".into(),
            finetune_per_bias: 100,
            clause_relations: ClauseRelations::default(),
            prepositions: DEFAULT_PREPOSITIONS.iter().map(|s| s.to_string()).collect(),
            annotation_source: "unspecified".into(),
            aligner: "unspecified".into(),
            lasso: LassoSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub pause_threshold: Option<f64>,
    pub workers: Option<usize>,
    pub alpha: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(content: &str, origin: &str) -> Result<RunConfig> {
        toml::from_str(content).map_err(|e| Error::Usage(format!("config {origin}: {}", e.message())))
    }

    pub fn load(path: Option<&Path>, o: Overrides) -> Result<RunConfig> {
        let mut cfg = match path {
            Some(p) => {
                let content = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                RunConfig::from_toml(&content, &p.display().to_string())?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = o.seed {
            cfg.seed = v;
        }
        if let Some(v) = o.pause_threshold {
            cfg.pause_threshold = v;
        }
        if let Some(v) = o.workers {
            cfg.workers = v;
        }
        if let Some(v) = o.alpha {
            cfg.alpha = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Usage(format!("invalid config: {m}")));
        if !(self.pause_threshold.is_finite() && self.pause_threshold > 0.0) {
            return bad(format!("pause_threshold must be positive, got {}", self.pause_threshold));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.synthesis_seeds.is_empty() {
            return bad("synthesis_seeds is empty".into());
        }
        if self.clause_relations.0.is_empty() {
            return bad("clause_relations is empty".into());
        }
        let l = &self.lasso;
        if l.grid_size == 0 {
            return bad("lasso.grid_size must be positive".into());
        }
        if !(l.min_ratio > 0.0 && l.min_ratio < 1.0) {
            return bad(format!("lasso.min_ratio must be in (0, 1), got {}", l.min_ratio));
        }
        if l.folds < 2 {
            return bad(format!("lasso.folds must be at least 2, got {}", l.folds));
        }
        if let Some(g) = &l.grid {
            if g.is_empty() || g.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return bad("lasso.grid must be a non-empty list of non-negative penalties".into());
            }
        }
        Ok(())
    }

    pub fn regression(&self) -> RegressionConfig {
        RegressionConfig {
            grid_size: self.lasso.grid_size,
            min_ratio: self.lasso.min_ratio,
            folds: self.lasso.folds,
            seed: self.seed,
            standardize_binary: self.lasso.standardize_binary,
            selection: self.lasso.selection,
            grid: self.lasso.grid.clone(),
        }
    }

    pub fn sha256(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Tool version, resolved config hash and input hashes keyed by file name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub inputs: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(cfg: &RunConfig) -> Self {
        Provenance { tool: "phrasebound", version: crate::TOOL_VERSION, config_sha256: cfg.sha256(), inputs: BTreeMap::new() }
    }

    fn key_for(&self, name: String) -> String {
        let mut key = name.clone();
        let mut n = 2;
        while self.inputs.contains_key(&key) {
            key = format!("{name}#{n}");
            n += 1;
        }
        key
    }

    pub fn add_bytes(&mut self, name: &str, bytes: &[u8]) {
        let key = self.key_for(name.to_string());
        self.inputs.insert(key, sha256_hex(bytes));
    }

    /// Reads `path`, records its hash and returns the bytes.
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.add_bytes(&name, &bytes);
        Ok(bytes)
    }

    pub fn read_string(&mut self, path: &Path) -> Result<String> {
        let bytes = self.read(path)?;
        String::from_utf8(bytes).map_err(|_| Error::schema(path.display().to_string(), "not valid UTF-8"))
    }

    /// One digest over a set of per-file digests, recorded under `name`.
    pub fn add_collection(&mut self, name: &str, digests: &BTreeMap<String, String>) {
        let mut h = Sha256::new();
        for (file, digest) in digests {
            h.update(file.as_bytes());
            h.update([0]);
            h.update(digest.as_bytes());
            h.update(b"\n");
        }
        let key = self.key_for(name.to_string());
        self.inputs.insert(key, hex::encode(h.finalize()));
    }
}
