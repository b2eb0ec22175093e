use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{detect_clause_boundary, ClauseRelations, ParsedSentence, Upos};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("sentence {sent_id}: position {pos} out of range ({n} words)")]
    OutOfRange { sent_id: String, pos: usize, n: usize },
    #[error("sentence {sent_id}: position {pos} is the last word; positions must be sentence-internal")]
    LastWord { sent_id: String, pos: usize },
    #[error("sentence {sent_id}: dependency tokens do not spell the sentence text")]
    TokenizationMismatch { sent_id: String },
    #[error("features CSV: {0}")]
    Csv(String),
}

/// Predictors at one position (between word `pos` and word `pos + 1`).
/// Constituency features are `None` when no tree is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub comma_presence: u8,
    pub preceding_pos: Upos,
    pub following_pos: Upos,
    pub is_clause_boundary: u8,
    pub num_closing_brackets: Option<u32>,
    pub max_tree_depth: Option<u32>,
    pub prec_is_dep_head: u8,
    pub prec_num_dependents: u32,
    pub prec_depth_in_subtree: u32,
    pub prec_token_len: u32,
    pub foll_token_len: u32,
    pub sentence_len: u32,
    pub num_preceding_tokens: u32,
    pub clause_x_comma: u8,
}

/// Column names of [`FeatureVector::values`], in order.
pub fn feature_columns() -> Vec<String> {
    let mut cols = vec!["comma_presence".to_string()];
    cols.extend(Upos::ALL.iter().map(|u| format!("prec_pos_{u}")));
    cols.extend(Upos::ALL.iter().map(|u| format!("foll_pos_{u}")));
    cols.extend(
        [
            "is_clause_boundary",
            "num_closing_brackets",
            "max_tree_depth",
            "prec_is_dep_head",
            "prec_num_dependents",
            "prec_depth_in_subtree",
            "prec_token_len",
            "foll_token_len",
            "sentence_len",
            "num_preceding_tokens",
            "clause_x_comma",
        ]
        .map(String::from),
    );
    cols
}

impl FeatureVector {
    /// Flat numeric row with one-hot POS blocks; `None` marks an absent value.
    pub fn values(&self) -> Vec<Option<f64>> {
        let one_hot = |tag: Upos| Upos::ALL.iter().map(move |&u| Some(f64::from(u8::from(u == tag))));
        let mut v = vec![Some(f64::from(self.comma_presence))];
        v.extend(one_hot(self.preceding_pos));
        v.extend(one_hot(self.following_pos));
        v.push(Some(f64::from(self.is_clause_boundary)));
        v.push(self.num_closing_brackets.map(f64::from));
        v.push(self.max_tree_depth.map(f64::from));
        v.extend(
            [
                u32::from(self.prec_is_dep_head),
                self.prec_num_dependents,
                self.prec_depth_in_subtree,
                self.prec_token_len,
                self.foll_token_len,
                self.sentence_len,
                self.num_preceding_tokens,
                u32::from(self.clause_x_comma),
            ]
            .map(|x| Some(f64::from(x))),
        );
        v
    }
}

/// Computes the predictors at word `pos`. `comma` states whether the text
/// being modelled has a comma after `pos` (the parse itself may come from a
/// comma-bearing original).
pub fn extract_features(s: &ParsedSentence, pos: usize, comma: bool, relations: &ClauseRelations) -> Result<FeatureVector, FeatureError> {
    let map = s.word_to_token().ok_or_else(|| FeatureError::TokenizationMismatch { sent_id: s.sent_id.clone() })?;
    let n = map.len();
    if pos >= n {
        return Err(FeatureError::OutOfRange { sent_id: s.sent_id.clone(), pos, n });
    }
    if pos + 1 == n {
        return Err(FeatureError::LastWord { sent_id: s.sent_id.clone(), pos });
    }
    let (prec, foll) = (map[pos], map[pos + 1]);
    let boundary = detect_clause_boundary(s, pos, relations).0;
    let (closing, depth) = match &s.constituency {
        Some(tree) => {
            let leaves = tree.leaves();
            let words: Vec<usize> =
                (0..leaves.len()).filter(|&i| leaves[i].chars().any(char::is_alphanumeric)).collect();
            if words.len() == n {
                (Some(tree.closing_counts()[words[pos]] as u32), Some(tree.max_depth() as u32))
            } else {
                log::warn!("sentence {}: tree leaves do not match words; constituency features absent", s.sent_id);
                (None, None)
            }
        }
        None => (None, None),
    };
    let dependents = s.dependents(prec).count() as u32;
    let comma = u8::from(comma);
    let boundary = u8::from(boundary);
    Ok(FeatureVector {
        comma_presence: comma,
        preceding_pos: s.tokens[prec].upos,
        following_pos: s.tokens[foll].upos,
        is_clause_boundary: boundary,
        num_closing_brackets: closing,
        max_tree_depth: depth,
        prec_is_dep_head: u8::from(dependents > 0),
        prec_num_dependents: dependents,
        prec_depth_in_subtree: s.depth(prec) as u32,
        prec_token_len: s.tokens[prec].form.chars().count() as u32,
        foll_token_len: s.tokens[foll].form.chars().count() as u32,
        sentence_len: n as u32,
        num_preceding_tokens: pos as u32 + 1,
        clause_x_comma: boundary * comma,
    })
}

/// One row of the features CSV: keyed by stimulus id and word position.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub stimulus_id: String,
    pub position: usize,
    pub features: FeatureVector,
}

pub const NA: &str = "NA";

pub fn write_features_csv<W: Write>(out: W, rows: &[FeatureRow]) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["stimulus_id".to_string(), "position".to_string()];
    header.extend(feature_columns());
    w.write_record(&header).map_err(|e| FeatureError::Csv(e.to_string()))?;
    for r in rows {
        let mut rec = vec![r.stimulus_id.clone(), r.position.to_string()];
        rec.extend(r.features.values().into_iter().map(|v| v.map_or_else(|| NA.to_string(), |x| x.to_string())));
        w.write_record(&rec).map_err(|e| FeatureError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| FeatureError::Csv(e.to_string()))
}

/// A generic numeric table keyed by `(stimulus_id, position)`, as read back
/// from a features CSV. Absent values are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedTable {
    pub columns: Vec<String>,
    pub keys: Vec<(String, usize)>,
    pub rows: Vec<Vec<Option<f64>>>,
}

pub fn read_keyed_csv<R: Read>(input: R) -> Result<KeyedTable, FeatureError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| FeatureError::Csv(e.to_string()))?.clone();
    if header.get(0) != Some("stimulus_id") || header.get(1) != Some("position") {
        return Err(FeatureError::Csv("first columns must be stimulus_id,position".into()));
    }
    let columns: Vec<String> = header.iter().skip(2).map(String::from).collect();
    let mut keys = Vec::new();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| FeatureError::Csv(e.to_string()))?;
        let bad = |what: &str| FeatureError::Csv(format!("row {}: {what}", i + 2));
        let pos: usize = rec.get(1).and_then(|p| p.parse().ok()).ok_or_else(|| bad("bad position"))?;
        keys.push((rec.get(0).unwrap_or_default().to_string(), pos));
        let vals = rec
            .iter()
            .skip(2)
            .map(|v| match v {
                NA | "" => Ok(None),
                v => v.parse::<f64>().map(Some).map_err(|_| bad(&format!("non-numeric value '{v}'"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(vals);
    }
    Ok(KeyedTable { columns, keys, rows })
}
