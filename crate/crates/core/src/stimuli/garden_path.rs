use serde::{Deserialize, Serialize};

use super::{split_regions, Condition, ConditionedStimulus, StimulusError};
use crate::text;

/// One garden-path sentence in its early-closure form plus the word that turns
/// it into the late-closure form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GardenPathItem {
    pub id: String,
    pub early_text: String,
    pub late_insert: String,
    pub insert_index: usize,
    pub position_a: usize,
    pub position_b: usize,
}

impl GardenPathItem {
    fn invalid(&self, reason: impl Into<String>) -> StimulusError {
        StimulusError::InvalidItem { id: self.id.clone(), reason: reason.into() }
    }

    pub fn validate(&self) -> Result<(), StimulusError> {
        let n = text::words(&self.early_text).len();
        if n < 5 {
            return Err(self.invalid(format!("{n} tokens, need at least 5")));
        }
        if self.position_a >= self.position_b {
            return Err(self.invalid(format!("position_a {} not before position_b {}", self.position_a, self.position_b)));
        }
        if self.insert_index != self.position_b + 1 {
            return Err(self.invalid(format!("insert_index {} != position_b + 1", self.insert_index)));
        }
        if self.position_b + 1 >= n {
            return Err(self.invalid(format!("position_b {} leaves no words after it ({n} tokens)", self.position_b)));
        }
        if text::words(&self.late_insert).len() != 1 || !text::comma_positions(&self.early_text).is_empty() {
            return Err(self.invalid("late insert must be one word and the text comma-free"));
        }
        Ok(())
    }
}

/// Reads items from a tab-separated file with header
/// `id text insert insert_index position_a position_b`.
pub fn parse_garden_path_tsv(content: &str) -> Result<Vec<GardenPathItem>, StimulusError> {
    let mut items = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        if i == 0 || line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(StimulusError::Parse { line: line_no, message: format!("expected 6 columns, got {}", cols.len()) });
        }
        let num = |s: &str, what: &str| {
            s.trim().parse::<usize>().map_err(|_| StimulusError::Parse {
                line: line_no,
                message: format!("{what} '{s}' is not a token index"),
            })
        };
        items.push(GardenPathItem {
            id: cols[0].trim().to_string(),
            early_text: cols[1].trim().to_string(),
            late_insert: cols[2].trim().to_string(),
            insert_index: num(cols[3], "insert_index")?,
            position_a: num(cols[4], "position_a")?,
            position_b: num(cols[5], "position_b")?,
        });
    }
    Ok(items)
}

/// Four variants per item: early/late closure, each with and without a comma
/// at its closure point.
pub fn generate_garden_path(items: &[GardenPathItem]) -> Result<Vec<ConditionedStimulus>, StimulusError> {
    let mut out = Vec::with_capacity(items.len() * 4);
    for item in items {
        item.validate()?;
        let (a, b) = (item.position_a, item.position_b);
        let late_text = text::insert_after_word(&item.early_text, b, &format!(" {}", item.late_insert))
            .ok_or_else(|| item.invalid("insert index out of range"))?;

        for (condition, base, closure) in
            [(Condition::EarlyClosure, &item.early_text, a), (Condition::LateClosure, &late_text, b)]
        {
            let n = text::words(base).len();
            let regions = split_regions(n, &[(a, "pre_a"), (b, "a_to_b")], "post_b");
            let tag = if condition == Condition::EarlyClosure { "early" } else { "late" };
            for comma in [false, true] {
                let text = if comma {
                    text::insert_comma_after(base, closure).ok_or_else(|| item.invalid("closure index out of range"))?
                } else {
                    base.clone()
                };
                out.push(ConditionedStimulus {
                    id: format!("{}-{tag}{}", item.id, if comma { "-comma" } else { "" }),
                    source_id: item.id.clone(),
                    text,
                    condition,
                    comma_variant: comma,
                    position_a: Some(a),
                    position_b: Some(b),
                    regions: regions.clone(),
                    critical_word: None,
                    critical_index: None,
                    category: None,
                });
            }
        }
    }
    Ok(out)
}
