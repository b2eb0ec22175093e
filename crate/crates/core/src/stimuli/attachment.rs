use serde::{Deserialize, Serialize};

use super::{split_regions, Condition, ConditionedStimulus, StimulusError};
use crate::text;

/// Slot fillers per template slot in the published stimulus set (6^4 = 1296
/// sentences per bias).
pub const SLOT_SIZE: usize = 6;

/// `<subject> <verb> <object> with <property>` template. Properties are given
/// without the preposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentTemplate {
    pub subjects: Vec<String>,
    pub verbs: Vec<String>,
    pub objects: Vec<String>,
    pub high_props: Vec<String>,
    pub low_props: Vec<String>,
    #[serde(default = "default_preposition")]
    pub preposition: String,
}

fn default_preposition() -> String {
    "with".to_string()
}

impl AttachmentTemplate {
    fn slots(&self) -> [(&'static str, &Vec<String>); 5] {
        [
            ("subjects", &self.subjects),
            ("verbs", &self.verbs),
            ("objects", &self.objects),
            ("high_props", &self.high_props),
            ("low_props", &self.low_props),
        ]
    }

    pub fn validate(&self, arity: usize) -> Result<(), StimulusError> {
        for (name, slot) in self.slots() {
            if slot.len() != arity {
                return Err(StimulusError::InvalidTemplate(format!("{name} has {} phrases, expected {arity}", slot.len())));
            }
            for phrase in slot {
                if phrase.trim().is_empty() {
                    return Err(StimulusError::InvalidTemplate(format!("{name} contains an empty phrase")));
                }
                if phrase.contains([',', '.', '!', '?']) {
                    return Err(StimulusError::InvalidTemplate(format!("{name} phrase '{phrase}' contains punctuation")));
                }
            }
        }
        if text::words(&self.preposition).len() != 1 {
            return Err(StimulusError::InvalidTemplate("preposition must be a single word".into()));
        }
        Ok(())
    }
}

/// Full cross product with the published slot size of 6.
pub fn generate_attachment(template: &AttachmentTemplate) -> Result<Vec<ConditionedStimulus>, StimulusError> {
    generate_attachment_with_arity(template, SLOT_SIZE)
}

/// Full cross product over the template. Each combination yields a
/// high-attachment sentence, its comma control (comma before the PP) and a
/// low-attachment sentence. Low attachment gets no comma control.
pub fn generate_attachment_with_arity(
    template: &AttachmentTemplate,
    arity: usize,
) -> Result<Vec<ConditionedStimulus>, StimulusError> {
    template.validate(arity)?;
    let t = template;
    let mut out = Vec::with_capacity(3 * arity.pow(4));
    for (si, subj) in t.subjects.iter().enumerate() {
        for (vi, verb) in t.verbs.iter().enumerate() {
            for (oi, obj) in t.objects.iter().enumerate() {
                for pi in 0..arity {
                    let source_id = format!("att-s{si}-v{vi}-o{oi}-p{pi}");
                    let head = format!("{} {} {}", capitalize(subj.trim()), verb.trim(), obj.trim());
                    let n_subj = text::words(subj).len();
                    let n_verb = text::words(verb).len();
                    let a = text::words(&head).len() - 1;
                    for (condition, prop, tag) in [
                        (Condition::HighAttach, &t.high_props[pi], "high"),
                        (Condition::LowAttach, &t.low_props[pi], "low"),
                    ] {
                        let sentence = format!("{head} {} {}.", t.preposition.trim(), prop.trim());
                        let n = text::words(&sentence).len();
                        let regions = split_regions(
                            n,
                            &[(n_subj - 1, "subject"), (n_subj + n_verb - 1, "verb"), (a, "object")],
                            "pp",
                        );
                        let mk = |text: String, comma: bool| ConditionedStimulus {
                            id: format!("{source_id}-{tag}{}", if comma { "-comma" } else { "" }),
                            source_id: source_id.clone(),
                            text,
                            condition,
                            comma_variant: comma,
                            position_a: Some(a),
                            position_b: None,
                            regions: regions.clone(),
                            critical_word: Some(t.preposition.trim().to_string()),
                            critical_index: Some(a + 1),
                            category: None,
                        };
                        if condition == Condition::HighAttach {
                            let with_comma = text::insert_comma_after(&sentence, a).expect("object index in range");
                            out.push(mk(sentence, false));
                            out.push(mk(with_comma, true));
                        } else {
                            out.push(mk(sentence, false));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
