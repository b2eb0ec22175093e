use serde::{Deserialize, Serialize};

use super::ParsedSentence;

/// Dependency relations that mark a clause boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClauseRelations(pub Vec<String>);

impl Default for ClauseRelations {
    fn default() -> Self {
        ClauseRelations(["conj", "advcl", "relcl", "appos", "ccomp", "xcomp"].map(String::from).to_vec())
    }
}

impl ClauseRelations {
    /// Matches the full relation, its base (`acl` in `acl:relcl`) or its
    /// subtype (`relcl`).
    pub fn matches(&self, deprel: &str) -> Option<&str> {
        let (base, sub) = match deprel.split_once(':') {
            Some((b, s)) => (b, Some(s)),
            None => (deprel, None),
        };
        self.0.iter().find(|r| *r == deprel || *r == base || Some(r.as_str()) == sub).map(String::as_str)
    }
}

/// Whether a clausal relation attaches across the cut between word `pos`
/// and word `pos + 1`.
///
/// A relation counts when the dependent's subtree lies wholly on one side
/// of the cut and touches it (contains the word next to the cut), while the
/// head is on the other side. When several arcs qualify the shortest one
/// wins. Returns the matched label from `relations`.
pub fn detect_clause_boundary(s: &ParsedSentence, pos: usize, relations: &ClauseRelations) -> (bool, Option<String>) {
    let map = s.word_to_token().unwrap_or_else(|| s.word_tokens());
    let (Some(&left), Some(&right)) = (map.get(pos), map.get(pos + 1)) else {
        return (false, None);
    };
    let mut best: Option<(usize, String)> = None;
    for d in 0..s.tokens.len() {
        let Some(h) = s.head_of(d) else { continue };
        let Some(label) = relations.matches(&s.tokens[d].deprel) else { continue };
        let sub = s.subtree(d);
        let before = h >= right && sub.iter().all(|&t| t < right) && sub.contains(&left);
        let after = h <= left && sub.iter().all(|&t| t > left) && sub.contains(&right);
        if !(before || after) {
            continue;
        }
        let (lo, hi) = (d.min(h), d.max(h));
        let span = hi - lo;
        if best.as_ref().is_none_or(|(b, _)| span < *b) {
            best = Some((span, label.to_string()));
        }
    }
    match best {
        Some((_, label)) => (true, Some(label)),
        None => (false, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::conllu::fixtures;
    use crate::syntax::parse_conllu;

    fn at_comma(doc: &str) -> (bool, Option<String>) {
        let s = &parse_conllu(doc).unwrap()[0];
        let a = crate::text::comma_positions(&s.raw_text)[0];
        detect_clause_boundary(s, a, &ClauseRelations::default())
    }

    #[test]
    fn worked_examples() {
        assert_eq!(at_comma(fixtures::LINKS), (true, Some("conj".into())));
        assert_eq!(at_comma(fixtures::CACHE), (true, Some("advcl".into())));
        assert_eq!(at_comma(fixtures::ANIMALS), (true, Some("relcl".into())));
    }

    #[test]
    fn inside_noun_phrase() {
        let doc = "1\tthe\tthe\tDET\t_\t_\t3\tdet\t_\t_\n2\tbig\tbig\tADJ\t_\t_\t3\tamod\t_\t_\n3\tdog\tdog\tNOUN\t_\t_\t4\tnsubj\t_\t_\n4\tbarked\tbark\tVERB\t_\t_\t0\troot\t_\t_\n";
        let s = &parse_conllu(doc).unwrap()[0];
        assert_eq!(detect_clause_boundary(s, 1, &ClauseRelations::default()), (false, None));
    }

    #[test]
    fn non_boundary_inside_clause() {
        let s = &parse_conllu(fixtures::LINKS).unwrap()[0];
        // "they can | be": the conj subtree straddles the cut.
        assert_eq!(detect_clause_boundary(s, 6, &ClauseRelations::default()), (false, None));
        assert_eq!(detect_clause_boundary(s, 0, &ClauseRelations::default()), (false, None));
    }

    #[test]
    fn subtype_and_custom_sets() {
        let r = ClauseRelations::default();
        assert_eq!(r.matches("acl:relcl"), Some("relcl"));
        assert_eq!(r.matches("conj"), Some("conj"));
        assert_eq!(r.matches("nsubj"), None);
        let only_conj = ClauseRelations(vec!["conj".into()]);
        assert_eq!(only_conj.matches("advcl"), None);
    }
}
