//! Dependency and constituency annotations: ingestion, corpus sentence
//! selection, clause-boundary detection and regression predictors.

mod clause;
pub(crate) mod conllu;
mod features;
mod filter;
mod ptb;

pub use clause::{detect_clause_boundary, ClauseRelations};
pub use conllu::{parse_conllu, to_conllu, ConlluError, DepToken, ParsedSentence, Upos};
pub use features::{
    extract_features, feature_columns, read_keyed_csv, write_features_csv, FeatureError, FeatureRow, FeatureVector,
    KeyedTable, NA,
};
pub use filter::{filter_corpus_sentence, SelectionRecord, MAX_WORDS, MIN_WORDS};
pub use ptb::{parse_bracketed, parse_tree_file, Tree, TreeError};

/// Attaches trees to sentences: by `sent_id` when the tree file carries ids,
/// otherwise by position. Returns the ids of sentences left without a tree.
pub fn attach_trees(sentences: &mut [ParsedSentence], trees: Vec<(Option<String>, Tree)>) -> Vec<String> {
    let keyed = trees.iter().any(|(id, _)| id.is_some());
    if keyed {
        let mut by_id: std::collections::BTreeMap<String, Tree> =
            trees.into_iter().filter_map(|(id, t)| id.map(|id| (id, t))).collect();
        for s in sentences.iter_mut() {
            s.constituency = by_id.remove(&s.sent_id);
        }
    } else {
        for (s, (_, t)) in sentences.iter_mut().zip(trees) {
            s.constituency = Some(t);
        }
    }
    sentences.iter().filter(|s| s.constituency.is_none()).map(|s| s.sent_id.clone()).collect()
}
