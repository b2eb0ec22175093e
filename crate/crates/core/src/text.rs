//! Tokenization shared by every module.
//!
//! Text is split on whitespace and punctuation is detached from the edges of
//! each chunk as separate tokens. Word-internal apostrophes and hyphens stay
//! inside the word. Positions are indices into the *word* tokens only, so a
//! sentence and its comma-bearing variant share one index space.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub punct: bool,
    /// Byte range in the source text.
    pub span: (usize, usize),
}

fn is_edge_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for chunk in text.split_inclusive(char::is_whitespace) {
        let trimmed = chunk.trim_end_matches(char::is_whitespace);
        push_chunk(text, offset, offset + trimmed.len(), &mut out);
        offset += chunk.len();
    }
    out
}

fn push_chunk<'a>(text: &'a str, start: usize, end: usize, out: &mut Vec<Token<'a>>) {
    let chunk = &text[start..end];
    if chunk.is_empty() {
        return;
    }
    let lead_end = chunk
        .char_indices()
        .find(|&(_, c)| !is_edge_punct(c))
        .map(|(i, _)| i)
        .unwrap_or(chunk.len());
    let trail_start = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_edge_punct(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(lead_end);

    let punct = |from: usize, to: usize, out: &mut Vec<Token<'a>>| {
        for (i, c) in chunk[from..to].char_indices() {
            let s = start + from + i;
            out.push(Token { text: &text[s..s + c.len_utf8()], punct: true, span: (s, s + c.len_utf8()) });
        }
    };
    punct(0, lead_end, out);
    if trail_start > lead_end {
        let (s, e) = (start + lead_end, start + trail_start);
        out.push(Token { text: &text[s..e], punct: false, span: (s, e) });
    }
    punct(trail_start.max(lead_end), chunk.len(), out);
}

/// Word tokens of `text` (punctuation dropped).
pub fn words(text: &str) -> Vec<String> {
    tokenize(text).into_iter().filter(|t| !t.punct).map(|t| t.text.to_string()).collect()
}

/// Byte spans of the word tokens.
pub fn word_spans(text: &str) -> Vec<Range<usize>> {
    tokenize(text).into_iter().filter(|t| !t.punct).map(|t| t.span.0..t.span.1).collect()
}

/// Lower-cased alphanumeric skeleton of a word, used to compare stimulus
/// tokens against aligner output.
pub fn normalize_word(word: &str) -> String {
    word.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

/// Word indices that are immediately followed by `mark`.
pub fn followed_by(text: &str, mark: &str) -> Vec<usize> {
    let tokens = tokenize(text);
    let mut out = Vec::new();
    let mut word_idx: Option<usize> = None;
    let mut last_was_word = false;
    for tok in tokens {
        if tok.punct {
            if last_was_word && tok.text == mark {
                if let Some(w) = word_idx {
                    out.push(w);
                }
            }
            last_was_word = false;
        } else {
            word_idx = Some(word_idx.map_or(0, |w| w + 1));
            last_was_word = true;
        }
    }
    out
}

/// Word indices immediately followed by a comma.
pub fn comma_positions(text: &str) -> Vec<usize> {
    followed_by(text, ",")
}

/// Word indices whose right edge touches any punctuation mark.
pub fn punct_positions(text: &str) -> Vec<usize> {
    let tokens = tokenize(text);
    let mut out = Vec::new();
    let mut word_idx: Option<usize> = None;
    let mut prev_word = false;
    for tok in tokens {
        if tok.punct {
            if prev_word {
                if let Some(w) = word_idx {
                    out.push(w);
                }
            }
            prev_word = false;
        } else {
            word_idx = Some(word_idx.map_or(0, |w| w + 1));
            prev_word = true;
        }
    }
    out
}

/// Inserts `insert` right after the word at `word_idx`. Returns `None` if the
/// index is out of range.
pub fn insert_after_word(text: &str, word_idx: usize, insert: &str) -> Option<String> {
    let spans = word_spans(text);
    let span = spans.get(word_idx)?;
    let mut out = String::with_capacity(text.len() + insert.len());
    out.push_str(&text[..span.end]);
    out.push_str(insert);
    out.push_str(&text[span.end..]);
    Some(out)
}

pub fn insert_comma_after(text: &str, word_idx: usize) -> Option<String> {
    insert_after_word(text, word_idx, ",")
}

/// Removes every comma and collapses the whitespace left behind.
pub fn strip_commas(text: &str) -> String {
    let without: String = text.chars().filter(|&c| c != ',').collect();
    without.split_whitespace().collect::<Vec<_>>().join(" ")
}
