use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ptb::Tree;
use crate::text;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("CoNLL-U sentence {sent_id} (line {line}): {message}")]
pub struct ConlluError {
    pub sent_id: String,
    pub line: usize,
    pub message: String,
}

/// Universal POS tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Upos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Adj,
        Upos::Adp,
        Upos::Adv,
        Upos::Aux,
        Upos::Cconj,
        Upos::Det,
        Upos::Intj,
        Upos::Noun,
        Upos::Num,
        Upos::Part,
        Upos::Pron,
        Upos::Propn,
        Upos::Punct,
        Upos::Sconj,
        Upos::Sym,
        Upos::Verb,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }

    pub fn index(self) -> usize {
        Upos::ALL.iter().position(|&u| u == self).expect("tag is in ALL")
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL.iter().copied().find(|u| u.as_str() == s).ok_or_else(|| format!("unknown UPOS tag '{s}'"))
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One syntactic word. `id` and `head` are 1-based as in the file; head 0
/// is the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepToken {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: Upos,
    pub xpos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl DepToken {
    /// Word tokens are the ones that survive [`text::words`]: anything with
    /// an alphanumeric character.
    pub fn is_word(&self) -> bool {
        self.upos != Upos::Punct && self.form.chars().any(char::is_alphanumeric)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSentence {
    pub sent_id: String,
    /// Comment lines without the leading `#`, in file order.
    pub comments: Vec<String>,
    pub tokens: Vec<DepToken>,
    pub raw_text: String,
    pub constituency: Option<Tree>,
}

impl ParsedSentence {
    /// Token positions (0-based into `tokens`) of the word tokens, in order.
    pub fn word_tokens(&self) -> Vec<usize> {
        (0..self.tokens.len()).filter(|&i| self.tokens[i].is_word()).collect()
    }

    /// Word index → token position, provided the word tokens spell the
    /// same words as `raw_text`.
    pub fn word_to_token(&self) -> Option<Vec<usize>> {
        let words = text::words(&self.raw_text);
        let toks = self.word_tokens();
        let same = words.len() == toks.len()
            && words.iter().zip(&toks).all(|(w, &t)| text::normalize_word(w) == text::normalize_word(&self.tokens[t].form));
        same.then_some(toks)
    }

    /// 0-based token position of the head of token `t`, or `None` for the root.
    pub fn head_of(&self, t: usize) -> Option<usize> {
        self.tokens[t].head.checked_sub(1)
    }

    pub fn dependents(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.tokens.len()).filter(move |&d| self.head_of(d) == Some(t))
    }

    /// Number of arcs from token `t` up to the root.
    pub fn depth(&self, t: usize) -> usize {
        let mut d = 0;
        let mut cur = t;
        while let Some(h) = self.head_of(cur) {
            d += 1;
            cur = h;
        }
        d
    }

    /// Token positions dominated by `t`, including `t`.
    pub fn subtree(&self, t: usize) -> Vec<usize> {
        (0..self.tokens.len()).filter(|&d| self.dominates(t, d)).collect()
    }

    pub fn dominates(&self, ancestor: usize, t: usize) -> bool {
        let mut cur = Some(t);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.head_of(c);
        }
        false
    }
}

fn text_from_tokens(tokens: &[DepToken]) -> String {
    let mut s = String::new();
    for t in tokens {
        s.push_str(&t.form);
        if !t.misc.split('|').any(|m| m == "SpaceAfter=No") {
            s.push(' ');
        }
    }
    s.trim_end().to_string()
}

/// Parses a CoNLL-U document. Multiword-token ranges (`1-2`) and empty
/// nodes (`1.1`) are skipped. Sentences without `# sent_id` are numbered
/// from 1; without `# text` the text is rebuilt from the forms.
pub fn parse_conllu(content: &str) -> Result<Vec<ParsedSentence>, ConlluError> {
    let mut out = Vec::new();
    let mut comments: Vec<String> = Vec::new();
    let mut rows: Vec<(usize, &str)> = Vec::new();
    let lines: Vec<&str> = content.lines().collect();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !rows.is_empty() || !comments.is_empty() {
                out.push(build_sentence(std::mem::take(&mut comments), std::mem::take(&mut rows), out.len() + 1, i + 1)?);
            }
        } else if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
        } else {
            rows.push((i + 1, line));
        }
    }
    if !rows.is_empty() || !comments.is_empty() {
        out.push(build_sentence(comments, rows, out.len() + 1, lines.len())?);
    }
    Ok(out)
}

fn comment_value<'a>(comments: &'a [String], key: &str) -> Option<&'a str> {
    comments.iter().find_map(|c| {
        let (k, v) = c.split_once('=')?;
        (k.trim() == key).then(|| v.trim())
    })
}

fn build_sentence(comments: Vec<String>, rows: Vec<(usize, &str)>, ordinal: usize, end_line: usize) -> Result<ParsedSentence, ConlluError> {
    let sent_id = comment_value(&comments, "sent_id").map_or_else(|| ordinal.to_string(), str::to_string);
    let fail = |line: usize, message: String| ConlluError { sent_id: sent_id.clone(), line, message };
    if rows.is_empty() {
        return Err(fail(end_line, "sentence has no tokens".into()));
    }
    let mut tokens = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let cols: Vec<&str> = row.split('\t').collect();
        if cols.len() != 10 {
            return Err(fail(line, format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0].parse().map_err(|_| fail(line, format!("bad token id '{}'", cols[0])))?;
        if id != tokens.len() + 1 {
            return Err(fail(line, format!("token id {id} out of sequence")));
        }
        let head: usize = cols[6].parse().map_err(|_| fail(line, format!("non-integer head '{}'", cols[6])))?;
        let upos: Upos = cols[3].parse().map_err(|m| fail(line, m))?;
        tokens.push(DepToken {
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos,
            xpos: cols[4].to_string(),
            feats: cols[5].to_string(),
            head,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
        });
    }
    let n = tokens.len();
    if let Some(t) = tokens.iter().find(|t| t.head > n) {
        return Err(fail(end_line, format!("token {} has head {} outside 0..={n}", t.id, t.head)));
    }
    let roots = tokens.iter().filter(|t| t.head == 0).count();
    if roots != 1 {
        return Err(fail(end_line, format!("expected exactly one root, found {roots}")));
    }
    for start in 0..n {
        let mut cur = start;
        for _ in 0..=n {
            match tokens[cur].head {
                0 => break,
                h => cur = h - 1,
            }
            if cur == start {
                return Err(fail(end_line, format!("head cycle through token {}", start + 1)));
            }
        }
    }
    let raw_text = comment_value(&comments, "text").map_or_else(|| text_from_tokens(&tokens), str::to_string);
    Ok(ParsedSentence { sent_id, comments, tokens, raw_text, constituency: None })
}

/// Writes sentences back as CoNLL-U (comments first, blank line after each
/// sentence).
pub fn to_conllu(sentences: &[ParsedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        for c in &s.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        for t in &s.tokens {
            let cols = [
                t.id.to_string(),
                t.form.clone(),
                t.lemma.clone(),
                t.upos.to_string(),
                t.xpos.clone(),
                t.feats.clone(),
                t.head.to_string(),
                t.deprel.clone(),
                t.deps.clone(),
                t.misc.clone(),
            ];
            out.push_str(&cols.join("\t"));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
