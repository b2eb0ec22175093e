//! Penn-Treebank style bracketed constituency trees.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("tree line {line}: {message}")]
pub struct TreeError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tree {
    Leaf(String),
    Node { label: String, children: Vec<Tree> },
}

impl Tree {
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Tree::Leaf(w) => out.push(w),
            Tree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// For each leaf, the number of brackets that close right after it,
    /// i.e. the constituents whose last leaf it is.
    pub fn closing_counts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk_closing(&mut out);
        out
    }

    fn walk_closing(&self, out: &mut Vec<usize>) {
        if let Tree::Node { children, .. } = self {
            for c in children {
                match c {
                    Tree::Leaf(_) => out.push(0),
                    node => node.walk_closing(out),
                }
            }
            if let Some(last) = out.last_mut() {
                *last += 1;
            }
        }
    }

    /// For each leaf, how many brackets enclose it.
    pub fn leaf_depths(&self) -> Vec<usize> {
        fn walk(t: &Tree, depth: usize, out: &mut Vec<usize>) {
            match t {
                Tree::Leaf(_) => out.push(depth),
                Tree::Node { children, .. } => children.iter().for_each(|c| walk(c, depth + 1, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, 0, &mut out);
        out
    }

    pub fn max_depth(&self) -> usize {
        self.leaf_depths().into_iter().max().unwrap_or(0)
    }

    pub fn to_bracketed(&self) -> String {
        match self {
            Tree::Leaf(w) => w.clone(),
            Tree::Node { label, children } => {
                let inner: Vec<String> = children.iter().map(Tree::to_bracketed).collect();
                if label.is_empty() {
                    format!("({})", inner.join(" "))
                } else {
                    format!("({label} {})", inner.join(" "))
                }
            }
        }
    }
}

/// Parses one bracketed tree. The first atom after `(` is the node label
/// unless another bracket follows immediately (unlabeled node).
pub fn parse_bracketed(s: &str) -> Result<Tree, String> {
    let mut toks = Vec::new();
    let mut atom = String::new();
    for c in s.chars() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !atom.is_empty() {
                toks.push(std::mem::take(&mut atom));
            }
            if !c.is_whitespace() {
                toks.push(c.to_string());
            }
        } else {
            atom.push(c);
        }
    }
    if !atom.is_empty() {
        toks.push(atom);
    }
    let mut pos = 0;
    let tree = parse_node(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(format!("trailing input after tree: '{}'", toks[pos..].join(" ")));
    }
    Ok(tree)
}

fn parse_node(toks: &[String], pos: &mut usize) -> Result<Tree, String> {
    if toks.get(*pos).map(String::as_str) != Some("(") {
        return Err("expected '('".into());
    }
    *pos += 1;
    let label = match toks.get(*pos).map(String::as_str) {
        Some("(") | Some(")") => String::new(),
        Some(l) => {
            *pos += 1;
            l.to_string()
        }
        None => return Err("unbalanced brackets".into()),
    };
    let mut children = Vec::new();
    loop {
        match toks.get(*pos).map(String::as_str) {
            Some(")") => {
                *pos += 1;
                break;
            }
            Some("(") => children.push(parse_node(toks, pos)?),
            Some(w) => {
                children.push(Tree::Leaf(w.to_string()));
                *pos += 1;
            }
            None => return Err("unbalanced brackets".into()),
        }
    }
    if children.is_empty() {
        // A bare "(word)" is a leaf wrapped in brackets.
        return Ok(Tree::Node { label: String::new(), children: vec![Tree::Leaf(label)] });
    }
    Ok(Tree::Node { label, children })
}

/// Reads a tree file: one tree per non-blank line, either `id<TAB>tree` or
/// a bare tree (matched to sentences by position).
pub fn parse_tree_file(content: &str) -> Result<Vec<(Option<String>, Tree)>, TreeError> {
    content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let (id, body) = match l.split_once('\t') {
                Some((id, body)) => (Some(id.trim().to_string()), body),
                None => (None, l),
            };
            parse_bracketed(body.trim()).map(|t| (id, t)).map_err(|message| TreeError { line: i + 1, message })
        })
        .collect()
}
