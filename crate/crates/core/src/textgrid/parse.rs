use std::path::Path;

use super::{Alignment, Interval, Tier, TIME_EPS};
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("TextGrid line {line}: {message}")]
pub struct TextGridError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> TextGridError {
    TextGridError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
enum Lexeme {
    Str(String),
    Num(f64),
    Flag(bool),
}

#[derive(Debug)]
struct Tok {
    lex: Lexeme,
    line: usize,
}

/// Splits either TextGrid text format into the values that matter: quoted
/// strings, numbers and `<exists>`/`<absent>` flags. Long-format keys
/// (`xmin =`, `intervals: size =`), bracketed item indices and `!` comments
/// are skipped, which reduces both formats to the same value stream.
fn lex(src: &str) -> Result<Vec<Tok>, TextGridError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '!' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(c) => {
                            if c == '\n' {
                                line += 1;
                            }
                            s.push(c);
                        }
                        None => return Err(err(start, "unterminated string")),
                    }
                }
                out.push(Tok { lex: Lexeme::Str(s), line: start });
            }
            '[' => {
                for c in chars.by_ref() {
                    if c == ']' {
                        break;
                    }
                    if c == '\n' {
                        line += 1;
                    }
                }
            }
            '<' => {
                chars.next();
                let mut s = String::new();
                for c in chars.by_ref() {
                    if c == '>' {
                        break;
                    }
                    s.push(c);
                }
                match s.as_str() {
                    "exists" => out.push(Tok { lex: Lexeme::Flag(true), line }),
                    "absent" => out.push(Tok { lex: Lexeme::Flag(false), line }),
                    other => return Err(err(line, format!("unknown flag <{other}>"))),
                }
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '"' | '[' | '<' | '!') {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                if word.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '-' | '+' | '.')) {
                    let v: f64 = word.parse().map_err(|_| err(line, format!("bad number '{word}'")))?;
                    out.push(Tok { lex: Lexeme::Num(v), line });
                }
            }
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
    last_line: usize,
}

impl Cursor {
    fn next(&mut self, what: &str) -> Result<&Tok, TextGridError> {
        let tok = self.toks.get(self.pos).ok_or_else(|| err(self.last_line, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn num(&mut self, what: &str) -> Result<(f64, usize), TextGridError> {
        let tok = self.next(what)?;
        match tok.lex {
            Lexeme::Num(v) if v.is_finite() => Ok((v, tok.line)),
            _ => Err(err(tok.line, format!("expected {what}"))),
        }
    }

    fn count(&mut self, what: &str) -> Result<usize, TextGridError> {
        let (v, line) = self.num(what)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(err(line, format!("{what} must be a non-negative integer")));
        }
        Ok(v as usize)
    }

    fn string(&mut self, what: &str) -> Result<(String, usize), TextGridError> {
        let tok = self.next(what)?;
        match &tok.lex {
            Lexeme::Str(s) => Ok((s.clone(), tok.line)),
            _ => Err(err(tok.line, format!("expected {what}"))),
        }
    }
}

/// Parses a long- or short-format TextGrid. Interval labels are trimmed.
/// Each tier must tile `[xmin, xmax]` with sorted, positive-length
/// intervals, and a tier named (or ending in) `words` must be present.
pub fn parse_textgrid(content: &str) -> Result<Alignment, TextGridError> {
    let toks = lex(content.trim_start_matches('\u{feff}'))?;
    let last_line = toks.last().map_or(1, |t| t.line);
    let mut cur = Cursor { toks, pos: 0, last_line };

    let (file_type, line) = cur.string("file type")?;
    if !file_type.starts_with("ooTextFile") {
        return Err(err(line, format!("unsupported file type '{file_type}'")));
    }
    let (class, line) = cur.string("object class")?;
    if class != "TextGrid" {
        return Err(err(line, format!("object class '{class}' is not TextGrid")));
    }
    let (xmin, _) = cur.num("xmin")?;
    let (xmax, line) = cur.num("xmax")?;
    if xmax <= xmin {
        return Err(err(line, "xmax must exceed xmin"));
    }
    let tok = cur.next("tiers flag")?;
    let has_tiers = match tok.lex {
        Lexeme::Flag(f) => f,
        _ => return Err(err(tok.line, "expected <exists> or <absent>")),
    };
    let n_tiers = if has_tiers { cur.count("tier count")? } else { 0 };

    let mut tiers = Vec::with_capacity(n_tiers);
    for _ in 0..n_tiers {
        let (class, line) = cur.string("tier class")?;
        if class != "IntervalTier" {
            return Err(err(line, format!("unsupported tier class '{class}'")));
        }
        let (name, _) = cur.string("tier name")?;
        let (tmin, _) = cur.num("tier xmin")?;
        let (tmax, tline) = cur.num("tier xmax")?;
        let n = cur.count("interval count")?;
        let mut intervals = Vec::with_capacity(n);
        for _ in 0..n {
            let (start, line) = cur.num("interval xmin")?;
            let (end, _) = cur.num("interval xmax")?;
            let (label, _) = cur.string("interval text")?;
            if end <= start {
                return Err(err(line, format!("interval end {end} is not after start {start}")));
            }
            if let Some(prev) = intervals.last() {
                let prev: &Interval = prev;
                if start < prev.end - TIME_EPS {
                    return Err(err(line, format!("non-monotonic times: interval starts at {start} before previous end {}", prev.end)));
                }
                if start > prev.end + TIME_EPS {
                    return Err(err(line, format!("gap between {} and {start}", prev.end)));
                }
            } else if (start - tmin).abs() > TIME_EPS {
                return Err(err(line, format!("first interval starts at {start}, tier starts at {tmin}")));
            }
            intervals.push(Interval { start, end, label: label.trim().to_string() });
        }
        match intervals.last() {
            Some(last) if (last.end - tmax).abs() > TIME_EPS => {
                return Err(err(tline, format!("tier '{name}' intervals end at {}, tier ends at {tmax}", last.end)));
            }
            None => return Err(err(tline, format!("tier '{name}' has no intervals"))),
            _ => {}
        }
        if (tmin - xmin).abs() > TIME_EPS || (tmax - xmax).abs() > TIME_EPS {
            return Err(err(tline, format!("tier '{name}' spans [{tmin}, {tmax}], grid spans [{xmin}, {xmax}]")));
        }
        tiers.push(Tier { name, intervals });
    }

    let alignment = Alignment { xmin, xmax, tiers };
    if alignment.words().is_none() {
        return Err(err(last_line, "no 'words' tier"));
    }
    Ok(alignment)
}

/// UTF-16 when a byte-order mark says so or the data has NUL bytes
/// (ASCII-range UTF-16), otherwise UTF-8.
pub fn decode_bytes(bytes: &[u8]) -> Option<String> {
    let utf16 = |data: &[u8], le: bool| {
        if !data.len().is_multiple_of(2) {
            return None;
        }
        let units: Vec<u16> = data
            .chunks_exact(2)
            .map(|c| if le { u16::from_le_bytes([c[0], c[1]]) } else { u16::from_be_bytes([c[0], c[1]]) })
            .collect();
        String::from_utf16(&units).ok()
    };
    match bytes {
        [0xFF, 0xFE, rest @ ..] => utf16(rest, true),
        [0xFE, 0xFF, rest @ ..] => utf16(rest, false),
        _ if bytes.contains(&0) => {
            let odd_nuls = bytes.iter().skip(1).step_by(2).filter(|&&b| b == 0).count();
            let even_nuls = bytes.iter().step_by(2).filter(|&&b| b == 0).count();
            utf16(bytes, odd_nuls >= even_nuls)
        }
        _ => std::str::from_utf8(bytes).ok().map(str::to_string),
    }
}

pub fn read_textgrid(path: &Path) -> Result<Alignment, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = decode_bytes(&bytes).ok_or_else(|| Error::from(err(1, "neither UTF-8 nor UTF-16")))?;
    Ok(parse_textgrid(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const LONG: &str = r#"File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 1
tiers? <exists>
size = 2
item []:
    item [1]:
        class = "IntervalTier"
        name = "words"
        xmin = 0
        xmax = 1
        intervals: size = 3
        intervals [1]:
            xmin = 0
            xmax = 0.5
            text = "most"
        intervals [2]:
            xmin = 0.5
            xmax = 0.62
            text = ""
        intervals [3]:
            xmin = 0.62
            xmax = 1
            text = "links"
    item [2]:
        class = "IntervalTier"
        name = "phones"
        xmin = 0
        xmax = 1
        intervals: size = 2
        intervals [1]:
            xmin = 0
            xmax = 0.5
            text = "M OW1 S T"
        intervals [2]:
            xmin = 0.5
            xmax = 1
            text = "say ""hi"""
"#;

    const SHORT: &str = "File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n0\n1\n<exists>\n1\n\"IntervalTier\"\n\"words\"\n0\n1\n3\n0\n0.5\n\"most\"\n0.5\n0.62\n\"\"\n0.62\n1\n\"links\"\n";

    #[test]
    fn long_format() {
        let a = parse_textgrid(LONG).unwrap();
        assert_eq!(a.tiers.len(), 2);
        let w = a.words().unwrap();
        assert_eq!(w.intervals.len(), 3);
        assert_eq!(w.intervals[2], Interval::new(0.62, 1.0, "links"));
        assert_eq!(a.phones().unwrap().intervals[1].label, "say \"hi\"");
    }

    #[test]
    fn short_format_matches_long() {
        let s = parse_textgrid(SHORT).unwrap();
        let l = parse_textgrid(LONG).unwrap();
        assert_eq!(s.words(), l.words());
    }

    #[test]
    fn end_before_start_reports_line() {
        let bad = LONG.replace("xmax = 0.62\n            text = \"\"", "xmax = 0.4\n            text = \"\"");
        let e = parse_textgrid(&bad).unwrap_err();
        assert_eq!(e.line, 20, "{e}");
        assert!(e.message.contains("not after start"));
    }

    #[test]
    fn missing_words_tier() {
        let bad = LONG.replace("\"words\"", "\"tokens\"");
        assert!(parse_textgrid(&bad).unwrap_err().message.contains("words"));
    }

    #[test]
    fn malformed_header() {
        assert!(parse_textgrid("File type = \"ooTextFile\"\nObject class = \"Pitch\"\n").is_err());
        assert!(parse_textgrid("garbage").is_err());
        assert!(parse_textgrid("").is_err());
    }

    #[test]
    fn overlapping_intervals_rejected() {
        let bad = LONG.replace("xmin = 0.62\n", "xmin = 0.55\n");
        assert!(parse_textgrid(&bad).unwrap_err().message.contains("non-monotonic"));
    }

    #[test]
    fn utf16_fallback() {
        let mut bytes = vec![0xFF, 0xFE];
        for u in LONG.encode_utf16() {
            bytes.extend_from_slice(&u.to_le_bytes());
        }
        let text = decode_bytes(&bytes).unwrap();
        assert_eq!(parse_textgrid(&text).unwrap(), parse_textgrid(LONG).unwrap());
        // No BOM, big-endian.
        let be: Vec<u8> = LONG.encode_utf16().flat_map(|u| u.to_be_bytes()).collect();
        assert_eq!(decode_bytes(&be).unwrap(), LONG);
    }
}
