//! Line-oriented tokenizer.
//!
//! A statement is one line: an optional run of leading colons, then
//! `Key:` segments. The text after the last colon is a single [`Tok::Value`]
//! token, which may contain spaces (`Forest Clearing`). After the keywords
//! `Condition`, `SetValue` and `SetDo` the rest of the line, and any
//! continuation lines, are lexed as expression tokens instead.

use alloc::string::String;
use alloc::vec::Vec;

use super::{BslError, Location};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// A run of `n` colons.
    Colon(u8),
    Ident(String),
    /// Free text in value position.
    Value(String),
    /// `$`
    Dollar,
    /// `$$`
    DoubleDollar,
    /// `$Name`
    Var(String),
    Dot,
    Number(f64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Plus,
    EqEq,
    EqEqEq,
    Lt,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Newline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub loc: Location,
}

/// Keywords whose payload is lexed as an expression.
pub const EXPRESSION_KEYWORDS: [&str; 3] = ["Condition", "SetValue", "SetDo"];

pub fn tokenize(source: &str) -> Result<Vec<Token>, BslError> {
    let lines: Vec<&str> = source.lines().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = strip_comment(lines[i]);
        if line.trim().is_empty() {
            i += 1;
            continue;
        }
        let expression_mode = lex_statement(line, i + 1, &mut out)?;
        if expression_mode {
            while let Some(next) = continuation_after(&lines, i) {
                lex_expression(strip_comment(lines[next]), next + 1, 1, &mut out)?;
                i = next;
            }
        }
        let col = line.chars().count() as u32 + 1;
        out.push(Token {
            tok: Tok::Newline,
            loc: Location::new(i as u32 + 1, col),
        });
        i += 1;
    }
    Ok(out)
}

/// Tokenizes bare expression text, as found in a `Condition` payload.
pub fn tokenize_expression(text: &str) -> Result<Vec<Token>, BslError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        lex_expression(line, n + 1, 1, &mut out)?;
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    let mut quote: Option<char> = None;
    for (idx, c) in line.char_indices() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '\'' || c == '"' => quote = Some(c),
            None if c == '#' => return &line[..idx],
            None => {}
        }
    }
    line
}

/// Index of the next line continuing an expression payload started on or
/// before line `current`.
fn continuation_after(lines: &[&str], current: usize) -> Option<usize> {
    let mut j = current + 1;
    while j < lines.len() {
        let raw = lines[j].trim_start();
        if raw.is_empty() {
            j += 1;
            continue;
        }
        if raw.starts_with(':') || raw.starts_with('#') || looks_like_header(raw) {
            return None;
        }
        return Some(j);
    }
    None
}

fn looks_like_header(line: &str) -> bool {
    let ident_len = line
        .char_indices()
        .take_while(|(i, c)| c.is_alphabetic() || *c == '_' || (*i > 0 && c.is_ascii_digit()))
        .count();
    ident_len > 0 && line[ident_len..].trim_start().starts_with(':')
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_char)
}

/// Lexes one statement line. Returns true when the line switched to
/// expression mode.
fn lex_statement(line: &str, line_no: usize, out: &mut Vec<Token>) -> Result<bool, BslError> {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let loc = |col: usize| Location::new(line_no as u32, col as u32 + 1);
    let mut pos = 0;
    while pos < chars.len() && chars[pos].1.is_whitespace() {
        pos += 1;
    }
    let colon_start = pos;
    while pos < chars.len() && chars[pos].1 == ':' {
        pos += 1;
    }
    if pos > colon_start {
        let run = pos - colon_start;
        if run > u8::MAX as usize {
            return Err(BslError::lex(loc(colon_start), "colon run too long"));
        }
        out.push(Token {
            tok: Tok::Colon(run as u8),
            loc: loc(colon_start),
        });
    }
    loop {
        while pos < chars.len() && chars[pos].1.is_whitespace() {
            pos += 1;
        }
        if pos >= chars.len() {
            return Ok(false);
        }
        let seg_start = pos;
        while pos < chars.len() && chars[pos].1 != ':' {
            pos += 1;
        }
        let text = slice(line, &chars, seg_start, pos);
        if pos >= chars.len() {
            let value = text.trim();
            if !value.is_empty() {
                out.push(Token {
                    tok: Tok::Value(String::from(value)),
                    loc: loc(seg_start),
                });
            }
            return Ok(false);
        }
        let key = text.trim();
        if !is_identifier(key) {
            let bad = text
                .char_indices()
                .find(|(_, c)| !is_ident_char(*c))
                .map(|(i, _)| seg_start + text[..i].chars().count())
                .unwrap_or(seg_start);
            let found = chars.get(bad).map(|c| c.1).unwrap_or(':');
            return Err(BslError::lex(
                loc(bad),
                alloc::format!("illegal character {found:?} in keyword position"),
            ));
        }
        out.push(Token {
            tok: Tok::Ident(String::from(key)),
            loc: loc(seg_start),
        });
        out.push(Token {
            tok: Tok::Colon(1),
            loc: loc(pos),
        });
        pos += 1;
        if EXPRESSION_KEYWORDS.contains(&key) {
            let rest_start = chars.get(pos).map(|c| c.0).unwrap_or(line.len());
            lex_expression(&line[rest_start..], line_no, pos + 1, out)?;
            return Ok(true);
        }
    }
}

fn slice<'a>(line: &'a str, chars: &[(usize, char)], from: usize, to: usize) -> &'a str {
    let start = chars.get(from).map(|c| c.0).unwrap_or(line.len());
    let end = chars.get(to).map(|c| c.0).unwrap_or(line.len());
    &line[start..end]
}

fn lex_expression(
    text: &str,
    line_no: usize,
    first_col: usize,
    out: &mut Vec<Token>,
) -> Result<(), BslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let loc = |p: usize| Location::new(line_no as u32, (first_col + p) as u32);
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let peek = |k: usize| chars.get(start + k).copied();
        let tok = match c {
            '$' => {
                if peek(1) == Some('$') {
                    pos += 2;
                    Tok::DoubleDollar
                } else if peek(1).is_some_and(is_ident_start) {
                    pos += 1;
                    let s = pos;
                    while pos < chars.len() && is_ident_char(chars[pos]) {
                        pos += 1;
                    }
                    Tok::Var(chars[s..pos].iter().collect())
                } else {
                    pos += 1;
                    Tok::Dollar
                }
            }
            '.' => {
                pos += 1;
                Tok::Dot
            }
            '(' => {
                pos += 1;
                Tok::LParen
            }
            ')' => {
                pos += 1;
                Tok::RParen
            }
            '{' => {
                pos += 1;
                Tok::LBrace
            }
            '}' => {
                pos += 1;
                Tok::RBrace
            }
            ',' => {
                pos += 1;
                Tok::Comma
            }
            ':' => {
                pos += 1;
                Tok::Colon(1)
            }
            '+' => {
                pos += 1;
                Tok::Plus
            }
            '=' => {
                if peek(1) == Some('=') && peek(2) == Some('=') {
                    pos += 3;
                    Tok::EqEqEq
                } else if peek(1) == Some('=') {
                    pos += 2;
                    Tok::EqEq
                } else {
                    return Err(BslError::lex(loc(start), "illegal character '=' (use `==`)"));
                }
            }
            '<' => {
                pos += 1;
                Tok::Lt
            }
            '>' => {
                if peek(1) == Some('=') {
                    pos += 2;
                    Tok::Ge
                } else {
                    pos += 1;
                    Tok::Gt
                }
            }
            '&' if peek(1) == Some('&') => {
                pos += 2;
                Tok::AndAnd
            }
            '|' if peek(1) == Some('|') => {
                pos += 2;
                Tok::OrOr
            }
            '\'' | '"' => {
                let quote = c;
                pos += 1;
                let mut s = String::new();
                loop {
                    match chars.get(pos) {
                        None => return Err(BslError::lex(loc(start), "unterminated string")),
                        Some('\\') => {
                            match chars.get(pos + 1) {
                                Some(esc) => s.push(*esc),
                                None => {
                                    return Err(BslError::lex(loc(start), "unterminated string"))
                                }
                            }
                            pos += 2;
                        }
                        Some(ch) if *ch == quote => {
                            pos += 1;
                            break;
                        }
                        Some(ch) => {
                            s.push(*ch);
                            pos += 1;
                        }
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() || (c == '-' && peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                pos += 1;
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                if chars.get(pos) == Some(&'.')
                    && chars.get(pos + 1).is_some_and(|d| d.is_ascii_digit())
                {
                    pos += 1;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
                let text: String = chars[start..pos].iter().collect();
                match text.parse::<f64>() {
                    Ok(n) => Tok::Number(n),
                    Err(_) => return Err(BslError::lex(loc(start), "malformed number")),
                }
            }
            c if is_ident_start(c) => {
                while pos < chars.len() && is_ident_char(chars[pos]) {
                    pos += 1;
                }
                Tok::Ident(chars[start..pos].iter().collect())
            }
            other => {
                return Err(BslError::lex(
                    loc(start),
                    alloc::format!("illegal character {other:?}"),
                ))
            }
        };
        out.push(Token {
            tok,
            loc: loc(start),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn restriction_line() {
        assert_eq!(
            kinds(":: Condition: $.warmthLow == 1"),
            vec![
                Tok::Colon(2),
                Tok::Ident("Condition".into()),
                Tok::Colon(1),
                Tok::Dollar,
                Tok::Dot,
                Tok::Ident("warmthLow".into()),
                Tok::EqEq,
                Tok::Number(1.0),
                Tok::Newline,
            ]
        );
    }

    #[test]
    fn empty_and_comment_only() {
        assert!(kinds("").is_empty());
        assert!(kinds("# comment only\n").is_empty());
        assert!(kinds("\n\n   \n").is_empty());
    }

    #[test]
    fn value_position_keeps_spaces() {
        assert_eq!(
            kinds("Location: Individual: Forest Clearing # where the trees are"),
            vec![
                Tok::Ident("Location".into()),
                Tok::Colon(1),
                Tok::Ident("Individual".into()),
                Tok::Colon(1),
                Tok::Value("Forest Clearing".into()),
                Tok::Newline,
            ]
        );
    }

    #[test]
    fn continuation_lines_join_the_statement() {
        let toks = kinds(":: SetValue: $.a == 0\n&& $.b == 0\n\n: Attribute: c");
        let newlines = toks.iter().filter(|t| **t == Tok::Newline).count();
        assert_eq!(newlines, 2);
        assert!(toks.contains(&Tok::AndAnd));
    }

    #[test]
    fn header_ends_continuation() {
        let toks = kinds(":: Condition: $.a == 0\nSurvivor: Individual: John Doe");
        assert_eq!(toks.iter().filter(|t| **t == Tok::Newline).count(), 2);
    }

    #[test]
    fn illegal_character_reports_position() {
        let err = tokenize(":: Condition: $.a == 1\n:: SetValue: $.b @ 2").unwrap_err();
        match err {
            BslError::Lex { loc, .. } => {
                assert_eq!(loc.line, 2);
                assert_eq!(loc.col, 18);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(tokenize("Bad Key: Model: x").is_err());
    }

    #[test]
    fn operators_and_sigils() {
        let toks: Vec<Tok> = tokenize_expression("($$.location).hasDeer === \"1\" || +$Value >= -2.5")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::LParen,
                Tok::DoubleDollar,
                Tok::Dot,
                Tok::Ident("location".into()),
                Tok::RParen,
                Tok::Dot,
                Tok::Ident("hasDeer".into()),
                Tok::EqEqEq,
                Tok::Str("1".into()),
                Tok::OrOr,
                Tok::Plus,
                Tok::Var("Value".into()),
                Tok::Ge,
                Tok::Number(-2.5),
            ]
        );
    }
}
