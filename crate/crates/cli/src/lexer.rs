//! Tokens of the lens-file format.

use std::fmt;

use crate::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    Equals,
    /// `->`
    Arrow,
    /// `~>`
    Squiggle,
    /// `<->`
    Both,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Squiggle => f.write_str("`~>`"),
            Tok::Both => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn ident_char(c: char, next: Option<char>) -> bool {
    c.is_alphanumeric()
        || c == '_'
        || c == '\''
        || c == '.'
        || (c == '-' && next.is_some_and(char::is_alphabetic))
}

/// Splits `text` into tokens. `#` starts a comment running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let simple = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        let tok = if let Some(t) = simple {
            advance(1, &mut i, &mut col);
            t
        } else if c == '-' && next == Some('>') {
            advance(2, &mut i, &mut col);
            Tok::Arrow
        } else if c == '~' && next == Some('>') {
            advance(2, &mut i, &mut col);
            Tok::Squiggle
        } else if c == '<' && next == Some('-') && chars.get(i + 2) == Some(&'>') {
            advance(3, &mut i, &mut col);
            Tok::Both
        } else if c.is_ascii_digit() || (c == '-' && next.is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            advance(1, &mut i, &mut col);
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut col);
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<i64>().map_err(|_| {
                Diagnostic::new(
                    start_line,
                    start_col,
                    format!("integer `{s}` is out of range"),
                )
            })?;
            Tok::Int(n)
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && ident_char(chars[i], chars.get(i + 1).copied()) {
                advance(1, &mut i, &mut col);
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            return Err(Diagnostic::new(
                line,
                col,
                format!("unexpected character `{c}`"),
            ));
        };
        out.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
