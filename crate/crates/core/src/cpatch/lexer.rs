//! Lexical C scanner. Comments and preprocessor lines produce no tokens;
//! string and character literals are single tokens.

use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub span: Range<usize>,
}

impl Token {
    pub fn text<'s>(&self, src: &'s str) -> &'s str {
        &src[self.span.clone()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {what}")]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub what: &'static str,
}

/// Byte range of a preprocessor directive line (continuations included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub directives: Vec<Directive>,
}

const PUNCT: &[&str] = &[
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=",
    "*=", "/=", "%=", "&=", "^=", "|=", "##",
];

fn position(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn error(src: &str, at: usize, what: &'static str) -> LexError {
    let (line, column) = position(src, at);
    LexError { line, column, what }
}

pub fn lex(src: &str) -> Result<Lexed, LexError> {
    let b = src.as_bytes();
    let mut out = Lexed::default();
    let mut i = 0;
    let mut line_start = true;
    while i < b.len() {
        let c = b[i];
        if c == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && b.get(i + 1) == Some(&b'/') {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && b.get(i + 1) == Some(&b'*') {
            let end = src[i + 2..]
                .find("*/")
                .ok_or_else(|| error(src, i, "unterminated comment"))?;
            i += end + 4;
            continue;
        }
        if c == b'#' && line_start {
            let start = i;
            while i < b.len() && b[i] != b'\n' {
                if b[i] == b'\\' && b.get(i + 1) == Some(&b'\n') {
                    i += 1;
                } else if b[i] == b'/' && b.get(i + 1) == Some(&b'*') {
                    let end = src[i + 2..]
                        .find("*/")
                        .ok_or_else(|| error(src, i, "unterminated comment"))?;
                    i += end + 3;
                }
                i += 1;
            }
            out.directives.push(Directive { span: start..i });
            continue;
        }
        line_start = false;
        let start = i;
        let kind = if c == b'"' || c == b'\'' {
            i += 1;
            loop {
                match b.get(i) {
                    None | Some(b'\n') => {
                        return Err(error(
                            src,
                            start,
                            if c == b'"' {
                                "unterminated string literal"
                            } else {
                                "unterminated character literal"
                            },
                        ))
                    }
                    Some(b'\\') => i += 2,
                    Some(&q) if q == c => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            if c == b'"' {
                TokKind::Str
            } else {
                TokKind::Char
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            TokKind::Ident
        } else if c.is_ascii_digit() || (c == b'.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < b.len() {
                let d = b[i];
                let exp_sign = (d == b'+' || d == b'-') && matches!(b[i - 1], b'e' | b'E' | b'p' | b'P');
                if d.is_ascii_alphanumeric() || d == b'.' || d == b'_' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            TokKind::Number
        } else if !c.is_ascii() {
            return Err(error(src, i, "non-ASCII character outside a literal or comment"));
        } else {
            i += PUNCT
                .iter()
                .find(|p| src[i..].starts_with(**p))
                .map_or(1, |p| p.len());
            TokKind::Punct
        };
        out.tokens.push(Token { kind, span: start..i });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<&str> {
        lex(src).unwrap().tokens.iter().map(|t| t.text(src)).collect()
    }

    #[test]
    fn tokens_and_trivia() {
        let src = "#include <stdio.h>\nint x = a*b + c; // a*b+c\n/* a*b+c */ s = \"a*b+c\"; c = '\\'';";
        assert_eq!(
            texts(src),
            ["int", "x", "=", "a", "*", "b", "+", "c", ";", "s", "=", "\"a*b+c\"", ";", "c", "=", "'\\''", ";"]
        );
        assert_eq!(lex(src).unwrap().directives.len(), 1);
    }

    #[test]
    fn multi_char_punctuators() {
        assert_eq!(texts("a->b <<= c++ 1.5e+3"), ["a", "->", "b", "<<=", "c", "++", "1.5e+3"]);
    }

    #[test]
    fn directive_with_continuation() {
        let src = "#define M(a) \\\n  a*2\nx;";
        assert_eq!(texts(src), ["x", ";"]);
    }

    #[test]
    fn unterminated() {
        assert_eq!(lex("x = \"abc\n").unwrap_err().what, "unterminated string literal");
        let e = lex("x;\n  /* open").unwrap_err();
        assert_eq!((e.line, e.column, e.what), (2, 3, "unterminated comment"));
    }
}
