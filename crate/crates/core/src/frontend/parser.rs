//! Recursive-descent parser for the `.ci` format.
//!
//! ```text
//! spec   := "ci" ident "(" "opcode" "=" int ")" "{" decl+ assign "}"
//! decl   := ("input" | "output") ident ":" ("signed" | "unsigned") "<" int ">" ";"
//! assign := ident "=" expr ";"
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/" | "%" | "mod") factor)*
//! factor := ident | "(" expr ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use super::{CiSpec, ExprTree, OpKind, OperandDecl, Signedness, MAX_OPCODE, MAX_OPERAND_WIDTH};
use crate::names;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("width {0} out of range (1..=32)")]
    WidthOutOfRange(u64),
    #[error("opcode {0} out of range (0..=4)")]
    OpcodeOutOfRange(u64),
    #[error("illegal identifier `{name}`: {reason}")]
    IllegalIdentifier { name: String, reason: String },
    #[error("exactly one output must be declared, found {0}")]
    OutputCount(usize),
    #[error("assignment target `{found}` is not the declared output `{expected}`")]
    AssignTargetMismatch { expected: String, found: String },
    #[error("output `{0}` may not appear in the expression")]
    OutputInExpression(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "ci", "opcode", "input", "output", "signed", "unsigned", "mod",
];

fn lex(text: &str) -> Result<Vec<(Tok, Position)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Position { line, column: col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while let Some(&c) = chars.peek() {
                if let Some(d) = c.to_digit(10) {
                    n = n.saturating_mul(10).saturating_add(d as u64);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Int(n), pos));
        } else if "(){}:;<>=+-*/%".contains(c) {
            chars.next();
            col += 1;
            out.push((Tok::Sym(c), pos));
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax {
                    expected: "a token".into(),
                    found: format!("`{c}`"),
                },
                pos,
            });
        }
    }
    out.push((Tok::Eof, Position { line, column: col }));
    Ok(out)
}

/// Expression as written, before operator kinds are resolved by signedness.
enum RawExpr {
    Leaf(String, Position),
    Bin(char, Box<RawExpr>, Box<RawExpr>),
}

struct Parser {
    toks: Vec<(Tok, Position)>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn pos(&self) -> Position {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> (Tok, Position) {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
            pos: self.pos(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Position), ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let (tok, pos) = self.bump();
                match tok {
                    Tok::Ident(s) => Ok((s, pos)),
                    _ => unreachable!(),
                }
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn expect_int(&mut self) -> Result<(u64, Position), ParseError> {
        match *self.peek() {
            Tok::Int(n) => {
                let (_, pos) = self.bump();
                Ok((n, pos))
            }
            _ => Err(self.error("an integer")),
        }
    }

    fn parse_decl(&mut self) -> Result<(bool, OperandDecl, Position), ParseError> {
        let is_output = if self.is_keyword("input") {
            false
        } else if self.is_keyword("output") {
            true
        } else {
            return Err(self.error("`input` or `output`"));
        };
        self.bump();
        let (name, pos) = self.expect_ident()?;
        self.expect_sym(':')?;
        let signedness = if self.is_keyword("signed") {
            Signedness::Signed
        } else if self.is_keyword("unsigned") {
            Signedness::Unsigned
        } else {
            return Err(self.error("`signed` or `unsigned`"));
        };
        self.bump();
        self.expect_sym('<')?;
        let (width, wpos) = self.expect_int()?;
        if width == 0 || width > MAX_OPERAND_WIDTH as u64 {
            return Err(ParseError {
                kind: ParseErrorKind::WidthOutOfRange(width),
                pos: wpos,
            });
        }
        self.expect_sym('>')?;
        self.expect_sym(';')?;
        Ok((
            is_output,
            OperandDecl {
                name,
                signedness,
                width: width as u32,
            },
            pos,
        ))
    }

    fn parse_expr(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.parse_term()?;
        while let Tok::Sym(op @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.parse_term()?;
            lhs = RawExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_term(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            let op = match self.peek() {
                Tok::Sym(c @ ('*' | '/' | '%')) => *c,
                // `m` stands for the `mod` keyword
                Tok::Ident(s) if s == "mod" => 'm',
                _ => break,
            };
            self.bump();
            let rhs = self.parse_factor()?;
            lhs = RawExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<RawExpr, ParseError> {
        if *self.peek() == Tok::Sym('(') {
            self.bump();
            let e = self.parse_expr()?;
            self.expect_sym(')')?;
            return Ok(e);
        }
        match self.expect_ident() {
            Ok((name, pos)) => Ok(RawExpr::Leaf(name, pos)),
            Err(_) => Err(self.error("an identifier or `(`")),
        }
    }
}

/// Resolves operator symbols to [`OpKind`]s, returning the tree and its signedness.
fn resolve(
    raw: RawExpr,
    decls: &HashMap<String, OperandDecl>,
    output: &OperandDecl,
) -> Result<(ExprTree, Signedness), ParseError> {
    match raw {
        RawExpr::Leaf(name, pos) => {
            if name == output.name {
                return Err(ParseError {
                    kind: ParseErrorKind::OutputInExpression(name),
                    pos,
                });
            }
            match decls.get(&name) {
                Some(d) => Ok((ExprTree::Leaf(name), d.signedness)),
                None => Err(ParseError {
                    kind: ParseErrorKind::UndeclaredIdentifier(name),
                    pos,
                }),
            }
        }
        RawExpr::Bin(op, l, r) => {
            let (left, ls) = resolve(*l, decls, output)?;
            let (right, rs) = resolve(*r, decls, output)?;
            let s = ls.join(rs);
            let signed = s.is_signed();
            let kind = match op {
                '+' => OpKind::Add,
                '-' => OpKind::Sub,
                '*' => OpKind::Mul,
                '/' if signed => OpKind::Divs,
                '/' => OpKind::Divu,
                '%' if signed => OpKind::Rems,
                '%' => OpKind::Remu,
                'm' if signed => OpKind::Mods,
                'm' => OpKind::Modu,
                _ => unreachable!("operator symbols are produced by the parser"),
            };
            Ok((ExprTree::bin(kind, left, right), s))
        }
    }
}

/// Parses `.ci` text into a validated [`CiSpec`].
pub fn parse_ci_spec(text: &str) -> Result<CiSpec, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        idx: 0,
    };
    p.expect_keyword("ci")?;
    let (name, name_pos) = p.expect_ident()?;
    if let Some(reason) = names::entity_name_problem(&name) {
        return Err(ParseError {
            kind: ParseErrorKind::IllegalIdentifier {
                name,
                reason: reason.into(),
            },
            pos: name_pos,
        });
    }
    p.expect_sym('(')?;
    p.expect_keyword("opcode")?;
    p.expect_sym('=')?;
    let (opcode, opcode_pos) = p.expect_int()?;
    if opcode > MAX_OPCODE as u64 {
        return Err(ParseError {
            kind: ParseErrorKind::OpcodeOutOfRange(opcode),
            pos: opcode_pos,
        });
    }
    p.expect_sym(')')?;
    p.expect_sym('{')?;

    let mut inputs: Vec<OperandDecl> = Vec::new();
    let mut outputs: Vec<OperandDecl> = Vec::new();
    let mut seen: HashMap<String, String> = HashMap::new();
    while p.is_keyword("input") || p.is_keyword("output") {
        let (is_output, decl, pos) = p.parse_decl()?;
        if seen.contains_key(&decl.name) {
            return Err(ParseError {
                kind: ParseErrorKind::DuplicateDeclaration(decl.name),
                pos,
            });
        }
        let folded = decl.name.to_ascii_lowercase();
        if let Some(other) = seen.values().find(|v| v.to_ascii_lowercase() == folded) {
            return Err(ParseError {
                kind: ParseErrorKind::IllegalIdentifier {
                    reason: format!("differs from `{other}` only in case"),
                    name: decl.name,
                },
                pos,
            });
        }
        if !is_output {
            if let Some(reason) = names::operand_name_problem(&decl.name) {
                return Err(ParseError {
                    kind: ParseErrorKind::IllegalIdentifier {
                        name: decl.name,
                        reason: reason.into(),
                    },
                    pos,
                });
            }
        }
        seen.insert(decl.name.clone(), decl.name.clone());
        if is_output {
            outputs.push(decl);
        } else {
            inputs.push(decl);
        }
    }
    if inputs.is_empty() && outputs.is_empty() {
        return Err(p.error("`input` or `output`"));
    }
    if outputs.len() != 1 {
        return Err(ParseError {
            kind: ParseErrorKind::OutputCount(outputs.len()),
            pos: p.pos(),
        });
    }
    let output = outputs.pop().unwrap();

    let (target, target_pos) = p.expect_ident()?;
    p.expect_sym('=')?;
    let raw = p.parse_expr()?;
    p.expect_sym(';')?;
    p.expect_sym('}')?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }

    let decls: HashMap<String, OperandDecl> = inputs
        .iter()
        .map(|d| (d.name.clone(), d.clone()))
        .collect();
    let (expr, _) = resolve(raw, &decls, &output)?;
    // Checked after the expression so undeclared operands are reported first.
    if target != output.name {
        return Err(ParseError {
            kind: if decls.contains_key(&target) || seen.contains_key(&target) {
                ParseErrorKind::AssignTargetMismatch {
                    expected: output.name.clone(),
                    found: target,
                }
            } else {
                ParseErrorKind::UndeclaredIdentifier(target)
            },
            pos: target_pos,
        });
    }

    Ok(CiSpec {
        name,
        opcode: opcode as u32,
        inputs,
        output,
        expr,
    })
}
