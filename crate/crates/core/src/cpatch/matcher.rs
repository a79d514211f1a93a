//! Finds C expressions with the same operator structure as a spec.
//!
//! Expressions are parsed with the full C binary-operator precedence table so
//! that every subtree is a genuine subexpression; calls, casts, unary and
//! assignment forms are kept as opaque nodes whose children are still searched.

use super::lexer::{lex, LexError, TokKind, Token};
use crate::frontend::{CiSpec, ExprTree, OpKind};
use crate::names::is_c_keyword;
use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Ident(String),
    Paren(Box<Node>),
    Binary(String, Box<Node>, Box<Node>),
    Other(Vec<Node>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    shape: Shape,
    /// Token index range.
    toks: Range<usize>,
}

/// A matched expression occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub span: Range<usize>,
    pub tokens: Range<usize>,
}

const TYPE_WORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "_Bool", "const",
    "volatile", "struct", "union", "enum", "restrict",
];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|=", "<<=", ">>="];

fn precedence(op: &str) -> Option<u8> {
    Some(match op {
        "*" | "/" | "%" => 10,
        "+" | "-" => 9,
        "<<" | ">>" => 8,
        "<" | ">" | "<=" | ">=" => 7,
        "==" | "!=" => 6,
        "&" => 5,
        "^" => 4,
        "|" => 3,
        "&&" => 2,
        "||" => 1,
        _ => return None,
    })
}

struct Parser<'a> {
    src: &'a str,
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn text(&self, i: usize) -> Option<&'a str> {
        self.toks.get(i).map(|t| t.text(self.src))
    }

    fn peek(&self) -> Option<&'a str> {
        self.text(self.pos)
    }

    fn peek_punct(&self) -> Option<&'a str> {
        self.toks
            .get(self.pos)
            .filter(|t| t.kind == TokKind::Punct)
            .map(|t| t.text(self.src))
    }

    fn eat(&mut self, s: &str) -> Option<()> {
        (self.peek_punct() == Some(s)).then(|| self.pos += 1)
    }

    fn node(&self, shape: Shape, from: usize) -> Node {
        Node {
            shape,
            toks: from..self.pos,
        }
    }

    fn is_type_start(&self, i: usize) -> bool {
        matches!(self.toks.get(i), Some(t) if t.kind == TokKind::Ident && {
            let w = t.text(self.src);
            TYPE_WORDS.contains(&w) || w.ends_with("_t")
        })
    }

    /// Skips a parenthesized type name starting at `(`.
    fn skip_type(&mut self) -> Option<()> {
        self.eat("(")?;
        let mut depth = 1;
        while depth > 0 {
            match self.peek_punct() {
                Some("(") => depth += 1,
                Some(")") => depth -= 1,
                _ if self.pos >= self.toks.len() => return None,
                _ => {}
            }
            self.pos += 1;
        }
        Some(())
    }

    fn expression(&mut self) -> Option<Node> {
        let from = self.pos;
        let first = self.assignment()?;
        if self.peek_punct() != Some(",") {
            return Some(first);
        }
        let mut items = vec![first];
        while self.eat(",").is_some() {
            items.push(self.assignment()?);
        }
        Some(self.node(Shape::Other(items), from))
    }

    fn assignment(&mut self) -> Option<Node> {
        let from = self.pos;
        let lhs = self.conditional()?;
        match self.peek_punct() {
            Some(op) if ASSIGN_OPS.contains(&op) => {
                self.pos += 1;
                let rhs = self.assignment()?;
                Some(self.node(Shape::Other(vec![lhs, rhs]), from))
            }
            _ => Some(lhs),
        }
    }

    fn conditional(&mut self) -> Option<Node> {
        let from = self.pos;
        let cond = self.binary(1)?;
        if self.eat("?").is_none() {
            return Some(cond);
        }
        let a = self.expression()?;
        self.eat(":")?;
        let b = self.conditional()?;
        Some(self.node(Shape::Other(vec![cond, a, b]), from))
    }

    fn binary(&mut self, min: u8) -> Option<Node> {
        let from = self.pos;
        let mut left = self.unary()?;
        while let Some(op) = self.peek_punct() {
            let Some(p) = precedence(op).filter(|&p| p >= min) else {
                break;
            };
            self.pos += 1;
            let right = self.binary(p + 1)?;
            left = self.node(Shape::Binary(op.to_string(), Box::new(left), Box::new(right)), from);
        }
        Some(left)
    }

    fn unary(&mut self) -> Option<Node> {
        let from = self.pos;
        match self.peek() {
            Some("-" | "+" | "!" | "~" | "*" | "&" | "++" | "--") if self.peek_punct().is_some() => {
                self.pos += 1;
                let operand = self.unary()?;
                Some(self.node(Shape::Other(vec![operand]), from))
            }
            Some("sizeof") => {
                self.pos += 1;
                if self.peek_punct() == Some("(") && self.is_type_start(self.pos + 1) {
                    self.skip_type()?;
                    return Some(self.node(Shape::Other(vec![]), from));
                }
                let operand = self.unary()?;
                Some(self.node(Shape::Other(vec![operand]), from))
            }
            Some("(") if self.is_type_start(self.pos + 1) => {
                self.skip_type()?;
                if self.peek_punct() == Some("{") {
                    return None;
                }
                let operand = self.unary()?;
                Some(self.node(Shape::Other(vec![operand]), from))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Option<Node> {
        let from = self.pos;
        let mut e = self.primary()?;
        loop {
            match self.peek_punct() {
                Some("(") => {
                    self.pos += 1;
                    let mut parts = vec![e];
                    if self.eat(")").is_none() {
                        loop {
                            parts.push(self.assignment()?);
                            if self.eat(",").is_none() {
                                break;
                            }
                        }
                        self.eat(")")?;
                    }
                    e = self.node(Shape::Other(parts), from);
                }
                Some("[") => {
                    self.pos += 1;
                    let index = self.expression()?;
                    self.eat("]")?;
                    e = self.node(Shape::Other(vec![e, index]), from);
                }
                Some("." | "->") => {
                    self.pos += 1;
                    match self.toks.get(self.pos) {
                        Some(t) if t.kind == TokKind::Ident => self.pos += 1,
                        _ => return None,
                    }
                    e = self.node(Shape::Other(vec![e]), from);
                }
                Some("++" | "--") => {
                    self.pos += 1;
                    e = self.node(Shape::Other(vec![e]), from);
                }
                _ => return Some(e),
            }
        }
    }

    fn primary(&mut self) -> Option<Node> {
        let from = self.pos;
        let t = self.toks.get(self.pos)?;
        match t.kind {
            TokKind::Ident if !is_c_keyword(t.text(self.src)) => {
                self.pos += 1;
                Some(self.node(Shape::Ident(t.text(self.src).to_string()), from))
            }
            TokKind::Number | TokKind::Str | TokKind::Char => {
                self.pos += 1;
                Some(self.node(Shape::Other(vec![]), from))
            }
            TokKind::Punct if t.text(self.src) == "(" => {
                self.pos += 1;
                let inner = self.expression()?;
                self.eat(")")?;
                Some(self.node(Shape::Paren(Box::new(inner)), from))
            }
            _ => None,
        }
    }
}

fn c_operator(kind: OpKind) -> Option<&'static str> {
    match kind {
        OpKind::Add => Some("+"),
        OpKind::Sub => Some("-"),
        OpKind::Mul => Some("*"),
        OpKind::Divs | OpKind::Divu => Some("/"),
        OpKind::Rems | OpKind::Remu => Some("%"),
        // C has no operator with the divisor-signed modulus semantics.
        OpKind::Mods | OpKind::Modu => None,
    }
}

fn strip(mut n: &Node) -> &Node {
    while let Shape::Paren(inner) = &n.shape {
        n = inner;
    }
    n
}

fn same_structure(n: &Node, e: &ExprTree) -> bool {
    let n = strip(n);
    match (e, &n.shape) {
        (ExprTree::Leaf(name), Shape::Ident(id)) => name == id,
        (ExprTree::BinOp { kind, left, right }, Shape::Binary(op, l, r)) => {
            c_operator(*kind) == Some(op.as_str()) && same_structure(l, left) && same_structure(r, right)
        }
        _ => false,
    }
}

fn collect(n: &Node, e: &ExprTree, out: &mut Vec<Range<usize>>) {
    if !matches!(n.shape, Shape::Paren(_)) && same_structure(n, e) {
        out.push(n.toks.clone());
        return;
    }
    match &n.shape {
        Shape::Ident(_) => {}
        Shape::Paren(inner) => collect(inner, e, out),
        Shape::Binary(_, l, r) => {
            collect(l, e, out);
            collect(r, e, out);
        }
        Shape::Other(parts) => parts.iter().for_each(|p| collect(p, e, out)),
    }
}

/// Whether an expression may begin right after `prev`. Starting after an
/// operand or an operator could misread part of a larger expression.
fn can_start_after(prev: &Token, src: &str) -> bool {
    let text = prev.text(src);
    match prev.kind {
        TokKind::Ident => is_c_keyword(text) && text != "sizeof",
        TokKind::Punct => matches!(text, ";" | "{" | "}" | "(" | "[" | "," | "?" | ":") || ASSIGN_OPS.contains(&text),
        _ => false,
    }
}

/// Token-level occurrences of `spec.expr` in C source, outermost first, in
/// source order. Specs without operations, or using the divisor-signed
/// modulus, never match.
pub fn find_call_sites(src: &str, spec: &CiSpec) -> Result<Vec<CallSite>, LexError> {
    let lexed = lex(src)?;
    let toks = &lexed.tokens;
    if spec.expr.op_count() == 0 {
        return Ok(vec![]);
    }

    let mut found: Vec<Range<usize>> = Vec::new();
    let mut i = 0;
    let mut last_end = 0;
    while i < toks.len() {
        if i != last_end && !can_start_after(&toks[i - 1], src) {
            i += 1;
            continue;
        }
        let mut p = Parser { src, toks, pos: i };
        match p.expression() {
            Some(node) => {
                collect(&node, &spec.expr, &mut found);
                i = p.pos;
                last_end = i;
            }
            None => i += 1,
        }
    }
    found.sort_by_key(|r| (r.start, std::cmp::Reverse(r.end)));
    found.dedup();
    let mut sites: Vec<CallSite> = Vec::new();
    for r in found {
        if sites.last().is_some_and(|s| r.start < s.tokens.end) {
            continue;
        }
        sites.push(CallSite {
            span: toks[r.start].span.start..toks[r.end - 1].span.end,
            tokens: r,
        });
    }
    Ok(sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_ci_spec;

    fn mac() -> CiSpec {
        parse_ci_spec("ci f(opcode=0) { input a : signed<32>; input b : signed<32>; input c : signed<32>; output x : signed<32>; x = a * b + c; }").unwrap()
    }

    fn spans(src: &str) -> Vec<&str> {
        find_call_sites(src, &mac())
            .unwrap()
            .into_iter()
            .map(|s| &src[s.span])
            .collect()
    }

    #[test]
    fn parenthesized_and_bare_forms_match() {
        assert_eq!(spans("x = (a * b) + c;"), ["(a * b) + c"]);
        assert_eq!(spans("x = a * b + c;"), ["a * b + c"]);
        assert_eq!(spans("x = ((a*b)+(c));"), ["(a*b)+(c)"]);
    }

    #[test]
    fn different_structure_does_not_match() {
        assert!(spans("x = (a + b) * c;").is_empty());
        assert!(spans("x = a * (b + c);").is_empty());
        assert!(spans("x = a * b + c * d;").is_empty());
        assert!(spans("x = a * b - c;").is_empty());
        assert!(spans("x = a * b + cc;").is_empty());
        assert!(spans("x = z << a * b + c;").len() == 1);
        assert!(spans("x = z - a * b + c;").is_empty());
        assert!(spans("x = z * a * b + c;").is_empty());
    }

    #[test]
    fn contexts() {
        assert_eq!(spans("return a*b+c;"), ["a*b+c"]);
        assert_eq!(spans("int x = a*b+c, y = 2;"), ["a*b+c"]);
        assert_eq!(spans("f(1, a*b+c);"), ["a*b+c"]);
        assert_eq!(spans("if (a*b+c > 0) y = a*b+c;"), ["a*b+c", "a*b+c"]);
        assert_eq!(spans("y = (int)(a*b+c);"), ["a*b+c"]);
        assert_eq!(spans("for (i = 0; i < a*b+c; i++) {}"), ["a*b+c"]);
        assert_eq!(spans("int g(int a, int b) { return a*b+c; }"), ["a*b+c"]);
    }

    #[test]
    fn never_inside_strings_comments_or_directives() {
        assert!(spans("s = \"a*b+c\"; /* a*b+c */ // a*b+c\n#define M a*b+c\n").is_empty());
    }

    #[test]
    fn operands_by_name_not_member_or_call() {
        assert!(spans("x = s.a * b + c;").is_empty());
        assert!(spans("x = a() * b + c;").is_empty());
        assert!(spans("x = a[0] * b + c;").is_empty());
    }

    #[test]
    fn mod_and_identity_never_match() {
        let m = parse_ci_spec("ci m(opcode=0) { input a : signed<8>; input b : signed<8>; output x : signed<8>; x = a mod b; }").unwrap();
        assert!(find_call_sites("x = a % b;", &m).unwrap().is_empty());
        let r = parse_ci_spec("ci r(opcode=0) { input a : signed<8>; input b : signed<8>; output x : signed<8>; x = a % b; }").unwrap();
        assert_eq!(find_call_sites("x = a % b;", &r).unwrap().len(), 1);
        let i = parse_ci_spec("ci i(opcode=0) { input a : signed<8>; output x : signed<8>; x = a; }").unwrap();
        assert!(find_call_sites("x = a;", &i).unwrap().is_empty());
    }
}
