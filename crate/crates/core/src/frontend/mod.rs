//! Custom-instruction spec frontend.
//!
//! Parses the `.ci` text format into a [`CiSpec`], lowers the expression into
//! a leveled [`Dfg`] with shared operand leaves, and separates the graph into
//! priority-ordered operand and operation sequences.

mod analysis;
mod dfg;
mod parser;

pub use analysis::{analyze, AnalysisResult};
pub use dfg::{build_dfg, Dfg, DfgNode, NodeId, NodeKind};
pub use parser::{parse_ci_spec, ParseError, ParseErrorKind, Position};

use serde::Serialize;
use std::fmt;

/// Highest custom-instruction slot index accepted in `opcode=`.
pub const MAX_OPCODE: u32 = 4;
/// Operand ports are 32 bits wide.
pub const MAX_OPERAND_WIDTH: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Signedness {
    Signed,
    Unsigned,
}

impl Signedness {
    pub fn is_signed(self) -> bool {
        matches!(self, Signedness::Signed)
    }

    /// Result signedness of a binary operation: signed if either side is.
    pub fn join(self, other: Signedness) -> Signedness {
        if self.is_signed() || other.is_signed() {
            Signedness::Signed
        } else {
            Signedness::Unsigned
        }
    }
}

impl fmt::Display for Signedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signedness::Signed => "signed",
            Signedness::Unsigned => "unsigned",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperandDecl {
    pub name: String,
    pub signedness: Signedness,
    pub width: u32,
}

/// Binary operation kinds accepted in a CI expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Divs,
    Divu,
    Mods,
    Modu,
    Rems,
    Remu,
}

impl OpKind {
    pub const ALL: [OpKind; 9] = [
        OpKind::Add,
        OpKind::Sub,
        OpKind::Mul,
        OpKind::Divs,
        OpKind::Divu,
        OpKind::Mods,
        OpKind::Modu,
        OpKind::Rems,
        OpKind::Remu,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            OpKind::Add => "ADD",
            OpKind::Sub => "SUB",
            OpKind::Mul => "MUL",
            OpKind::Divs => "DIVS",
            OpKind::Divu => "DIVU",
            OpKind::Mods => "MODS",
            OpKind::Modu => "MODU",
            OpKind::Rems => "REMS",
            OpKind::Remu => "REMU",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<OpKind> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.mnemonic().eq_ignore_ascii_case(s))
    }

    /// Surface operator as written in the DSL.
    pub fn symbol(self) -> &'static str {
        match self {
            OpKind::Add => "+",
            OpKind::Sub => "-",
            OpKind::Mul => "*",
            OpKind::Divs | OpKind::Divu => "/",
            OpKind::Rems | OpKind::Remu => "%",
            OpKind::Mods | OpKind::Modu => "mod",
        }
    }

    pub fn is_divide_family(self) -> bool {
        !matches!(self, OpKind::Add | OpKind::Sub | OpKind::Mul)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ExprTree {
    Leaf(String),
    BinOp {
        kind: OpKind,
        left: Box<ExprTree>,
        right: Box<ExprTree>,
    },
}

impl ExprTree {
    pub fn bin(kind: OpKind, left: ExprTree, right: ExprTree) -> ExprTree {
        ExprTree::BinOp {
            kind,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn leaf(name: &str) -> ExprTree {
        ExprTree::Leaf(name.to_string())
    }

    pub fn op_count(&self) -> usize {
        match self {
            ExprTree::Leaf(_) => 0,
            ExprTree::BinOp { left, right, .. } => 1 + left.op_count() + right.op_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprTree::Leaf(_) => 0,
            ExprTree::BinOp { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Identifiers in left-to-right order of first appearance.
    pub fn identifiers(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a ExprTree, out: &mut Vec<&'a str>) {
            match e {
                ExprTree::Leaf(name) => {
                    if !out.contains(&name.as_str()) {
                        out.push(name);
                    }
                }
                ExprTree::BinOp { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for ExprTree {
    /// Fully parenthesized DSL form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprTree::Leaf(name) => f.write_str(name),
            ExprTree::BinOp { kind, left, right } => {
                write!(f, "({} {} {})", left, kind.symbol(), right)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CiSpec {
    pub name: String,
    pub opcode: u32,
    pub inputs: Vec<OperandDecl>,
    pub output: OperandDecl,
    pub expr: ExprTree,
}

impl CiSpec {
    pub fn input(&self, name: &str) -> Option<&OperandDecl> {
        self.inputs.iter().find(|d| d.name == name)
    }

    /// Declared inputs referenced by the expression, in first-use order.
    pub fn used_inputs(&self) -> Vec<&OperandDecl> {
        self.expr
            .identifiers()
            .into_iter()
            .filter_map(|n| self.input(n))
            .collect()
    }
}
