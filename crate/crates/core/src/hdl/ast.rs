//! A small VHDL abstract syntax tree covering what generated designs need.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PortDir {
    In,
    Out,
}

/// A vector bound: a literal, or `<generic> - <offset>` inside component declarations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Bound {
    Lit(u32),
    Param { name: String, minus: u32 },
}

impl Bound {
    pub fn param(name: &str, minus: u32) -> Bound {
        Bound::Param {
            name: name.to_string(),
            minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum HdlType {
    Logic,
    /// `std_logic_vector(width-1 downto 0)`
    Vector(u32),
    /// `std_logic_vector(hi downto 0)` with a generic-dependent bound.
    VectorTo(Bound),
    /// `natural range 0 to max`
    Natural { max: u32 },
    /// Generic parameter types.
    NaturalGeneric,
    StringGeneric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PortDecl {
    pub name: String,
    pub dir: PortDir,
    pub ty: HdlType,
}

impl PortDecl {
    pub fn new(name: &str, dir: PortDir, ty: HdlType) -> PortDecl {
        PortDecl {
            name: name.to_string(),
            dir,
            ty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericDecl {
    pub name: String,
    pub ty: HdlType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GenericValue {
    Int(u32),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDecl {
    pub name: String,
    pub generics: Vec<GenericDecl>,
    pub ports: Vec<PortDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignalDecl {
    pub name: String,
    pub ty: HdlType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinaryOp {
    Add,
    Eq,
    Ne,
    And,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Expr {
    Name(String),
    Index(String, Bound),
    Slice { name: String, hi: Bound, lo: Bound },
    /// `std_logic_vector'(hi downto lo => fill)`
    Fill { hi: Bound, lo: Bound, fill: Box<Expr> },
    /// `(others => '0')`, only valid as a whole assignment source.
    Others(char),
    Bit(char),
    Int(u32),
    Str(String),
    Concat(Vec<Expr>),
    Call(String, Vec<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn name(n: &str) -> Expr {
        Expr::Name(n.to_string())
    }

    pub fn bin(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: &str, args: Vec<Expr>) -> Expr {
        Expr::Call(f.to_string(), args)
    }

    /// Signal and port names this expression reads.
    pub fn referenced_names(&self, out: &mut Vec<String>) {
        match self {
            Expr::Name(n) | Expr::Index(n, _) | Expr::Slice { name: n, .. } => out.push(n.clone()),
            Expr::Fill { fill, .. } => fill.referenced_names(out),
            Expr::Concat(parts) => parts.iter().for_each(|p| p.referenced_names(out)),
            // The callee is a type conversion or function, not a signal.
            Expr::Call(_, args) => args.iter().for_each(|a| a.referenced_names(out)),
            Expr::Binary(_, l, r) => {
                l.referenced_names(out);
                r.referenced_names(out);
            }
            Expr::Others(_) | Expr::Bit(_) | Expr::Int(_) | Expr::Str(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub label: String,
    pub component: String,
    pub generic_map: Vec<(String, GenericValue)>,
    pub port_map: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Choice {
    Int(u32),
    Others,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SeqStmt {
    Assign {
        target: String,
        value: Expr,
    },
    /// `if c0 then .. elsif c1 then .. else .. end if;`
    If {
        branches: Vec<(Expr, Vec<SeqStmt>)>,
        otherwise: Vec<SeqStmt>,
    },
    Case {
        selector: Expr,
        arms: Vec<(Choice, Vec<SeqStmt>)>,
    },
    Null,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Process {
    pub label: String,
    pub sensitivity: Vec<String>,
    pub body: Vec<SeqStmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ConcurrentStmt {
    Assign {
        target: String,
        value: Expr,
    },
    /// `target <= value when cond else otherwise;`
    When {
        target: String,
        value: Expr,
        cond: Expr,
        otherwise: Expr,
    },
}

impl ConcurrentStmt {
    pub fn target(&self) -> &str {
        match self {
            ConcurrentStmt::Assign { target, .. } | ConcurrentStmt::When { target, .. } => target,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ContextItem {
    Library(String),
    Use(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entity {
    pub name: String,
    pub generics: Vec<GenericDecl>,
    pub ports: Vec<PortDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Architecture {
    pub name: String,
    pub entity: String,
    pub components: Vec<ComponentDecl>,
    pub signals: Vec<SignalDecl>,
    pub statements: Vec<ConcurrentStmt>,
    pub instances: Vec<Instance>,
    pub processes: Vec<Process>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignUnit {
    pub context: Vec<ContextItem>,
    pub entity: Entity,
    pub architecture: Architecture,
}

/// A complete `.vhd` file: helper units first, then the custom-instruction unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HdlDesign {
    pub header: Vec<String>,
    pub support: Vec<DesignUnit>,
    pub top: DesignUnit,
}
