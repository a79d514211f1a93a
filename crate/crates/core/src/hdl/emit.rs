use super::ast::*;
use std::fmt::Write;

const INDENT: &str = "  ";

struct Out {
    buf: String,
}

impl Out {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.buf.push_str(INDENT);
        }
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    fn blank(&mut self) {
        self.buf.push('\n');
    }
}

pub fn bound(b: &Bound) -> String {
    match b {
        Bound::Lit(n) => n.to_string(),
        Bound::Param { name, minus: 0 } => name.clone(),
        Bound::Param { name, minus } => format!("{name}-{minus}"),
    }
}

pub fn hdl_type(t: &HdlType) -> String {
    match t {
        HdlType::Logic => "std_logic".into(),
        HdlType::Vector(w) => format!("std_logic_vector({} downto 0)", w - 1),
        HdlType::VectorTo(hi) => format!("std_logic_vector({} downto 0)", bound(hi)),
        HdlType::Natural { max } => format!("natural range 0 to {max}"),
        HdlType::NaturalGeneric => "natural".into(),
        HdlType::StringGeneric => "string".into(),
    }
}

fn binary_op(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::Add => "+",
        BinaryOp::Eq => "=",
        BinaryOp::Ne => "/=",
        BinaryOp::And => "and",
    }
}

pub fn expr(e: &Expr) -> String {
    let nested = |e: &Expr| match e {
        Expr::Binary(..) | Expr::Concat(_) => format!("({})", expr(e)),
        _ => expr(e),
    };
    match e {
        Expr::Name(n) => n.clone(),
        Expr::Index(n, i) => format!("{n}({})", bound(i)),
        Expr::Slice { name, hi, lo } => format!("{name}({} downto {})", bound(hi), bound(lo)),
        Expr::Fill { hi, lo, fill } => format!(
            "std_logic_vector'({} downto {} => {})",
            bound(hi),
            bound(lo),
            expr(fill)
        ),
        Expr::Others(c) => format!("(others => '{c}')"),
        Expr::Bit(c) => format!("'{c}'"),
        Expr::Int(n) => n.to_string(),
        Expr::Str(s) => format!("\"{s}\""),
        Expr::Concat(parts) => parts.iter().map(nested).collect::<Vec<_>>().join(" & "),
        Expr::Call(f, args) => format!(
            "{f}({})",
            args.iter().map(expr).collect::<Vec<_>>().join(", ")
        ),
        Expr::Binary(op, l, r) => format!("{} {} {}", nested(l), binary_op(*op), nested(r)),
    }
}

fn generic_value(v: &GenericValue) -> String {
    match v {
        GenericValue::Int(n) => n.to_string(),
        GenericValue::Str(s) => format!("\"{s}\""),
    }
}

/// Writes `keyword (` ... `);` with one item per line and no trailing separator.
fn list(out: &mut Out, depth: usize, keyword: &str, items: &[String], close: &str) {
    out.line(depth, &format!("{keyword} ("));
    for (i, item) in items.iter().enumerate() {
        let sep = if i + 1 < items.len() { ";" } else { "" };
        out.line(depth + 1, &format!("{item}{sep}"));
    }
    out.line(depth, close);
}

fn interface(out: &mut Out, depth: usize, generics: &[GenericDecl], ports: &[PortDecl]) {
    if !generics.is_empty() {
        let items: Vec<String> = generics
            .iter()
            .map(|g| format!("{} : {}", g.name, hdl_type(&g.ty)))
            .collect();
        list(out, depth, "generic", &items, ");");
    }
    let items: Vec<String> = ports
        .iter()
        .map(|p| {
            let dir = match p.dir {
                PortDir::In => "in",
                PortDir::Out => "out",
            };
            format!("{} : {} {}", p.name, dir, hdl_type(&p.ty))
        })
        .collect();
    list(out, depth, "port", &items, ");");
}

fn map_list(out: &mut Out, depth: usize, keyword: &str, items: &[String], last: bool) {
    out.line(depth, &format!("{keyword} ("));
    for (i, item) in items.iter().enumerate() {
        let sep = if i + 1 < items.len() { "," } else { "" };
        out.line(depth + 1, &format!("{item}{sep}"));
    }
    out.line(depth, if last { ");" } else { ")" });
}

fn seq(out: &mut Out, depth: usize, stmts: &[SeqStmt]) {
    for s in stmts {
        match s {
            SeqStmt::Assign { target, value } => {
                out.line(depth, &format!("{target} <= {};", expr(value)));
            }
            SeqStmt::If { branches, otherwise } => {
                for (i, (cond, body)) in branches.iter().enumerate() {
                    let kw = if i == 0 { "if" } else { "elsif" };
                    out.line(depth, &format!("{kw} {} then", expr(cond)));
                    seq(out, depth + 1, body);
                }
                if !otherwise.is_empty() {
                    out.line(depth, "else");
                    seq(out, depth + 1, otherwise);
                }
                out.line(depth, "end if;");
            }
            SeqStmt::Case { selector, arms } => {
                out.line(depth, &format!("case {} is", expr(selector)));
                for (choice, body) in arms {
                    let c = match choice {
                        Choice::Int(n) => n.to_string(),
                        Choice::Others => "others".into(),
                    };
                    out.line(depth + 1, &format!("when {c} =>"));
                    seq(out, depth + 2, body);
                }
                out.line(depth, "end case;");
            }
            SeqStmt::Null => out.line(depth, "null;"),
        }
    }
}

fn unit(out: &mut Out, u: &DesignUnit) {
    for c in &u.context {
        match c {
            ContextItem::Library(l) => out.line(0, &format!("library {l};")),
            ContextItem::Use(p) => out.line(0, &format!("use {p};")),
        }
    }
    out.blank();

    let e = &u.entity;
    out.line(0, &format!("entity {} is", e.name));
    interface(out, 1, &e.generics, &e.ports);
    out.line(0, &format!("end {};", e.name));
    out.blank();

    let a = &u.architecture;
    out.line(0, &format!("architecture {} of {} is", a.name, a.entity));
    for c in &a.components {
        out.line(1, &format!("component {} is", c.name));
        interface(out, 2, &c.generics, &c.ports);
        out.line(1, "end component;");
        out.blank();
    }
    for s in &a.signals {
        out.line(1, &format!("signal {} : {};", s.name, hdl_type(&s.ty)));
    }
    out.line(0, "begin");
    let mut first = true;
    let mut gap = |out: &mut Out| {
        if !first {
            out.blank();
        }
        first = false;
    };
    for inst in &a.instances {
        gap(out);
        out.line(1, &format!("{} : {}", inst.label, inst.component));
        let generics: Vec<String> = inst
            .generic_map
            .iter()
            .map(|(k, v)| format!("{k} => {}", generic_value(v)))
            .collect();
        if !generics.is_empty() {
            map_list(out, 2, "generic map", &generics, false);
        }
        let ports: Vec<String> = inst
            .port_map
            .iter()
            .map(|(k, v)| format!("{k} => {}", expr(v)))
            .collect();
        map_list(out, 2, "port map", &ports, true);
    }
    if !a.statements.is_empty() {
        gap(out);
    }
    for s in &a.statements {
        match s {
            ConcurrentStmt::Assign { target, value } => {
                out.line(1, &format!("{target} <= {};", expr(value)));
            }
            ConcurrentStmt::When {
                target,
                value,
                cond,
                otherwise,
            } => {
                out.line(
                    1,
                    &format!(
                        "{target} <= {} when {} else {};",
                        expr(value),
                        expr(cond),
                        expr(otherwise)
                    ),
                );
            }
        }
    }
    for p in &a.processes {
        gap(out);
        out.line(1, &format!("{} : process ({})", p.label, p.sensitivity.join(", ")));
        out.line(1, "begin");
        seq(out, 2, &p.body);
        out.line(1, &format!("end process {};", p.label));
    }
    out.line(0, &format!("end {};", a.name));
}

/// Renders the design as VHDL-93 text: LF line endings, two-space indentation.
pub fn emit_vhdl(design: &HdlDesign) -> String {
    let mut out = Out { buf: String::new() };
    for h in &design.header {
        let mut line = String::from("--");
        if !h.is_empty() {
            let _ = write!(line, " {h}");
        }
        out.line(0, &line);
    }
    out.blank();
    for u in &design.support {
        unit(&mut out, u);
        out.blank();
    }
    unit(&mut out, &design.top);
    out.buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        let e = Expr::Concat(vec![
            Expr::Fill {
                hi: Bound::Lit(23),
                lo: Bound::Lit(0),
                fill: Box::new(Expr::Index("s_1".into(), Bound::Lit(7))),
            },
            Expr::name("s_1"),
        ]);
        assert_eq!(expr(&e), "std_logic_vector'(23 downto 0 => s_1(7)) & s_1");
        let c = Expr::bin(
            BinaryOp::And,
            Expr::bin(BinaryOp::Ne, Expr::name("a"), Expr::name("b")),
            Expr::bin(BinaryOp::Eq, Expr::name("c"), Expr::Bit('1')),
        );
        assert_eq!(expr(&c), "(a /= b) and (c = '1')");
        assert_eq!(hdl_type(&HdlType::VectorTo(Bound::param("LPM_WIDTH", 1))), "std_logic_vector(LPM_WIDTH-1 downto 0)");
    }
}
