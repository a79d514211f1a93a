//! Structural checks over designs and over emitted VHDL text.
//!
//! Both sources reduce to a [`UnitView`] (entity interface, component
//! declarations, signals, instances and their bindings), so emitted text can
//! be checked with the same rules as the AST it came from.

use super::ast::*;
use super::build::ci_ports;
use crate::names;
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    PortSetMismatch { entity: String, detail: String },
    IllegalIdentifier { name: String, reason: String },
    DuplicateSignal(String),
    DuplicateComponent(String),
    DuplicateLabel(String),
    UndeclaredComponent { instance: String, component: String },
    UnusedComponent(String),
    DanglingPort { instance: String, port: String },
    UnknownPort { instance: String, port: String },
    DuplicateBinding { instance: String, port: String },
    UnboundGeneric { instance: String, generic: String },
    UnknownGeneric { instance: String, generic: String },
    UndeclaredSignal { context: String, name: String },
    AssignToInput { context: String, name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PortSetMismatch { entity, detail } => {
                write!(f, "entity `{entity}`: port set mismatch ({detail})")
            }
            Violation::IllegalIdentifier { name, reason } => {
                write!(f, "`{name}`: illegal identifier ({reason})")
            }
            Violation::DuplicateSignal(n) => write!(f, "`{n}`: declared more than once"),
            Violation::DuplicateComponent(n) => write!(f, "component `{n}`: declared more than once"),
            Violation::DuplicateLabel(n) => write!(f, "instance label `{n}`: used more than once"),
            Violation::UndeclaredComponent { instance, component } => {
                write!(f, "instance `{instance}`: component `{component}` is not declared")
            }
            Violation::UnusedComponent(n) => write!(f, "component `{n}`: declared but never instantiated"),
            Violation::DanglingPort { instance, port } => {
                write!(f, "instance `{instance}`: port `{port}` is not bound")
            }
            Violation::UnknownPort { instance, port } => {
                write!(f, "instance `{instance}`: no port named `{port}`")
            }
            Violation::DuplicateBinding { instance, port } => {
                write!(f, "instance `{instance}`: port `{port}` bound twice")
            }
            Violation::UnboundGeneric { instance, generic } => {
                write!(f, "instance `{instance}`: generic `{generic}` has no value")
            }
            Violation::UnknownGeneric { instance, generic } => {
                write!(f, "instance `{instance}`: no generic named `{generic}`")
            }
            Violation::UndeclaredSignal { context, name } => {
                write!(f, "{context}: `{name}` is not declared")
            }
            Violation::AssignToInput { context, name } => {
                write!(f, "{context}: assigns input port `{name}`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentView {
    pub name: String,
    pub generics: Vec<String>,
    pub ports: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceView {
    pub label: String,
    pub component: String,
    pub generics: Vec<String>,
    /// Formal port and the names its actual reads.
    pub ports: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitView {
    pub entity: String,
    pub generics: Vec<String>,
    pub ports: Vec<(String, PortDir)>,
    pub components: Vec<ComponentView>,
    pub signals: Vec<String>,
    pub instances: Vec<InstanceView>,
}

impl UnitView {
    pub fn from_unit(u: &DesignUnit) -> UnitView {
        let a = &u.architecture;
        UnitView {
            entity: u.entity.name.clone(),
            generics: u.entity.generics.iter().map(|g| g.name.clone()).collect(),
            ports: u.entity.ports.iter().map(|p| (p.name.clone(), p.dir)).collect(),
            components: a
                .components
                .iter()
                .map(|c| ComponentView {
                    name: c.name.clone(),
                    generics: c.generics.iter().map(|g| g.name.clone()).collect(),
                    ports: c.ports.iter().map(|p| p.name.clone()).collect(),
                })
                .collect(),
            signals: a.signals.iter().map(|s| s.name.clone()).collect(),
            instances: a
                .instances
                .iter()
                .map(|i| InstanceView {
                    label: i.label.clone(),
                    component: i.component.clone(),
                    generics: i.generic_map.iter().map(|(k, _)| k.clone()).collect(),
                    ports: i
                        .port_map
                        .iter()
                        .map(|(k, e)| {
                            let mut names = Vec::new();
                            e.referenced_names(&mut names);
                            (k.clone(), names)
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Structural views of every unit in a design, helpers first.
pub fn design_views(design: &HdlDesign) -> Vec<UnitView> {
    design
        .support
        .iter()
        .chain(std::iter::once(&design.top))
        .map(UnitView::from_unit)
        .collect()
}

fn fold(s: &str) -> String {
    s.to_ascii_lowercase()
}

fn check_identifier(name: &str, out: &mut Vec<Violation>) {
    if let Some(reason) = names::vhdl_identifier_problem(name) {
        out.push(Violation::IllegalIdentifier {
            name: name.to_string(),
            reason: reason.to_string(),
        });
    }
}

/// Rules that only need the structural view.
pub fn validate_view(v: &UnitView, is_top: bool) -> Vec<Violation> {
    let mut out = Vec::new();

    if is_top {
        let expected: Vec<(String, PortDir)> =
            ci_ports().into_iter().map(|p| (p.name, p.dir)).collect();
        if v.ports != expected {
            let got: Vec<&str> = v.ports.iter().map(|(n, _)| n.as_str()).collect();
            out.push(Violation::PortSetMismatch {
                entity: v.entity.clone(),
                detail: format!("found [{}]", got.join(", ")),
            });
        }
    }

    check_identifier(&v.entity, &mut out);
    let mut declared: HashMap<String, String> = HashMap::new();
    let names = v
        .generics
        .iter()
        .chain(v.ports.iter().map(|(n, _)| n))
        .chain(&v.signals);
    for n in names {
        check_identifier(n, &mut out);
        if declared.insert(fold(n), n.clone()).is_some() {
            out.push(Violation::DuplicateSignal(n.clone()));
        }
    }

    let mut components: HashMap<String, &ComponentView> = HashMap::new();
    for c in &v.components {
        check_identifier(&c.name, &mut out);
        if components.insert(fold(&c.name), c).is_some() {
            out.push(Violation::DuplicateComponent(c.name.clone()));
        }
    }

    let mut labels = HashSet::new();
    let mut used = HashSet::new();
    for inst in &v.instances {
        check_identifier(&inst.label, &mut out);
        if !labels.insert(fold(&inst.label)) || declared.contains_key(&fold(&inst.label)) {
            out.push(Violation::DuplicateLabel(inst.label.clone()));
        }
        for (_, actual) in &inst.ports {
            for n in actual {
                if !declared.contains_key(&fold(n)) {
                    out.push(Violation::UndeclaredSignal {
                        context: format!("instance `{}`", inst.label),
                        name: n.clone(),
                    });
                }
            }
        }
        let Some(comp) = components.get(&fold(&inst.component)) else {
            out.push(Violation::UndeclaredComponent {
                instance: inst.label.clone(),
                component: inst.component.clone(),
            });
            continue;
        };
        used.insert(fold(&comp.name));

        let mut bound = HashSet::new();
        for (formal, _) in &inst.ports {
            if !comp.ports.iter().any(|p| p.eq_ignore_ascii_case(formal)) {
                out.push(Violation::UnknownPort {
                    instance: inst.label.clone(),
                    port: formal.clone(),
                });
            } else if !bound.insert(fold(formal)) {
                out.push(Violation::DuplicateBinding {
                    instance: inst.label.clone(),
                    port: formal.clone(),
                });
            }
        }
        for p in &comp.ports {
            if !bound.contains(&fold(p)) {
                out.push(Violation::DanglingPort {
                    instance: inst.label.clone(),
                    port: p.clone(),
                });
            }
        }
        for g in &inst.generics {
            if !comp.generics.iter().any(|d| d.eq_ignore_ascii_case(g)) {
                out.push(Violation::UnknownGeneric {
                    instance: inst.label.clone(),
                    generic: g.clone(),
                });
            }
        }
        for g in &comp.generics {
            if !inst.generics.iter().any(|d| d.eq_ignore_ascii_case(g)) {
                out.push(Violation::UnboundGeneric {
                    instance: inst.label.clone(),
                    generic: g.clone(),
                });
            }
        }
    }
    for c in &v.components {
        if !used.contains(&fold(&c.name)) {
            out.push(Violation::UnusedComponent(c.name.clone()));
        }
    }
    out
}

fn seq_names(stmts: &[SeqStmt], reads: &mut Vec<String>, writes: &mut Vec<String>) {
    for s in stmts {
        match s {
            SeqStmt::Assign { target, value } => {
                writes.push(target.clone());
                value.referenced_names(reads);
            }
            SeqStmt::If { branches, otherwise } => {
                for (c, body) in branches {
                    c.referenced_names(reads);
                    seq_names(body, reads, writes);
                }
                seq_names(otherwise, reads, writes);
            }
            SeqStmt::Case { selector, arms } => {
                selector.referenced_names(reads);
                for (_, body) in arms {
                    seq_names(body, reads, writes);
                }
            }
            SeqStmt::Null => {}
        }
    }
}

fn validate_statements(u: &DesignUnit, out: &mut Vec<Violation>) {
    let declared: HashSet<String> = u
        .entity
        .generics
        .iter()
        .map(|g| fold(&g.name))
        .chain(u.entity.ports.iter().map(|p| fold(&p.name)))
        .chain(u.architecture.signals.iter().map(|s| fold(&s.name)))
        .collect();
    let inputs: HashSet<String> = u
        .entity
        .ports
        .iter()
        .filter(|p| p.dir == PortDir::In)
        .map(|p| fold(&p.name))
        .collect();

    let mut check = |context: String, reads: Vec<String>, writes: Vec<String>| {
        for n in reads.iter().chain(&writes) {
            if !declared.contains(&fold(n)) {
                out.push(Violation::UndeclaredSignal {
                    context: context.clone(),
                    name: n.clone(),
                });
            }
        }
        for n in &writes {
            if inputs.contains(&fold(n)) {
                out.push(Violation::AssignToInput {
                    context: context.clone(),
                    name: n.clone(),
                });
            }
        }
    };

    for s in &u.architecture.statements {
        let mut reads = Vec::new();
        match s {
            ConcurrentStmt::Assign { value, .. } => value.referenced_names(&mut reads),
            ConcurrentStmt::When {
                value,
                cond,
                otherwise,
                ..
            } => {
                value.referenced_names(&mut reads);
                cond.referenced_names(&mut reads);
                otherwise.referenced_names(&mut reads);
            }
        }
        check(
            format!("assignment to `{}`", s.target()),
            reads,
            vec![s.target().to_string()],
        );
    }
    for p in &u.architecture.processes {
        let mut reads = p.sensitivity.clone();
        let mut writes = Vec::new();
        seq_names(&p.body, &mut reads, &mut writes);
        check(format!("process `{}`", p.label), reads, writes);
    }
}

/// Empty iff every structural invariant of the design holds.
pub fn validate_structure(design: &HdlDesign) -> Vec<Violation> {
    let mut out = Vec::new();
    let units: Vec<&DesignUnit> = design.support.iter().chain(std::iter::once(&design.top)).collect();
    let last = units.len() - 1;
    for (i, u) in units.into_iter().enumerate() {
        out.extend(validate_view(&UnitView::from_unit(u), i == last));
        validate_statements(u, &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num,
    Str,
    Char,
    Sym(String),
}

fn tokenize(text: &str) -> Vec<Tok> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[s..i].iter().collect()));
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num);
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            i += 1;
            out.push(Tok::Str);
        } else if c == '\'' && chars.get(i + 2) == Some(&'\'') && !matches!(out.last(), Some(Tok::Ident(_))) {
            i += 3;
            out.push(Tok::Char);
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if ["=>", "<=", "/=", ":="].contains(&two.as_str()) {
                out.push(Tok::Sym(two));
                i += 2;
            } else {
                out.push(Tok::Sym(c.to_string()));
                i += 1;
            }
        }
    }
    out
}

/// Generic names plus ports with their direction.
type Interface = (Vec<String>, Vec<(String, PortDir)>);

struct Reader {
    toks: Vec<Tok>,
    pos: usize,
}

impl Reader {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn is_kw(&self, k: usize, kw: &str) -> bool {
        matches!(self.peek_at(k), Some(Tok::Ident(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn is_sym(&self, k: usize, sym: &str) -> bool {
        matches!(self.peek_at(k), Some(Tok::Sym(s)) if s == sym)
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => Err(format!("expected identifier, found {other:?}")),
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), String> {
        match self.next() {
            Some(Tok::Sym(s)) if s == sym => Ok(()),
            other => Err(format!("expected `{sym}`, found {other:?}")),
        }
    }

    fn skip_past(&mut self, sym: &str) {
        while let Some(t) = self.next() {
            if t == Tok::Sym(sym.to_string()) {
                return;
            }
        }
    }

    /// Reads `( item ; item ... )` where each item starts `name :`, returning
    /// each name with the token after the colon.
    fn interface_list(&mut self) -> Result<Vec<(String, Option<String>)>, String> {
        self.expect_sym("(")?;
        let mut items = Vec::new();
        loop {
            let name = self.ident()?;
            self.expect_sym(":")?;
            let mode = match self.peek() {
                Some(Tok::Ident(s)) => Some(s.to_ascii_lowercase()),
                _ => None,
            };
            let mut depth = 0;
            loop {
                match self.next() {
                    Some(Tok::Sym(s)) if s == "(" => depth += 1,
                    Some(Tok::Sym(s)) if s == ")" && depth > 0 => depth -= 1,
                    Some(Tok::Sym(s)) if s == ")" => {
                        items.push((name, mode));
                        self.expect_sym(";")?;
                        return Ok(items);
                    }
                    Some(Tok::Sym(s)) if s == ";" && depth == 0 => break,
                    Some(_) => {}
                    None => return Err("unterminated interface list".into()),
                }
            }
            items.push((name, mode));
        }
    }

    fn interface(&mut self) -> Result<Interface, String> {
        let mut generics = Vec::new();
        let mut ports = Vec::new();
        if self.is_kw(0, "generic") {
            self.next();
            generics = self.interface_list()?.into_iter().map(|(n, _)| n).collect();
        }
        if self.is_kw(0, "port") {
            self.next();
            for (n, mode) in self.interface_list()? {
                let dir = match mode.as_deref() {
                    Some("out") => PortDir::Out,
                    _ => PortDir::In,
                };
                ports.push((n, dir));
            }
        }
        Ok((generics, ports))
    }

    /// `( formal => actual , ... )`, returning each formal with the names read by its actual.
    fn association_list(&mut self) -> Result<Vec<(String, Vec<String>)>, String> {
        self.expect_sym("(")?;
        let mut items = Vec::new();
        loop {
            let formal = self.ident()?;
            self.expect_sym("=>")?;
            let mut names = Vec::new();
            let mut depth = 0;
            loop {
                let qualified = self.is_sym(1, "'");
                match self.next() {
                    Some(Tok::Sym(s)) if s == "(" => depth += 1,
                    Some(Tok::Sym(s)) if s == ")" && depth > 0 => depth -= 1,
                    Some(Tok::Sym(s)) if s == ")" => {
                        items.push((formal, names));
                        return Ok(items);
                    }
                    Some(Tok::Sym(s)) if s == "," && depth == 0 => break,
                    Some(Tok::Ident(s)) => {
                        let kw = ["downto", "to", "others", "and", "or", "not"];
                        if !qualified && !kw.contains(&s.to_ascii_lowercase().as_str()) {
                            names.push(s);
                        }
                    }
                    Some(_) => {}
                    None => return Err("unterminated association list".into()),
                }
            }
            items.push((formal, names));
        }
    }
}

/// Recovers the structural view of every unit in emitted VHDL text.
pub fn read_emitted(text: &str) -> Result<Vec<UnitView>, String> {
    let mut r = Reader {
        toks: tokenize(text),
        pos: 0,
    };
    let mut units: Vec<UnitView> = Vec::new();
    while r.peek().is_some() {
        if r.is_kw(0, "entity") {
            r.next();
            let name = r.ident()?;
            if !r.is_kw(0, "is") {
                return Err(format!("expected `is` after entity {name}"));
            }
            r.next();
            let (generics, ports) = r.interface()?;
            units.push(UnitView {
                entity: name,
                generics,
                ports,
                components: vec![],
                signals: vec![],
                instances: vec![],
            });
            r.skip_past(";");
        } else if r.is_kw(0, "architecture") {
            r.next();
            let arch = r.ident()?;
            if !r.is_kw(0, "of") {
                return Err("expected `of`".into());
            }
            r.next();
            let entity = r.ident()?;
            r.next(); // is
            let unit = units
                .iter_mut()
                .rev()
                .find(|u| u.entity.eq_ignore_ascii_case(&entity))
                .ok_or_else(|| format!("architecture {arch} of unknown entity {entity}"))?;
            // declarative region
            loop {
                if r.is_kw(0, "component") {
                    r.next();
                    let name = r.ident()?;
                    if r.is_kw(0, "is") {
                        r.next();
                    }
                    let (generics, ports) = r.interface()?;
                    unit.components.push(ComponentView {
                        name,
                        generics,
                        ports: ports.into_iter().map(|(n, _)| n).collect(),
                    });
                    r.skip_past(";"); // end component;
                } else if r.is_kw(0, "signal") {
                    r.next();
                    unit.signals.push(r.ident()?);
                    r.skip_past(";");
                } else if r.is_kw(0, "begin") {
                    r.next();
                    break;
                } else if r.peek().is_none() {
                    return Err("unterminated architecture".into());
                } else {
                    r.skip_past(";");
                }
            }
            // statement region
            loop {
                if r.peek().is_none() {
                    return Err("unterminated architecture body".into());
                }
                if r.is_kw(0, "end") {
                    r.skip_past(";");
                    break;
                }
                if r.is_sym(1, ":") && r.is_kw(2, "process") {
                    while !(r.is_kw(0, "end") && r.is_kw(1, "process")) {
                        if r.next().is_none() {
                            return Err("unterminated process".into());
                        }
                    }
                    r.skip_past(";");
                    continue;
                }
                let instance_start = r.is_sym(1, ":")
                    && matches!(r.peek_at(2), Some(Tok::Ident(_)))
                    && (r.is_kw(3, "generic") || r.is_kw(3, "port"));
                if !instance_start {
                    r.skip_past(";");
                    continue;
                }
                let label = r.ident()?;
                r.next();
                let component = r.ident()?;
                let mut generics = Vec::new();
                let mut ports = Vec::new();
                if r.is_kw(0, "generic") {
                    r.next();
                    r.next(); // map
                    generics = r.association_list()?.into_iter().map(|(f, _)| f).collect();
                }
                if r.is_kw(0, "port") {
                    r.next();
                    r.next(); // map
                    ports = r.association_list()?;
                }
                r.expect_sym(";")?;
                unit.instances.push(InstanceView {
                    label,
                    component,
                    generics,
                    ports,
                });
            }
        } else {
            r.skip_past(";");
        }
    }
    Ok(units)
}

/// Reads emitted text back and applies the structural rules; the last unit is the top.
pub fn validate_emitted(text: &str) -> Result<Vec<Violation>, String> {
    let views = read_emitted(text)?;
    let last = views.len().checked_sub(1).ok_or("no design units found")?;
    Ok(views
        .iter()
        .enumerate()
        .flat_map(|(i, v)| validate_view(v, i == last))
        .collect())
}
