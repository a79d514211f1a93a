use super::{ComponentKind, Direction, Extension, LpmGenerics};
use crate::hdl::ast::{
    Architecture, Bound, ComponentDecl, ConcurrentStmt, ContextItem, DesignUnit, Entity, Expr,
    GenericDecl, GenericValue, HdlType, Instance, PortDecl, PortDir, SignalDecl,
};

/// A component declaration together with one instantiation of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdlFragment {
    pub declaration: ComponentDecl,
    pub instance: Instance,
}

pub fn component_name(kind: ComponentKind) -> &'static str {
    match kind {
        ComponentKind::AddSub => "lpm_add_sub",
        ComponentKind::Mult => "lpm_mult",
        ComponentKind::Divide => "lpm_divide",
        ComponentKind::ConcatExtend => "ci_concat_extend",
    }
}

fn natural(name: &str) -> GenericDecl {
    GenericDecl {
        name: name.to_string(),
        ty: HdlType::NaturalGeneric,
    }
}

fn string(name: &str) -> GenericDecl {
    GenericDecl {
        name: name.to_string(),
        ty: HdlType::StringGeneric,
    }
}

fn vec_port(name: &str, dir: PortDir, width_generic: &str) -> PortDecl {
    PortDecl::new(name, dir, HdlType::VectorTo(Bound::param(width_generic, 1)))
}

/// Declaration for a kind. It does not depend on generics, so one suffices per design.
pub fn component_declaration(kind: ComponentKind) -> ComponentDecl {
    let (generics, ports) = match kind {
        ComponentKind::AddSub => (
            vec![natural("LPM_WIDTH"), string("LPM_DIRECTION")],
            vec![
                vec_port("dataa", PortDir::In, "LPM_WIDTH"),
                vec_port("datab", PortDir::In, "LPM_WIDTH"),
                vec_port("result", PortDir::Out, "LPM_WIDTH"),
            ],
        ),
        ComponentKind::Mult => (
            vec![
                natural("LPM_WIDTHA"),
                natural("LPM_WIDTHB"),
                natural("LPM_WIDTHP"),
                string("LPM_REPRESENTATION"),
            ],
            vec![
                vec_port("dataa", PortDir::In, "LPM_WIDTHA"),
                vec_port("datab", PortDir::In, "LPM_WIDTHB"),
                vec_port("result", PortDir::Out, "LPM_WIDTHP"),
            ],
        ),
        ComponentKind::Divide => (
            vec![
                natural("LPM_WIDTHN"),
                natural("LPM_WIDTHD"),
                string("LPM_NREPRESENTATION"),
                string("LPM_DREPRESENTATION"),
            ],
            vec![
                vec_port("numer", PortDir::In, "LPM_WIDTHN"),
                vec_port("denom", PortDir::In, "LPM_WIDTHD"),
                vec_port("quotient", PortDir::Out, "LPM_WIDTHN"),
                vec_port("remain", PortDir::Out, "LPM_WIDTHD"),
            ],
        ),
        ComponentKind::ConcatExtend => (
            vec![natural("FROM_WIDTH"), natural("TO_WIDTH"), string("EXTENSION")],
            vec![
                vec_port("data", PortDir::In, "FROM_WIDTH"),
                vec_port("result", PortDir::Out, "TO_WIDTH"),
            ],
        ),
    };
    ComponentDecl {
        name: component_name(kind).to_string(),
        generics,
        ports,
    }
}

fn generic_map(generics: &LpmGenerics) -> Vec<(String, GenericValue)> {
    let int = |k: &str, v: u32| (k.to_string(), GenericValue::Int(v));
    let text = |k: &str, v: &str| (k.to_string(), GenericValue::Str(v.to_string()));
    match generics {
        LpmGenerics::AddSub(g) => vec![
            int("LPM_WIDTH", g.width),
            text(
                "LPM_DIRECTION",
                match g.direction {
                    Direction::Add => "ADD",
                    Direction::Sub => "SUB",
                },
            ),
        ],
        LpmGenerics::Mult(g) => vec![
            int("LPM_WIDTHA", g.width_a),
            int("LPM_WIDTHB", g.width_b),
            int("LPM_WIDTHP", g.width_p),
            text("LPM_REPRESENTATION", g.representation.vhdl()),
        ],
        LpmGenerics::Divide(g) => vec![
            int("LPM_WIDTHN", g.width_n),
            int("LPM_WIDTHD", g.width_d),
            text("LPM_NREPRESENTATION", g.n_representation.vhdl()),
            text("LPM_DREPRESENTATION", g.d_representation.vhdl()),
        ],
        LpmGenerics::ConcatExtend(g) => vec![
            int("FROM_WIDTH", g.from_width),
            int("TO_WIDTH", g.to_width),
            text(
                "EXTENSION",
                match g.extension {
                    Extension::Zero => "ZERO",
                    Extension::Sign => "SIGN",
                },
            ),
        ],
    }
}

/// Renders the declaration and an instance labelled `instance_name`.
/// Port bindings are emitted in declaration order; unknown formals are kept
/// at the end so structural validation can flag them.
pub fn render_instance(
    kind: ComponentKind,
    generics: &LpmGenerics,
    instance_name: &str,
    bindings: &[(&str, Expr)],
) -> HdlFragment {
    debug_assert_eq!(kind, generics.kind(), "generics do not belong to {kind}");
    let declaration = component_declaration(kind);
    let mut port_map: Vec<(String, Expr)> = Vec::new();
    for port in &declaration.ports {
        if let Some((_, e)) = bindings.iter().find(|(p, _)| *p == port.name) {
            port_map.push((port.name.clone(), e.clone()));
        }
    }
    for (p, e) in bindings {
        if !declaration.ports.iter().any(|d| d.name == *p) {
            port_map.push((p.to_string(), e.clone()));
        }
    }
    HdlFragment {
        instance: Instance {
            label: instance_name.to_string(),
            component: declaration.name.clone(),
            generic_map: generic_map(generics),
            port_map,
        },
        declaration,
    }
}

/// The width-adapting helper entity. Its body concatenates the replicated
/// fill bit onto the input with `&`.
pub(crate) fn concat_extend_unit() -> DesignUnit {
    let decl = component_declaration(ComponentKind::ConcatExtend);
    let from_msb = Bound::param("FROM_WIDTH", 1);
    DesignUnit {
        context: vec![
            ContextItem::Library("ieee".into()),
            ContextItem::Use("ieee.std_logic_1164.all".into()),
        ],
        entity: Entity {
            name: decl.name.clone(),
            generics: decl.generics.clone(),
            ports: decl.ports.clone(),
        },
        architecture: Architecture {
            name: "rtl".into(),
            entity: decl.name.clone(),
            components: vec![],
            signals: vec![SignalDecl {
                name: "fill".into(),
                ty: HdlType::Logic,
            }],
            statements: vec![
                ConcurrentStmt::When {
                    target: "fill".into(),
                    value: Expr::Index("data".into(), from_msb),
                    cond: Expr::bin(
                        crate::hdl::ast::BinaryOp::Eq,
                        Expr::name("EXTENSION"),
                        Expr::Str("SIGN".into()),
                    ),
                    otherwise: Expr::Bit('0'),
                },
                ConcurrentStmt::Assign {
                    target: "result".into(),
                    value: Expr::Concat(vec![
                        Expr::Fill {
                            hi: Bound::param("TO_WIDTH", 1),
                            lo: Bound::param("FROM_WIDTH", 0),
                            fill: Box::new(Expr::name("fill")),
                        },
                        Expr::name("data"),
                    ]),
                },
            ],
            instances: vec![],
            processes: vec![],
        },
    }
}
