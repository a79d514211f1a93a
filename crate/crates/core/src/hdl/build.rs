use super::ast::*;
use crate::frontend::CiSpec;
use crate::lpm::{component_declaration, render_instance, ComponentKind, LpmGenerics};
use crate::mapper::{MappedDesign, Source, Tap};
use std::collections::BTreeMap;

pub const PORT_WIDTH: u32 = 32;

/// The fixed multicycle custom-instruction port set, in declaration order.
pub fn ci_ports() -> Vec<PortDecl> {
    vec![
        PortDecl::new("clk", PortDir::In, HdlType::Logic),
        PortDecl::new("clk_en", PortDir::In, HdlType::Logic),
        PortDecl::new("reset", PortDir::In, HdlType::Logic),
        PortDecl::new("start", PortDir::In, HdlType::Logic),
        PortDecl::new("dataa", PortDir::In, HdlType::Vector(PORT_WIDTH)),
        PortDecl::new("datab", PortDir::In, HdlType::Vector(PORT_WIDTH)),
        PortDecl::new("done", PortDir::Out, HdlType::Logic),
        PortDecl::new("result", PortDir::Out, HdlType::Vector(PORT_WIDTH)),
    ]
}

/// The low `width` bits of a `full`-bit signal.
#[derive(Debug, Clone)]
struct Bits {
    name: String,
    full: u32,
    width: u32,
}

impl Bits {
    fn whole(name: &str, width: u32) -> Bits {
        Bits {
            name: name.to_string(),
            full: width,
            width,
        }
    }

    fn expr(&self) -> Expr {
        if self.width == self.full {
            Expr::name(&self.name)
        } else {
            Expr::Slice {
                name: self.name.clone(),
                hi: Bound::Lit(self.width - 1),
                lo: Bound::Lit(0),
            }
        }
    }

    fn msb(&self) -> Expr {
        Expr::Index(self.name.clone(), Bound::Lit(self.width - 1))
    }
}

fn fill(count: u32, bit: Expr) -> Expr {
    Expr::Fill {
        hi: Bound::Lit(count - 1),
        lo: Bound::Lit(0),
        fill: Box::new(bit),
    }
}

/// Resizes `src` (read as `src_signed`) to `mid` bits, then extends to 32 bits
/// per `mid_signed`. Adjacent runs of the same fill bit are merged.
fn adapt_to_port(src: &Bits, src_signed: bool, mid: u32, mid_signed: bool) -> Expr {
    let kept = Bits {
        width: src.width.min(mid),
        ..src.clone()
    };
    let mut runs: Vec<(u32, Expr)> = Vec::new();
    let mut push = |count: u32, bit: Expr| {
        if count == 0 {
            return;
        }
        match runs.last_mut() {
            Some((n, b)) if *b == bit => *n += count,
            _ => runs.push((count, bit)),
        }
    };
    let mid_fill = if src_signed { kept.msb() } else { Expr::Bit('0') };
    let mid_msb = if mid > kept.width { mid_fill.clone() } else { kept.msb() };
    let top_fill = if mid_signed { mid_msb } else { Expr::Bit('0') };
    push(PORT_WIDTH - mid, top_fill);
    push(mid.saturating_sub(kept.width), mid_fill);
    if runs.is_empty() {
        return kept.expr();
    }
    let mut parts: Vec<Expr> = runs.into_iter().map(|(n, b)| fill(n, b)).collect();
    parts.push(kept.expr());
    Expr::Concat(parts)
}

fn zeros() -> Expr {
    Expr::Others('0')
}

fn assign(target: &str, value: Expr) -> SeqStmt {
    SeqStmt::Assign {
        target: target.to_string(),
        value,
    }
}

fn eq(name: &str, bit: char) -> Expr {
    Expr::bin(BinaryOp::Eq, Expr::name(name), Expr::Bit(bit))
}

struct Wires {
    /// Output signal per adapter index.
    adapter: Vec<String>,
    /// Per instance: the signal the node register loads from, and its width.
    tap: Vec<(String, u32)>,
}

/// Builds the VHDL design for a mapped custom instruction.
pub fn build_design(spec: &CiSpec, mapped: &MappedDesign) -> HdlDesign {
    let uses_lpm = !mapped.instances.is_empty();
    let uses_adapters = !mapped.adapters.is_empty();
    let has_modulus = mapped.instances.iter().any(|i| i.tap == Tap::Modulus);
    let done_step = mapped.done_cycle() as u32;

    let mut context = vec![
        ContextItem::Library("ieee".into()),
        ContextItem::Use("ieee.std_logic_1164.all".into()),
    ];
    if has_modulus {
        context.push(ContextItem::Use("ieee.numeric_std.all".into()));
    }
    if uses_lpm {
        context.push(ContextItem::Library("lpm".into()));
        context.push(ContextItem::Use("lpm.lpm_components.all".into()));
    }

    let components: Vec<ComponentDecl> = mapped
        .component_kinds
        .iter()
        .map(|&k| component_declaration(k))
        .collect();

    let mut signals = vec![
        SignalDecl {
            name: "busy".into(),
            ty: HdlType::Logic,
        },
        SignalDecl {
            name: "step".into(),
            ty: HdlType::Natural { max: done_step },
        },
    ];
    for r in mapped.input_registers.iter().chain(&mapped.interior_registers) {
        signals.push(SignalDecl {
            name: r.name.clone(),
            ty: HdlType::Vector(r.width),
        });
    }

    let source_expr = |wires: &Wires, s: Source| -> Expr {
        match s {
            Source::Node(id) => Expr::name(&mapped.register_of(id).name),
            Source::Adapter(i) => Expr::name(&wires.adapter[i]),
        }
    };

    let mut wires = Wires {
        adapter: mapped.adapters.iter().map(|a| format!("{}_out", a.label)).collect(),
        tap: Vec::new(),
    };
    let mut instances = Vec::new();
    let mut statements = Vec::new();

    for inst in &mapped.instances {
        for (i, a) in mapped.adapters.iter().enumerate().filter(|(_, a)| a.target == inst.node) {
            signals.push(SignalDecl {
                name: wires.adapter[i].clone(),
                ty: HdlType::Vector(a.to_width),
            });
            let g = LpmGenerics::ConcatExtend(crate::lpm::ConcatGenerics {
                from_width: a.from_width,
                to_width: a.to_width,
                extension: a.extension,
            });
            let frag = render_instance(
                ComponentKind::ConcatExtend,
                &g,
                &a.label,
                &[
                    ("data", Expr::name(&mapped.register_of(a.source).name)),
                    ("result", Expr::name(&wires.adapter[i])),
                ],
            );
            instances.push(frag.instance);
        }

        let a = source_expr(&wires, inst.inputs[0]);
        let b = source_expr(&wires, inst.inputs[1]);
        let tap = match &inst.generics {
            LpmGenerics::Divide(g) => {
                let quot = format!("{}_quot", inst.label);
                let rem = format!("{}_rem", inst.label);
                signals.push(SignalDecl {
                    name: quot.clone(),
                    ty: HdlType::Vector(g.width_n),
                });
                signals.push(SignalDecl {
                    name: rem.clone(),
                    ty: HdlType::Vector(g.width_d),
                });
                let frag = render_instance(
                    ComponentKind::Divide,
                    &inst.generics,
                    &inst.label,
                    &[
                        ("numer", a),
                        ("denom", b.clone()),
                        ("quotient", Expr::name(&quot)),
                        ("remain", Expr::name(&rem)),
                    ],
                );
                instances.push(frag.instance);
                match inst.tap {
                    Tap::Quotient => (quot, g.width_n),
                    Tap::Remainder => (rem, g.width_d),
                    Tap::Modulus => {
                        let m = format!("{}_mod", inst.label);
                        signals.push(SignalDecl {
                            name: m.clone(),
                            ty: HdlType::Vector(g.width_d),
                        });
                        statements.push(mod_correction(&m, &rem, b, g.width_d));
                        (m, g.width_d)
                    }
                    Tap::Result => unreachable!("divider taps a quotient or remainder"),
                }
            }
            g => {
                let out = format!("{}_out", inst.label);
                signals.push(SignalDecl {
                    name: out.clone(),
                    ty: HdlType::Vector(g.output_width()),
                });
                let frag = render_instance(
                    g.kind(),
                    g,
                    &inst.label,
                    &[("dataa", a), ("datab", b), ("result", Expr::name(&out))],
                );
                instances.push(frag.instance);
                (out, g.output_width())
            }
        };
        wires.tap.push(tap);
    }

    let process = control_process(mapped, &wires, done_step);

    let header = vec![
        "Generated by cigen. Do not edit.".to_string(),
        format!("Custom instruction `{}`, opcode {}", spec.name, spec.opcode),
        format!("{} = {}", spec.output.name, spec.expr),
        format!(
            "Multicycle: {} load cycle(s), {} compute level(s), done at enabled cycle {}",
            mapped.load_cycles(),
            mapped.max_level(),
            done_step
        ),
    ];

    let mut support = Vec::new();
    if uses_adapters {
        support.push(crate::lpm::template::concat_extend_unit());
    }

    HdlDesign {
        header,
        support,
        top: DesignUnit {
            context,
            entity: Entity {
                name: spec.name.clone(),
                generics: vec![],
                ports: ci_ports(),
            },
            architecture: Architecture {
                name: "rtl".into(),
                entity: spec.name.clone(),
                components,
                signals,
                statements,
                instances,
                processes: vec![process],
            },
        },
    }
}

/// `m <= rem + den` when the remainder is nonzero and its sign differs from the divisor's.
fn mod_correction(target: &str, rem: &str, den: Expr, width: u32) -> ConcurrentStmt {
    let den_msb = match &den {
        Expr::Name(n) => Expr::Index(n.clone(), Bound::Lit(width - 1)),
        other => unreachable!("divisor is always a named signal, got {other:?}"),
    };
    let sum = Expr::call(
        "std_logic_vector",
        vec![Expr::bin(
            BinaryOp::Add,
            Expr::call("signed", vec![Expr::name(rem)]),
            Expr::call("signed", vec![den]),
        )],
    );
    let nonzero = Expr::bin(BinaryOp::Ne, Expr::name(rem), fill(width, Expr::Bit('0')));
    let signs_differ = Expr::bin(
        BinaryOp::Ne,
        Expr::Index(rem.to_string(), Bound::Lit(width - 1)),
        den_msb,
    );
    ConcurrentStmt::When {
        target: target.to_string(),
        value: sum,
        cond: Expr::bin(BinaryOp::And, nonzero, signs_differ),
        otherwise: Expr::name(rem),
    }
}

fn control_process(mapped: &MappedDesign, wires: &Wires, done_step: u32) -> Process {
    let mut reset_body = vec![
        assign("busy", Expr::Bit('0')),
        assign("step", Expr::Int(0)),
        assign("done", Expr::Bit('0')),
        assign("result", zeros()),
    ];
    for r in mapped.input_registers.iter().chain(&mapped.interior_registers) {
        reset_body.push(assign(&r.name, zeros()));
    }

    let load = |cycle: usize| -> Vec<SeqStmt> {
        let (a, b) = &mapped.loading.cycles[cycle];
        let mut out = Vec::new();
        for (operand, port) in std::iter::once((a, "dataa")).chain(b.iter().map(|b| (b, "datab"))) {
            let leaf = mapped
                .input_registers
                .iter()
                .find(|r| r.name == format!("r_{operand}"))
                .expect("loaded operands have input registers");
            out.push(assign(
                &leaf.name,
                Expr::Slice {
                    name: port.to_string(),
                    hi: Bound::Lit(leaf.width - 1),
                    lo: Bound::Lit(0),
                },
            ));
        }
        out
    };

    let load_cycles = mapped.load_cycles() as u32;
    let mut arms: BTreeMap<u32, Vec<SeqStmt>> = BTreeMap::new();
    for step in 1..=done_step {
        let mut body = Vec::new();
        if step < load_cycles {
            body.extend(load(step as usize));
        } else {
            let level = step - load_cycles + 1;
            for (inst, (tap, tap_width)) in mapped.instances.iter().zip(&wires.tap) {
                if inst.level == level {
                    let reg = &mapped.register_of(inst.node).name;
                    let bits = Bits {
                        name: tap.clone(),
                        full: *tap_width,
                        width: inst.width,
                    };
                    body.push(assign(reg, bits.expr()));
                }
            }
        }
        if step == done_step {
            let out = &mapped.output;
            let root = match mapped.instances.iter().position(|i| i.node == out.root) {
                Some(idx) => Bits {
                    name: wires.tap[idx].0.clone(),
                    full: wires.tap[idx].1,
                    width: out.root_width,
                },
                None => Bits::whole(&mapped.register_of(out.root).name, out.root_width),
            };
            body.push(assign(
                "result",
                adapt_to_port(&root, out.root_signed, out.output_width, out.output_signed),
            ));
            body.push(assign("done", Expr::Bit('1')));
            body.push(assign("busy", Expr::Bit('0')));
            body.push(assign("step", Expr::Int(0)));
        } else {
            body.push(assign("step", Expr::Int(step + 1)));
        }
        arms.insert(step, body);
    }

    let mut start_body = load(0);
    start_body.push(assign("busy", Expr::Bit('1')));
    start_body.push(assign("step", Expr::Int(1)));

    let mut case_arms: Vec<(Choice, Vec<SeqStmt>)> =
        arms.into_iter().map(|(s, b)| (Choice::Int(s), b)).collect();
    case_arms.push((Choice::Others, vec![SeqStmt::Null]));

    let enabled = vec![
        assign("done", Expr::Bit('0')),
        SeqStmt::If {
            branches: vec![(
                eq("busy", '0'),
                vec![SeqStmt::If {
                    branches: vec![(eq("start", '1'), start_body)],
                    otherwise: vec![],
                }],
            )],
            otherwise: vec![SeqStmt::Case {
                selector: Expr::name("step"),
                arms: case_arms,
            }],
        },
    ];

    Process {
        label: "control".into(),
        sensitivity: vec!["clk".into(), "reset".into()],
        body: vec![SeqStmt::If {
            branches: vec![
                (eq("reset", '1'), reset_body),
                (
                    Expr::call("rising_edge", vec![Expr::name("clk")]),
                    vec![SeqStmt::If {
                        branches: vec![(eq("clk_en", '1'), enabled)],
                        otherwise: vec![],
                    }],
                ),
            ],
            otherwise: vec![],
        }],
    }
}
