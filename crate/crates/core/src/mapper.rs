//! Component planning: node widths, deduplicated component kinds, one
//! instance per operation, width adapters, registers and operand loading.

use crate::frontend::{analyze, AnalysisResult, Dfg, NodeId, NodeKind, OpKind};
use crate::lpm::{
    AddSubGenerics, ComponentKind, DivideGenerics, Direction, Extension, LpmGenerics,
    MultGenerics, Representation,
};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("expression uses no input operands")]
    NoInputs,
}

pub fn component_kind(op: OpKind) -> ComponentKind {
    match op {
        OpKind::Add | OpKind::Sub => ComponentKind::AddSub,
        OpKind::Mul => ComponentKind::Mult,
        OpKind::Divs
        | OpKind::Divu
        | OpKind::Mods
        | OpKind::Modu
        | OpKind::Rems
        | OpKind::Remu => ComponentKind::Divide,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Node(NodeId),
    /// Index into [`MappedDesign::adapters`].
    Adapter(usize),
}

/// Which component output feeds the node's register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tap {
    Result,
    Quotient,
    /// Dividend-signed remainder.
    Remainder,
    /// Remainder corrected to the divisor's sign.
    Modulus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdapterPlan {
    pub label: String,
    pub target: NodeId,
    pub side: Side,
    pub source: NodeId,
    pub from_width: u32,
    pub to_width: u32,
    pub extension: Extension,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstancePlan {
    pub label: String,
    pub node: NodeId,
    pub op: OpKind,
    pub generics: LpmGenerics,
    pub inputs: [Source; 2],
    pub tap: Tap,
    /// Node (register) width; the tapped output may be wider and is cut to its low bits.
    pub width: u32,
    pub level: u32,
}

impl InstancePlan {
    pub fn kind(&self) -> ComponentKind {
        self.generics.kind()
    }

    pub fn tap_width(&self) -> u32 {
        match (&self.generics, self.tap) {
            (LpmGenerics::Divide(g), Tap::Remainder | Tap::Modulus) => g.width_d,
            (g, _) => g.output_width(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegisterPlan {
    pub name: String,
    pub node: NodeId,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadingPlan {
    /// One entry per load cycle: operand on `dataa`, optional operand on `datab`.
    pub cycles: Vec<(String, Option<String>)>,
}

impl LoadingPlan {
    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    pub fn flatten(&self) -> Vec<&str> {
        self.cycles
            .iter()
            .flat_map(|(a, b)| std::iter::once(a.as_str()).chain(b.as_deref()))
            .collect()
    }

    /// `(cycle, port)` where the operand is delivered; port 0 is `dataa`.
    pub fn slot_of(&self, operand: &str) -> Option<(usize, usize)> {
        self.cycles.iter().enumerate().find_map(|(i, (a, b))| {
            if a == operand {
                Some((i, 0))
            } else if b.as_deref() == Some(operand) {
                Some((i, 1))
            } else {
                None
            }
        })
    }
}

/// How the root value reaches the 32-bit result port: resized to the
/// declared output width first, then extended by the output's signedness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputPlan {
    pub root: NodeId,
    pub root_width: u32,
    pub root_signed: bool,
    pub output_width: u32,
    pub output_signed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappedDesign {
    pub name: String,
    pub opcode: u32,
    pub dfg: Dfg,
    pub analysis: AnalysisResult,
    pub component_kinds: BTreeSet<ComponentKind>,
    /// In operation-sequence order.
    pub instances: Vec<InstancePlan>,
    pub adapters: Vec<AdapterPlan>,
    pub input_registers: Vec<RegisterPlan>,
    pub interior_registers: Vec<RegisterPlan>,
    pub loading: LoadingPlan,
    pub output: OutputPlan,
}

impl MappedDesign {
    pub fn instance_for(&self, node: NodeId) -> Option<&InstancePlan> {
        self.instances.iter().find(|i| i.node == node)
    }

    /// Register holding a node's value (`r_<operand>` or `s_<n>`).
    pub fn register_of(&self, node: NodeId) -> &RegisterPlan {
        self.input_registers
            .iter()
            .chain(&self.interior_registers)
            .find(|r| r.node == node)
            .expect("every node has a register")
    }

    pub fn load_cycles(&self) -> usize {
        self.loading.cycle_count()
    }

    pub fn max_level(&self) -> u32 {
        self.analysis.max_level
    }

    /// Enabled cycle (0 = start) at which `done` is raised.
    pub fn done_cycle(&self) -> usize {
        self.load_cycles() + self.max_level().max(1) as usize - 1
    }
}

/// Fills in operation widths bottom-up.
pub fn infer_widths(dfg: &Dfg) -> Dfg {
    let mut out = dfg.clone();
    for i in 0..out.nodes.len() {
        let NodeKind::Op { kind, left, right } = out.nodes[i].kind else {
            continue;
        };
        let wl = out.width(left);
        let wr = out.width(right);
        let w = match kind {
            OpKind::Add | OpKind::Sub => wl.max(wr),
            OpKind::Mul => (wl + wr).min(32),
            OpKind::Divs | OpKind::Divu => wl,
            OpKind::Mods | OpKind::Modu | OpKind::Rems | OpKind::Remu => wr,
        };
        out.nodes[i].width = Some(w);
    }
    out
}

pub fn plan_loading(analysis: &AnalysisResult) -> Result<LoadingPlan, MapError> {
    if analysis.operand_sequence.is_empty() {
        return Err(MapError::NoInputs);
    }
    Ok(LoadingPlan {
        cycles: analysis
            .operand_sequence
            .chunks(2)
            .map(|pair| (pair[0].clone(), pair.get(1).cloned()))
            .collect(),
    })
}

/// Plans components for a width-inferred graph.
pub fn plan_components(dfg: &Dfg) -> MappedDesign {
    let analysis = analyze(dfg);
    let loading = plan_loading(&analysis).expect("the grammar guarantees at least one operand");

    let mut adapters: Vec<AdapterPlan> = Vec::new();
    let mut instances = Vec::new();
    let mut interior_registers = Vec::new();

    for (pos, &id) in analysis.operation_sequence.iter().enumerate() {
        let n = pos + 1;
        let node = dfg.node(id);
        let NodeKind::Op { kind, left, right } = node.kind else {
            unreachable!("operation sequence holds op nodes only")
        };
        let signed = node.signedness.is_signed();
        let width = dfg.width(id);
        let component = component_kind(kind);

        // Port width each operand must be presented at.
        let port_width = |child: NodeId| -> u32 {
            let c = dfg.node(child);
            let w = dfg.width(child);
            match component {
                ComponentKind::AddSub => width,
                // Unsigned operands of signed multiply/divide get a zero bit
                // so their value survives the signed reading.
                _ if signed && !c.signedness.is_signed() => w + 1,
                _ => w,
            }
        };

        let mut inputs = [Source::Node(left), Source::Node(right)];
        for (slot, (side, child)) in [(Side::Left, left), (Side::Right, right)].into_iter().enumerate() {
            let from = dfg.width(child);
            let to = port_width(child);
            if to > from {
                adapters.push(AdapterPlan {
                    label: format!("x_{}", adapters.len() + 1),
                    target: id,
                    side,
                    source: child,
                    from_width: from,
                    to_width: to,
                    extension: Extension::from_signed(dfg.node(child).signedness.is_signed()),
                });
                inputs[slot] = Source::Adapter(adapters.len() - 1);
            }
        }

        let (pa, pb) = (port_width(left), port_width(right));
        let rep = Representation::from_signed(signed);
        let (generics, tap) = match kind {
            OpKind::Add | OpKind::Sub => (
                LpmGenerics::AddSub(AddSubGenerics {
                    width,
                    direction: if kind == OpKind::Add {
                        Direction::Add
                    } else {
                        Direction::Sub
                    },
                }),
                Tap::Result,
            ),
            OpKind::Mul => (LpmGenerics::Mult(MultGenerics::new(pa, pb, rep)), Tap::Result),
            _ => {
                let g = LpmGenerics::Divide(DivideGenerics {
                    width_n: pa,
                    width_d: pb,
                    n_representation: rep,
                    d_representation: rep,
                });
                let tap = match kind {
                    OpKind::Divs | OpKind::Divu => Tap::Quotient,
                    OpKind::Mods if signed => Tap::Modulus,
                    _ => Tap::Remainder,
                };
                (g, tap)
            }
        };

        instances.push(InstancePlan {
            label: format!("u_{}_{n}", kind.mnemonic().to_ascii_lowercase()),
            node: id,
            op: kind,
            generics,
            inputs,
            tap,
            width,
            level: node.level,
        });
        interior_registers.push(RegisterPlan {
            name: format!("s_{n}"),
            node: id,
            width,
        });
    }

    let input_registers = dfg
        .leaves()
        .map(|leaf| match &leaf.kind {
            NodeKind::Leaf(decl) => RegisterPlan {
                name: format!("r_{}", decl.name),
                node: leaf.id,
                width: decl.width,
            },
            NodeKind::Op { .. } => unreachable!(),
        })
        .collect();

    let component_kinds = instances
        .iter()
        .map(InstancePlan::kind)
        .chain(adapters.iter().map(|_| ComponentKind::ConcatExtend))
        .collect();

    let root = dfg.node(dfg.root);
    MappedDesign {
        name: dfg.name.clone(),
        opcode: dfg.opcode,
        output: OutputPlan {
            root: dfg.root,
            root_width: dfg.width(dfg.root),
            root_signed: root.signedness.is_signed(),
            output_width: dfg.output.width,
            output_signed: dfg.output.signedness.is_signed(),
        },
        dfg: dfg.clone(),
        analysis,
        component_kinds,
        instances,
        adapters,
        input_registers,
        interior_registers,
        loading,
    }
}

/// Width inference followed by component planning.
pub fn map_dfg(dfg: &Dfg) -> MappedDesign {
    plan_components(&infer_widths(dfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{build_dfg, parse_ci_spec};

    fn mapped(decls: &str, expr: &str) -> MappedDesign {
        let text = format!("ci t(opcode=0){{ {decls} output X: signed<32>; X = {expr}; }}");
        map_dfg(&build_dfg(&parse_ci_spec(&text).unwrap()))
    }

    const S32: &str = "input a: signed<32>; input b: signed<32>; input c: signed<32>; input d: signed<32>;";

    #[test]
    fn kind_mapping_is_total() {
        for op in OpKind::ALL {
            let k = component_kind(op);
            match op {
                OpKind::Add | OpKind::Sub => assert_eq!(k, ComponentKind::AddSub),
                OpKind::Mul => assert_eq!(k, ComponentKind::Mult),
                _ => assert_eq!(k, ComponentKind::Divide),
            }
        }
    }

    #[test]
    fn mul_width_capped() {
        let m = mapped("input a: signed<16>; input b: signed<16>;", "a * b");
        assert_eq!(m.instances[0].width, 32);
        let m = mapped("input a: signed<20>; input b: signed<20>;", "a * b");
        assert_eq!(m.instances[0].width, 32);
        let m = mapped("input a: signed<4>; input b: signed<8>;", "a * b");
        assert_eq!(m.instances[0].width, 12);
    }

    #[test]
    fn add_extends_narrow_side() {
        let m = mapped("input a: signed<32>; input b: signed<8>;", "a + b");
        assert_eq!(m.instances[0].width, 32);
        assert_eq!(m.adapters.len(), 1);
        let x = &m.adapters[0];
        assert_eq!((x.side, x.from_width, x.to_width, x.extension), (Side::Right, 8, 32, Extension::Sign));
        assert_eq!(m.instances[0].inputs[1], Source::Adapter(0));
        assert!(m.component_kinds.contains(&ComponentKind::ConcatExtend));
    }

    #[test]
    fn divide_widths() {
        let m = mapped("input a: signed<8>; input b: signed<4>;", "(a / b) + (a mod b)");
        let q = &m.instances[0];
        let md = &m.instances[1];
        assert_eq!((q.op, q.width, q.tap), (OpKind::Divs, 8, Tap::Quotient));
        assert_eq!((md.op, md.width, md.tap), (OpKind::Mods, 4, Tap::Modulus));
    }

    #[test]
    fn dedup_of_add_sub() {
        let m = mapped(S32, "(a+b)-(c+d)");
        assert_eq!(m.component_kinds.iter().copied().collect::<Vec<_>>(), vec![ComponentKind::AddSub]);
        assert_eq!(m.instances.len(), 3);
        let dirs: Vec<_> = m
            .instances
            .iter()
            .map(|i| match i.generics {
                LpmGenerics::AddSub(g) => g.direction,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(dirs, vec![Direction::Add, Direction::Add, Direction::Sub]);
    }

    #[test]
    fn worked_example_plan() {
        let m = mapped(S32, "(a * b) + c");
        let kinds: Vec<_> = m.component_kinds.iter().copied().collect();
        assert_eq!(kinds, vec![ComponentKind::AddSub, ComponentKind::Mult]);
        assert_eq!(m.instances.len(), 2);
        assert_eq!(m.instances[0].label, "u_mul_1");
        assert_eq!(m.instances[1].label, "u_add_2");
        assert!(m.adapters.is_empty());
        assert_eq!(m.done_cycle(), 3);
    }

    #[test]
    fn identity_plan() {
        let m = mapped("input a: unsigned<8>;", "a");
        assert!(m.component_kinds.is_empty());
        assert!(m.instances.is_empty());
        assert_eq!(m.loading.cycles, vec![("a".to_string(), None)]);
        assert_eq!(m.done_cycle(), 1);
    }

    #[test]
    fn mixed_signedness_multiply_gets_zero_bit() {
        let m = mapped("input a: unsigned<8>; input b: signed<8>;", "a * b");
        assert_eq!(m.adapters.len(), 1);
        assert_eq!((m.adapters[0].from_width, m.adapters[0].to_width), (8, 9));
        assert_eq!(m.adapters[0].extension, Extension::Zero);
        match m.instances[0].generics {
            LpmGenerics::Mult(g) => assert_eq!((g.width_a, g.width_b, g.width_p), (9, 8, 17)),
            _ => unreachable!(),
        }
        assert_eq!(m.instances[0].width, 16);
    }

    #[test]
    fn loading_pairs_operands() {
        let plan = |ops: &[&str]| {
            plan_loading(&AnalysisResult {
                operand_sequence: ops.iter().map(|s| s.to_string()).collect(),
                operation_sequence: vec![],
                max_level: 0,
            })
        };
        let p = plan(&["a", "b", "c"]).unwrap();
        assert_eq!(p.cycles, vec![("a".into(), Some("b".into())), ("c".into(), None)]);
        assert_eq!(p.flatten(), vec!["a", "b", "c"]);
        assert_eq!(plan(&["a", "b"]).unwrap().cycle_count(), 1);
        assert_eq!(plan(&["a", "b", "c", "d"]).unwrap().cycles.len(), 2);
        assert_eq!(plan(&[]), Err(MapError::NoInputs));
    }
}
