use super::{CiSpec, ExprTree, OpKind, OperandDecl, Signedness};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Leaf(OperandDecl),
    Op {
        kind: OpKind,
        left: NodeId,
        right: NodeId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DfgNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub level: u32,
    /// Leaf widths come from declarations; op widths are filled in by the mapper.
    pub width: Option<u32>,
    pub signedness: Signedness,
}

impl DfgNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf(_))
    }

    pub fn operands(&self) -> Option<(NodeId, NodeId)> {
        match self.kind {
            NodeKind::Op { left, right, .. } => Some((left, right)),
            NodeKind::Leaf(_) => None,
        }
    }

    pub fn op_kind(&self) -> Option<OpKind> {
        match self.kind {
            NodeKind::Op { kind, .. } => Some(kind),
            NodeKind::Leaf(_) => None,
        }
    }
}

/// Leveled dataflow graph. Nodes are stored in left-first post-order, so a
/// node's operands always precede it and disjoint subtrees keep source order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dfg {
    pub name: String,
    pub opcode: u32,
    pub nodes: Vec<DfgNode>,
    pub root: NodeId,
    pub output: OperandDecl,
}

impl Dfg {
    pub fn node(&self, id: NodeId) -> &DfgNode {
        &self.nodes[id.0]
    }

    pub fn max_level(&self) -> u32 {
        self.node(self.root).level
    }

    pub fn leaves(&self) -> impl Iterator<Item = &DfgNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn ops(&self) -> impl Iterator<Item = &DfgNode> {
        self.nodes.iter().filter(|n| !n.is_leaf())
    }

    pub fn width(&self, id: NodeId) -> u32 {
        self.node(id)
            .width
            .expect("node width queried before width inference")
    }

    /// Byte-stable serialization used to compare graphs structurally.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("Dfg serializes")
    }
}

/// Lowers the expression tree into a [`Dfg`] with one shared leaf per identifier.
pub fn build_dfg(spec: &CiSpec) -> Dfg {
    struct Builder<'a> {
        spec: &'a CiSpec,
        nodes: Vec<DfgNode>,
        leaves: HashMap<&'a str, NodeId>,
    }

    impl<'a> Builder<'a> {
        fn lower(&mut self, e: &'a ExprTree) -> NodeId {
            match e {
                ExprTree::Leaf(name) => {
                    if let Some(&id) = self.leaves.get(name.as_str()) {
                        return id;
                    }
                    let decl = self
                        .spec
                        .input(name)
                        .expect("identifiers are validated by the parser")
                        .clone();
                    let id = NodeId(self.nodes.len());
                    self.nodes.push(DfgNode {
                        id,
                        level: 0,
                        width: Some(decl.width),
                        signedness: decl.signedness,
                        kind: NodeKind::Leaf(decl),
                    });
                    self.leaves.insert(name, id);
                    id
                }
                ExprTree::BinOp { kind, left, right } => {
                    let l = self.lower(left);
                    let r = self.lower(right);
                    let (ln, rn) = (&self.nodes[l.0], &self.nodes[r.0]);
                    let level = 1 + ln.level.max(rn.level);
                    let signedness = ln.signedness.join(rn.signedness);
                    let id = NodeId(self.nodes.len());
                    self.nodes.push(DfgNode {
                        id,
                        kind: NodeKind::Op {
                            kind: *kind,
                            left: l,
                            right: r,
                        },
                        level,
                        width: None,
                        signedness,
                    });
                    id
                }
            }
        }
    }

    let mut b = Builder {
        spec,
        nodes: Vec::new(),
        leaves: HashMap::new(),
    };
    let root = b.lower(&spec.expr);
    Dfg {
        name: spec.name.clone(),
        opcode: spec.opcode,
        nodes: b.nodes,
        root,
        output: spec.output.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_ci_spec;

    fn dfg(expr: &str) -> Dfg {
        let text = format!(
            "ci t(opcode=0){{ input a: signed<32>; input b: signed<32>; input c: signed<32>; \
             input d: signed<32>; output X: signed<32>; X = {expr}; }}"
        );
        build_dfg(&parse_ci_spec(&text).unwrap())
    }

    #[test]
    fn worked_example_shape() {
        let g = dfg("(a * b) + c");
        let leaves: Vec<_> = g.leaves().map(|n| (n.id.0, n.level)).collect();
        assert_eq!(leaves, vec![(0, 0), (1, 0), (3, 0)]);
        let ops: Vec<_> = g.ops().map(|n| (n.op_kind().unwrap(), n.level)).collect();
        assert_eq!(ops, vec![(OpKind::Mul, 1), (OpKind::Add, 2)]);
        assert_eq!(g.node(g.root).op_kind(), Some(OpKind::Add));
        assert_eq!(g.max_level(), 2);
    }

    #[test]
    fn identity_is_single_leaf() {
        let g = dfg("a");
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.max_level(), 0);
        assert!(g.node(g.root).is_leaf());
    }

    #[test]
    fn shared_leaf() {
        let g = dfg("(a+a)");
        assert_eq!(g.leaves().count(), 1);
        assert_eq!(g.node(g.root).operands(), Some((NodeId(0), NodeId(0))));
    }

    #[test]
    fn levels_follow_longest_path() {
        let g = dfg("a + ((b * c) - d)");
        for n in &g.nodes {
            let expected = match n.operands() {
                None => 0,
                Some((l, r)) => 1 + g.node(l).level.max(g.node(r).level),
            };
            assert_eq!(n.level, expected);
        }
        assert_eq!(g.max_level(), 3);
    }
}
