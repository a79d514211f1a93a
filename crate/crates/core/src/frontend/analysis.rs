use super::{Dfg, NodeId, NodeKind};
use serde::Serialize;

/// Operands and operations separated out of a [`Dfg`] in priority order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisResult {
    /// Used operand names, left-to-right by first appearance.
    pub operand_sequence: Vec<String>,
    /// Op nodes, ascending level, ties in source order.
    pub operation_sequence: Vec<NodeId>,
    pub max_level: u32,
}

impl AnalysisResult {
    pub fn operand_count(&self) -> usize {
        self.operand_sequence.len()
    }

    /// 1-based position of an op node in the operation sequence.
    pub fn op_index(&self, id: NodeId) -> Option<usize> {
        self.operation_sequence
            .iter()
            .position(|&n| n == id)
            .map(|i| i + 1)
    }
}

pub fn analyze(dfg: &Dfg) -> AnalysisResult {
    let operand_sequence = dfg
        .nodes
        .iter()
        .filter_map(|n| match &n.kind {
            NodeKind::Leaf(decl) => Some(decl.name.clone()),
            NodeKind::Op { .. } => None,
        })
        .collect();
    let mut ops: Vec<_> = dfg.ops().collect();
    // Node storage is left-first post-order; a stable sort keeps that order within a level.
    ops.sort_by_key(|n| n.level);
    AnalysisResult {
        operand_sequence,
        operation_sequence: ops.into_iter().map(|n| n.id).collect(),
        max_level: dfg.max_level(),
    }
}
