//! Latency, software-cost and energy figures for a mapped instruction.

use crate::config::CostModel;
use crate::mapper::MappedDesign;
use serde::Serialize;
use thiserror::Error;

/// JSON schema of [`MetricsReport`] as written to `report.json`.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{what} must be a positive finite number, got {value}")]
pub struct EnergyError {
    pub what: &'static str,
    pub value: f64,
}

/// `E = P * T`; milliwatts times milliseconds gives microjoules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    #[serde(rename = "P")]
    pub power_mw: f64,
    #[serde(rename = "T")]
    pub time_ms: f64,
    #[serde(rename = "E")]
    pub energy_uj: f64,
}

impl Energy {
    pub fn new(power_mw: f64, time_ms: f64) -> Result<Energy, EnergyError> {
        for (what, value) in [("power", power_mw), ("time", time_ms)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(EnergyError { what, value });
            }
        }
        Ok(Energy {
            power_mw,
            time_ms,
            energy_uj: power_mw * time_ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub name: String,
    pub opcode: u32,
    pub operand_sequence: Vec<String>,
    pub operation_sequence: Vec<String>,
    pub max_level: u32,
    pub load_cycles: usize,
    pub done_cycle: usize,
    pub component_kinds: Vec<String>,
    pub instances: usize,
    pub adapters: usize,
    /// Load cycles plus one per level (at least one).
    pub ci_cycles: usize,
    /// Sum of per-operation software costs, at least 1.
    pub sw_cycles: u64,
    pub speedup_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<Energy>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn estimate_metrics(mapped: &MappedDesign, costs: &CostModel, energy: Option<Energy>) -> MetricsReport {
    let ops: Vec<_> = mapped
        .analysis
        .operation_sequence
        .iter()
        .map(|&id| mapped.dfg.node(id).op_kind().expect("op node"))
        .collect();
    let ci_cycles = mapped.load_cycles() + mapped.max_level().max(1) as usize;
    let sw_cycles = ops.iter().map(|&k| u64::from(costs.cost(k))).sum::<u64>().max(1);
    MetricsReport {
        name: mapped.name.clone(),
        opcode: mapped.opcode,
        operand_sequence: mapped.analysis.operand_sequence.clone(),
        operation_sequence: ops.iter().map(|k| k.mnemonic().to_string()).collect(),
        max_level: mapped.max_level(),
        load_cycles: mapped.load_cycles(),
        done_cycle: mapped.done_cycle(),
        component_kinds: mapped.component_kinds.iter().map(|k| k.label().to_string()).collect(),
        instances: mapped.instances.len(),
        adapters: mapped.adapters.len(),
        ci_cycles,
        sw_cycles,
        speedup_estimate: sw_cycles as f64 / ci_cycles as f64,
        energy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{build_dfg, parse_ci_spec};
    use crate::mapper::map_dfg;

    fn mapped(src: &str) -> MappedDesign {
        map_dfg(&build_dfg(&parse_ci_spec(src).unwrap()))
    }

    #[test]
    fn mac_default_costs() {
        let m = mapped("ci f(opcode=0) { input a : signed<32>; input b : signed<32>; input c : signed<32>; output x : signed<32>; x = a * b + c; }");
        let r = estimate_metrics(&m, &CostModel::default(), None);
        assert_eq!((r.sw_cycles, r.ci_cycles), (4, 4));
        assert_eq!(r.speedup_estimate, 1.0);
        assert_eq!(r.component_kinds, ["ADD_SUB", "MULT"]);
        assert_eq!(r.operation_sequence, ["MUL", "ADD"]);
        assert!(!r.to_json().contains("energy"));
    }

    #[test]
    fn identity_has_positive_speedup() {
        let m = mapped("ci i(opcode=0) { input a : signed<8>; output x : signed<8>; x = a; }");
        let r = estimate_metrics(&m, &CostModel::default(), None);
        assert_eq!(r.ci_cycles, 2);
        assert!(r.component_kinds.is_empty());
        assert!(r.speedup_estimate > 0.0);
    }

    #[test]
    fn energy_product() {
        let e = Energy::new(298.0, 10.0).unwrap();
        assert_eq!(e.energy_uj, 2980.0);
        let json = serde_json::to_value(e).unwrap();
        assert_eq!(json, serde_json::json!({"P": 298.0, "T": 10.0, "E": 2980.0}));
        assert!(Energy::new(-1.0, 10.0).is_err());
        assert!(Energy::new(1.0, f64::NAN).is_err());
    }
}
