use super::{eval_reference, simulate_ci, Inputs, SimError, Stimulus};
use crate::frontend::CiSpec;
use crate::mapper::MappedDesign;
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Bit pattern on the 32-bit result port.
    Value(u32),
    DivideByZero,
    Error(String),
}

impl From<Result<crate::lpm::BitVec, SimError>> for Outcome {
    fn from(r: Result<crate::lpm::BitVec, SimError>) -> Outcome {
        match r {
            Ok(v) => Outcome::Value(v.bits() as u32),
            Err(e) if e.is_divide_by_zero() => Outcome::DivideByZero,
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VectorOutcome {
    pub inputs: Inputs,
    pub reference: Outcome,
    pub simulated: Outcome,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub vectors: Vec<VectorOutcome>,
    /// First failing vector, if any.
    pub counterexample: Option<VectorOutcome>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn failures(&self) -> usize {
        self.vectors.iter().filter(|v| !v.pass).count()
    }

    pub fn divide_by_zero_count(&self) -> usize {
        self.vectors
            .iter()
            .filter(|v| v.reference == Outcome::DivideByZero)
            .count()
    }
}

/// Simulates every vector and compares with the reference evaluator. A
/// vector passes when both produce the same bits or both fault on a zero
/// divisor; any other error on either side is a failure.
pub fn check_equivalence(spec: &CiSpec, mapped: &MappedDesign, vectors: &[Inputs]) -> EquivalenceReport {
    let stim = Stimulus {
        summary_only: true,
        ..Stimulus::default()
    };
    let vectors: Vec<VectorOutcome> = vectors
        .iter()
        .map(|inputs| {
            let reference = Outcome::from(eval_reference(spec, inputs));
            let simulated = Outcome::from(simulate_ci(spec, mapped, inputs, &stim).map(|t| t.final_result));
            let pass = reference == simulated && !matches!(reference, Outcome::Error(_));
            VectorOutcome {
                inputs: inputs.clone(),
                reference,
                simulated,
                pass,
            }
        })
        .collect();
    let counterexample = vectors.iter().find(|v| !v.pass).cloned();
    EquivalenceReport { vectors, counterexample }
}

/// Random operand bindings for every used input. About a quarter of the
/// values are boundary values (0, ±1, extremes).
pub fn random_vectors<R: Rng>(spec: &CiSpec, count: usize, rng: &mut R) -> Vec<Inputs> {
    let used = spec.used_inputs();
    (0..count)
        .map(|_| {
            used.iter()
                .map(|d| {
                    let (lo, hi) = if d.signedness.is_signed() {
                        (-(1i64 << (d.width - 1)), (1i64 << (d.width - 1)) - 1)
                    } else {
                        (0, (1i64 << d.width) - 1)
                    };
                    let v = if rng.gen_ratio(1, 4) {
                        let edges = [0, 1, -1, lo, hi, lo + 1, hi - 1];
                        edges[rng.gen_range(0..edges.len())].clamp(lo, hi)
                    } else {
                        rng.gen_range(lo..=hi)
                    };
                    (d.name.clone(), v)
                })
                .collect()
        })
        .collect()
}
