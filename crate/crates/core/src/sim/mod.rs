//! Verification oracle: a reference evaluator working on plain integers and a
//! cycle-accurate model of the generated multicycle datapath.

mod cycle;
mod equiv;
mod reference;

pub use cycle::{simulate_ci, CycleRecord, SimTrace, Stimulus};
pub use equiv::{check_equivalence, random_vectors, EquivalenceReport, Outcome, VectorOutcome};
pub use reference::{check_inputs, eval_reference};

use crate::lpm::LpmError;
use std::collections::BTreeMap;
use thiserror::Error;

/// Operand values keyed by identifier.
pub type Inputs = BTreeMap<String, i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("no value bound for operand `{0}`")]
    MissingInput(String),
    #[error("`{0}` is not an input of this instruction")]
    UnknownInput(String),
    #[error("value {value} of `{name}` does not fit {signedness}<{width}>")]
    InputOutOfRange {
        name: String,
        value: i64,
        width: u32,
        signedness: crate::frontend::Signedness,
    },
    #[error("division by zero in `{site}`{}", cycle.map(|c| format!(" at cycle {c}")).unwrap_or_default())]
    DivideByZero { site: String, cycle: Option<usize> },
    #[error("start asserted at cycle {cycle} while an instruction is in flight")]
    ProtocolViolation { cycle: usize },
    #[error("done was not raised within {0} cycles")]
    Timeout(usize),
    #[error("component fault in `{site}`: {source}")]
    Component { site: String, source: LpmError },
}

impl SimError {
    pub fn is_divide_by_zero(&self) -> bool {
        matches!(self, SimError::DivideByZero { .. })
    }
}
