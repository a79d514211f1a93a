//! Build configuration, read from JSON.

use crate::cpatch::DEFAULT_INTRINSIC;
use crate::frontend::OpKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown operation `{0}` in cost table")]
    UnknownOp(String),
    #[error("cost of {op} must be at least 1, got {cost}")]
    InvalidCost { op: OpKind, cost: u32 },
    #[error("vector count must be at least 1")]
    NoVectors,
    #[error("intrinsic `{0}` is not a C identifier")]
    BadIntrinsic(String),
}

/// Software cycle cost per operation, used for the speedup estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, u32>", into = "BTreeMap<String, u32>")]
pub struct CostModel {
    costs: [u32; 9],
}

impl Default for CostModel {
    fn default() -> CostModel {
        CostModel {
            costs: OpKind::ALL.map(|k| match k {
                OpKind::Add | OpKind::Sub => 1,
                OpKind::Mul => 3,
                _ => 35,
            }),
        }
    }
}

fn index(op: OpKind) -> usize {
    OpKind::ALL.iter().position(|&k| k == op).expect("ALL lists every kind")
}

impl CostModel {
    pub fn cost(&self, op: OpKind) -> u32 {
        self.costs[index(op)]
    }

    pub fn with_cost(mut self, op: OpKind, cost: u32) -> Result<CostModel, ConfigError> {
        if cost == 0 {
            return Err(ConfigError::InvalidCost { op, cost });
        }
        self.costs[index(op)] = cost;
        Ok(self)
    }
}

/// Keys are operation mnemonics; kinds not listed keep their default.
impl TryFrom<BTreeMap<String, u32>> for CostModel {
    type Error = ConfigError;

    fn try_from(map: BTreeMap<String, u32>) -> Result<CostModel, ConfigError> {
        map.into_iter().try_fold(CostModel::default(), |m, (k, cost)| {
            let op = OpKind::from_mnemonic(&k).ok_or(ConfigError::UnknownOp(k))?;
            m.with_cost(op, cost)
        })
    }
}

impl From<CostModel> for BTreeMap<String, u32> {
    fn from(m: CostModel) -> BTreeMap<String, u32> {
        OpKind::ALL
            .into_iter()
            .map(|k| (k.mnemonic().to_string(), m.cost(k)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Random vectors in the build-time equivalence check.
    pub vectors: usize,
    pub seed: u64,
    /// Custom-instruction builtin spelled in the generated header.
    pub intrinsic: String,
    pub costs: CostModel,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            vectors: 256,
            seed: 0,
            intrinsic: DEFAULT_INTRINSIC.to_string(),
            costs: CostModel::default(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, ConfigError> {
        let c: Config = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Config::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.vectors == 0 {
            return Err(ConfigError::NoVectors);
        }
        let mut chars = self.intrinsic.chars();
        let ident = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ident {
            return Err(ConfigError::BadIntrinsic(self.intrinsic.clone()));
        }
        Ok(())
    }
}
