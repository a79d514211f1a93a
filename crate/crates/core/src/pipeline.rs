//! End-to-end driver: spec text to VHDL, C header and metrics report, with a
//! structural check and a randomized equivalence check before anything is
//! written.

use crate::config::{Config, ConfigError};
use crate::cpatch::{emit_header, header_file_name, PatchError};
use crate::frontend::{build_dfg, parse_ci_spec, CiSpec, ParseError};
use crate::hdl::{build_design, emit_vhdl, validate_emitted, validate_structure, Violation};
use crate::mapper::{map_dfg, MappedDesign};
use crate::metrics::{estimate_metrics, MetricsReport};
use crate::sim::{check_equivalence, random_vectors, Inputs, SimError, VectorOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("[{stage}] {path}: {source}")]
    Io {
        stage: &'static str,
        path: String,
        source: std::io::Error,
    },
    #[error("[parse] {0}")]
    Parse(#[from] ParseError),
    #[error("[config] {0}")]
    Config(#[from] ConfigError),
    #[error("[validate] {} structural violation(s): {}", .0.len(), .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),
    #[error("[validate] emitted VHDL could not be read back: {0}")]
    Unreadable(String),
    #[error("[verify] mismatch for inputs {:?}: reference {:?}, simulated {:?}", .0.inputs, .0.reference, .0.simulated)]
    Equivalence(Box<VectorOutcome>),
    #[error("[simulate] {0}")]
    Sim(#[from] SimError),
    #[error("[patch] {0}")]
    Patch(#[from] PatchError),
    #[error("[input] {0}")]
    Usage(String),
}

impl PipelineError {
    /// 1 for user or input errors, 2 when generated output fails its own checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) | PipelineError::Unreadable(_) | PipelineError::Equivalence(_) => 2,
            _ => 1,
        }
    }
}

pub fn read_file(stage: &'static str, path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        stage,
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), PipelineError> {
    std::fs::write(path, text).map_err(|source| PipelineError::Io {
        stage: "write",
        path: path.display().to_string(),
        source,
    })
}

/// Parses and maps a spec.
pub fn compile(text: &str) -> Result<(CiSpec, MappedDesign), PipelineError> {
    let spec = parse_ci_spec(text)?;
    let mapped = map_dfg(&build_dfg(&spec));
    Ok((spec, mapped))
}

/// Generated file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub vhdl_name: String,
    pub vhdl: String,
    pub header_name: String,
    pub header: String,
    pub report: MetricsReport,
}

impl Artifacts {
    pub fn files(&self) -> [(&str, String); 3] {
        [
            (self.vhdl_name.as_str(), self.vhdl.clone()),
            (self.header_name.as_str(), self.header.clone()),
            ("report.json", self.report.to_json()),
        ]
    }
}

fn progress(out: &mut dyn Write, stage: &str, msg: std::fmt::Arguments) {
    // Progress output is best effort; a closed stdout must not fail the build.
    let _ = writeln!(out, "[{stage}] {msg}");
}

/// Everything except writing: generation, structural validation and the
/// equivalence check.
pub fn generate(
    spec: &CiSpec,
    mapped: &MappedDesign,
    config: &Config,
    out: &mut dyn Write,
) -> Result<Artifacts, PipelineError> {
    let design = build_design(spec, mapped);
    let vhdl = emit_vhdl(&design);
    let kinds: Vec<&str> = mapped.component_kinds.iter().map(|k| k.label()).collect();
    progress(
        out,
        "generate",
        format_args!(
            "entity {}: {} instance(s), {} adapter(s), components [{}]",
            spec.name,
            mapped.instances.len(),
            mapped.adapters.len(),
            kinds.join(", ")
        ),
    );

    let mut violations = validate_structure(&design);
    if violations.is_empty() {
        violations = validate_emitted(&vhdl).map_err(PipelineError::Unreadable)?;
    }
    if !violations.is_empty() {
        return Err(PipelineError::Validation(violations));
    }
    progress(out, "validate", format_args!("structure ok"));

    let vectors = random_vectors(spec, config.vectors, &mut ChaCha8Rng::seed_from_u64(config.seed));
    let report = check_equivalence(spec, mapped, &vectors);
    if let Some(ce) = report.counterexample {
        return Err(PipelineError::Equivalence(Box::new(ce)));
    }
    progress(
        out,
        "verify",
        format_args!(
            "{} vector(s) match the reference ({} divide-by-zero)",
            report.vectors.len(),
            report.divide_by_zero_count()
        ),
    );

    Ok(Artifacts {
        vhdl_name: format!("{}.vhd", spec.name),
        vhdl,
        header_name: header_file_name(spec),
        header: emit_header(spec, &config.intrinsic),
        report: estimate_metrics(mapped, &config.costs, None),
    })
}

/// Builds a spec file into `out_dir`. Nothing is written unless every check passes.
pub fn run_build(
    spec_path: &Path,
    out_dir: &Path,
    config: &Config,
    out: &mut dyn Write,
) -> Result<Vec<PathBuf>, PipelineError> {
    config.validate()?;
    let text = read_file("parse", spec_path)?;
    let (spec, mapped) = compile(&text)?;
    progress(
        out,
        "parse",
        format_args!("ci {} (opcode {}): {} = {}", spec.name, spec.opcode, spec.output.name, spec.expr),
    );
    let ops: Vec<&str> = mapped
        .analysis
        .operation_sequence
        .iter()
        .map(|&id| mapped.dfg.node(id).op_kind().expect("op node").symbol())
        .collect();
    progress(
        out,
        "map",
        format_args!(
            "operations [{}], operands [{}], {} load cycle(s), {} level(s)",
            ops.join(", "),
            mapped.analysis.operand_sequence.join(", "),
            mapped.load_cycles(),
            mapped.max_level()
        ),
    );

    let artifacts = generate(&spec, &mapped, config, out)?;

    std::fs::create_dir_all(out_dir).map_err(|source| PipelineError::Io {
        stage: "write",
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, text) in artifacts.files() {
        let path = out_dir.join(name);
        write_file(&path, &text)?;
        progress(out, "write", format_args!("{}", path.display()));
        written.push(path);
    }
    Ok(written)
}

/// Parses `a=2,b=-3`.
pub fn parse_inputs(text: &str) -> Result<Inputs, PipelineError> {
    let mut inputs = Inputs::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| PipelineError::Usage(format!("expected name=value, got `{item}`")))?;
        let value = parse_int(v.trim()).ok_or_else(|| PipelineError::Usage(format!("`{v}` is not an integer")))?;
        if inputs.insert(k.trim().to_string(), value).is_some() {
            return Err(PipelineError::Usage(format!("`{}` bound twice", k.trim())));
        }
    }
    Ok(inputs)
}

fn parse_int(s: &str) -> Option<i64> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let v = match digits.strip_prefix("0x").or_else(|| digits.strip_prefix("0X")) {
        Some(hex) => i64::from_str_radix(hex, 16).ok()?,
        None => digits.parse::<i64>().ok()?,
    };
    Some(if neg { -v } else { v })
}

/// Parses `1:5,3:2` into `(enabled cycle, disabled cycles)` pairs.
pub fn parse_gaps(text: &str) -> Result<Vec<(usize, usize)>, PipelineError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (at, len) = item
                .split_once(':')
                .ok_or_else(|| PipelineError::Usage(format!("expected cycle:length, got `{item}`")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| PipelineError::Usage(format!("`{s}` is not a cycle count")))
            };
            Ok((num(at)?, num(len)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs() {
        let i = parse_inputs("a=2, b=-3,c=0x10").unwrap();
        assert_eq!((i["a"], i["b"], i["c"]), (2, -3, 16));
        assert!(parse_inputs("a").is_err());
        assert!(parse_inputs("a=x").is_err());
        assert!(parse_inputs("a=1,a=2").is_err());
    }

    #[test]
    fn gaps() {
        assert_eq!(parse_gaps("1:5,3:2").unwrap(), [(1, 5), (3, 2)]);
        assert!(parse_gaps("1-5").is_err());
    }

    #[test]
    fn build_writes_nothing_on_parse_failure() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("bad.ci");
        std::fs::write(&spec, "ci f(opcode=7) { input a : signed<8>; output x : signed<8>; x = a; }").unwrap();
        let out = dir.path().join("out");
        let e = run_build(&spec, &out, &Config::default(), &mut Vec::new()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().starts_with("[parse]"));
        assert!(!out.exists());
    }
}
