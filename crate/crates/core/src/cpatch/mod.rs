//! C glue: a header exposing the instruction as a macro, and a rewriter that
//! replaces matching expressions in C source with calls to it.

mod header;
mod lexer;
mod matcher;

pub use header::{emit_header, header_file_name, macro_name, DEFAULT_INTRINSIC};
pub use lexer::{lex, LexError};
pub use matcher::{find_call_sites, CallSite};

use crate::frontend::CiSpec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatchError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("no expression matching `{0}` found")]
    NoMatchFound(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchPlan {
    pub sites: Vec<CallSite>,
    pub replacement: String,
    /// `(byte offset, text)` of the include line, absent if already present.
    pub include: Option<(usize, String)>,
}

/// `CI_<NAME>(a, b, c)` with operands in first-appearance order.
pub fn call_text(spec: &CiSpec) -> String {
    format!("{}({})", macro_name(spec), spec.expr.identifiers().join(", "))
}

pub fn plan_patch(src: &str, spec: &CiSpec) -> Result<PatchPlan, PatchError> {
    let sites = find_call_sites(src, spec)?;
    if sites.is_empty() {
        return Err(PatchError::NoMatchFound(spec.expr.to_string()));
    }
    let header = header_file_name(spec);
    let lexed = lex(src)?;
    let is_include = |text: &str| {
        text.strip_prefix('#')
            .map(|r| r.trim_start().starts_with("include"))
            .unwrap_or(false)
    };
    let already = lexed.directives.iter().any(|d| {
        let text = &src[d.span.clone()];
        is_include(text) && text.contains(&format!("\"{header}\""))
    });
    let newline = if src.contains("\r\n") { "\r\n" } else { "\n" };
    let include = (!already).then(|| {
        let line = format!("#include \"{header}\"");
        match lexed.directives.iter().rev().find(|d| is_include(&src[d.span.clone()])) {
            Some(d) if d.span.end < src.len() => {
                // Directive spans stop before the line break.
                let at = d.span.end + if src[d.span.end..].starts_with("\r\n") { 2 } else { 1 };
                (at, format!("{line}{newline}"))
            }
            Some(d) => (d.span.end, format!("{newline}{line}{newline}")),
            None => (0, format!("{line}{newline}")),
        }
    });
    Ok(PatchPlan {
        sites,
        replacement: call_text(spec),
        include,
    })
}

impl PatchPlan {
    pub fn apply(&self, src: &str) -> String {
        let mut edits: Vec<(std::ops::Range<usize>, &str)> = self
            .sites
            .iter()
            .map(|s| (s.span.clone(), self.replacement.as_str()))
            .collect();
        if let Some((at, text)) = &self.include {
            edits.push((*at..*at, text.as_str()));
        }
        edits.sort_by_key(|(r, _)| (r.start, r.end));
        let mut out = String::with_capacity(src.len() + 64);
        let mut pos = 0;
        for (r, text) in edits {
            out.push_str(&src[pos..r.start]);
            out.push_str(text);
            pos = r.end;
        }
        out.push_str(&src[pos..]);
        out
    }
}

/// Replaces every matching expression and inserts the header include once.
pub fn rewrite(src: &str, spec: &CiSpec) -> Result<String, PatchError> {
    Ok(plan_patch(src, spec)?.apply(src))
}
