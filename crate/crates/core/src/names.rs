//! Identifier rules shared by the DSL, the VHDL emitter and the C header.

/// VHDL-93 reserved words.
const VHDL_RESERVED: &[&str] = &[
    "abs", "access", "after", "alias", "all", "and", "architecture", "array", "assert",
    "attribute", "begin", "block", "body", "buffer", "bus", "case", "component",
    "configuration", "constant", "disconnect", "downto", "else", "elsif", "end", "entity",
    "exit", "file", "for", "function", "generate", "generic", "group", "guarded", "if",
    "impure", "in", "inertial", "inout", "is", "label", "library", "linkage", "literal",
    "loop", "map", "mod", "nand", "new", "next", "nor", "not", "null", "of", "on", "open",
    "or", "others", "out", "package", "port", "postponed", "procedure", "process", "pure",
    "range", "record", "register", "reject", "rem", "report", "return", "rol", "ror",
    "select", "severity", "signal", "shared", "sla", "sll", "sra", "srl", "subtype", "then",
    "to", "transport", "type", "unaffected", "units", "until", "use", "variable", "wait",
    "when", "while", "with", "xnor", "xor",
];

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch",
    "typedef", "union", "unsigned", "void", "volatile", "while", "_Bool", "_Complex",
    "_Imaginary",
];

/// Names the generated design claims for itself; an entity may not reuse them.
const RESERVED_DESIGN_NAMES: &[&str] = &[
    "clk", "clk_en", "reset", "start", "dataa", "datab", "done", "result", "busy", "step",
    "ieee", "lpm", "work", "std", "ci_concat_extend",
];

pub fn is_vhdl_reserved(name: &str) -> bool {
    let lower = name.to_ascii_lowercase();
    VHDL_RESERVED.contains(&lower.as_str())
}

pub fn is_c_keyword(name: &str) -> bool {
    C_KEYWORDS.contains(&name)
}

/// Checks the lexical VHDL basic-identifier rules: leading letter,
/// alphanumerics and single underscores, no trailing underscore.
pub fn vhdl_identifier_problem(name: &str) -> Option<&'static str> {
    let mut chars = name.chars();
    match chars.next() {
        None => return Some("empty identifier"),
        Some(c) if !c.is_ascii_alphabetic() => return Some("must start with a letter"),
        _ => {}
    }
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Some("only letters, digits and underscores are allowed");
    }
    if name.contains("__") {
        return Some("double underscore is not a legal VHDL identifier");
    }
    if name.ends_with('_') {
        return Some("trailing underscore is not a legal VHDL identifier");
    }
    if is_vhdl_reserved(name) {
        return Some("VHDL reserved word");
    }
    None
}

/// Operand names end up as `r_<name>` VHDL signals and as C macro parameters.
pub fn operand_name_problem(name: &str) -> Option<&'static str> {
    if let Some(p) = vhdl_identifier_problem(&format!("r_{name}")) {
        return Some(p);
    }
    if is_c_keyword(name) {
        return Some("C keyword");
    }
    None
}

/// The CI name becomes the VHDL entity name and, upper-cased, the C macro name.
pub fn entity_name_problem(name: &str) -> Option<&'static str> {
    if let Some(p) = vhdl_identifier_problem(name) {
        return Some(p);
    }
    let lower = name.to_ascii_lowercase();
    if RESERVED_DESIGN_NAMES.contains(&lower.as_str()) || lower.starts_with("lpm_") {
        return Some("name is used by the generated design");
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vhdl_rules() {
        assert_eq!(vhdl_identifier_problem("s_1"), None);
        assert!(vhdl_identifier_problem("a__b").is_some());
        assert!(vhdl_identifier_problem("a_").is_some());
        assert!(vhdl_identifier_problem("1a").is_some());
        assert!(vhdl_identifier_problem("Signal").is_some());
    }

    #[test]
    fn operand_and_entity_names() {
        assert_eq!(operand_name_problem("abs"), None);
        assert!(operand_name_problem("int").is_some());
        assert!(operand_name_problem("x_").is_some());
        assert!(entity_name_problem("begin").is_some());
        assert!(entity_name_problem("Result").is_some());
        assert!(entity_name_problem("lpm_mult").is_some());
        assert_eq!(entity_name_problem("scalaire"), None);
    }
}
