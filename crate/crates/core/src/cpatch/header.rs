use crate::frontend::{analyze, build_dfg, CiSpec};
use crate::mapper::plan_loading;

/// Nios II GCC builtin taking an opcode and two `int` operands and returning `int`.
pub const DEFAULT_INTRINSIC: &str = "__builtin_custom_inii";

pub fn header_file_name(spec: &CiSpec) -> String {
    format!("ci_{}.h", spec.name)
}

pub fn macro_name(spec: &CiSpec) -> String {
    format!("CI_{}", spec.name.to_ascii_uppercase())
}

/// Header declaring `CI_<NAME>(...)`. With more than two operands, one call
/// per load cycle delivers operand pairs and only the last call's value is
/// kept.
pub fn emit_header(spec: &CiSpec, intrinsic: &str) -> String {
    let name = macro_name(spec);
    let guard = format!("{name}_H");
    let opcode = format!("{name}_OPCODE");
    let analysis = analyze(&build_dfg(spec));
    let params = analysis.operand_sequence.join(", ");
    let loading = plan_loading(&analysis).expect("the grammar guarantees at least one operand");
    let unsigned = !spec.output.signedness.is_signed();

    let calls: Vec<String> = loading
        .cycles
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let b = b.as_ref().map_or("0".to_string(), |b| format!("({b})"));
            let call = format!("{intrinsic}({opcode}, ({a}), {b})");
            if i + 1 < loading.cycle_count() {
                format!("(void){call}")
            } else if unsigned {
                format!("(unsigned int){call}")
            } else {
                call
            }
        })
        .collect();

    let mut out = String::new();
    out.push_str("/* Generated by cigen. Do not edit. */\n");
    out.push_str(&format!("#ifndef {guard}\n#define {guard}\n\n"));
    out.push_str(&format!("#define {opcode} {}\n\n", spec.opcode));
    out.push_str(&format!("/* {} = {} */\n", spec.output.name, spec.expr));
    if calls.len() == 1 {
        out.push_str(&format!("#define {name}({params}) \\\n  ({})\n", calls[0]));
    } else {
        out.push_str(&format!(
            "#define {name}({params}) \\\n  ({})\n",
            calls.join(", \\\n   ")
        ));
    }
    out.push_str(&format!("\n#endif /* {guard} */\n"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_ci_spec;

    #[test]
    fn two_operands_single_call() {
        let spec = parse_ci_spec("ci g(opcode=2) { input a : unsigned<8>; input b : unsigned<8>; output y : unsigned<16>; y = a * b; }").unwrap();
        let h = emit_header(&spec, DEFAULT_INTRINSIC);
        assert!(h.contains("#define CI_G(a, b) \\\n  ((unsigned int)__builtin_custom_inii(CI_G_OPCODE, (a), (b)))\n"), "{h}");
        assert_eq!(h, emit_header(&spec, DEFAULT_INTRINSIC));
    }

    #[test]
    fn three_operands_two_calls() {
        let spec = parse_ci_spec("ci f(opcode=0) { input a : signed<32>; input b : signed<32>; input c : signed<32>; output x : signed<32>; x = a * b + c; }").unwrap();
        let h = emit_header(&spec, "custom");
        assert_eq!(h.matches("custom(CI_F_OPCODE").count(), 2);
        assert!(h.contains("(void)custom(CI_F_OPCODE, (a), (b))"));
        assert!(h.contains("custom(CI_F_OPCODE, (c), 0))"));
        assert!(h.starts_with("/* Generated by cigen. Do not edit. */\n#ifndef CI_F_H\n#define CI_F_H\n"));
    }
}
