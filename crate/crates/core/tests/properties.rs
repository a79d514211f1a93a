mod common;

use cigen::config::Config;
use cigen::cpatch::{find_call_sites, rewrite, PatchError};
use cigen::frontend::{analyze, build_dfg, parse_ci_spec, CiSpec, ExprTree, NodeKind};
use cigen::hdl::{build_design, design_views, emit_vhdl, read_emitted, validate_structure};
use cigen::lpm::{
    add_sub_eval, concat_extend_eval, divide_eval, mult_eval, BitVec, ConcatGenerics, Direction, DivideGenerics,
    Extension, MultGenerics, Representation,
};
use cigen::mapper::{map_dfg, MappedDesign};
use cigen::metrics::{estimate_metrics, Energy, REPORT_SCHEMA};
use cigen::sim::{check_equivalence, eval_reference, random_vectors, simulate_ci, Inputs, Stimulus};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn compile(text: &str) -> (CiSpec, MappedDesign) {
    let spec = parse_ci_spec(text).unwrap();
    let mapped = map_dfg(&build_dfg(&spec));
    (spec, mapped)
}

fn vectors(spec: &CiSpec, n: usize, seed: u64) -> Vec<Inputs> {
    random_vectors(spec, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn arb_width() -> impl Strategy<Value = u32> {
    1u32..=32
}

fn value(v: i128, width: u32, signed: bool) -> i128 {
    BitVec::from_i128(width, v).value(signed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn extension_then_truncation_is_identity(w in arb_width(), to in 1u32..=32, signed: bool, bits: u64) {
        let to = w + to.min(64 - w);
        let v = BitVec::new(w, bits);
        let wide = v.resize(to, signed);
        prop_assert_eq!(wide.truncate(w), v);
        prop_assert_eq!(wide.value(signed), v.value(signed));
    }

    #[test]
    fn add_sub_wraps(w in arb_width(), a: u64, b: u64, sub: bool) {
        let (a, b) = (BitVec::new(w, a), BitVec::new(w, b));
        let dir = if sub { Direction::Sub } else { Direction::Add };
        let r = add_sub_eval(a, b, dir).unwrap();
        let exact = if sub { a.value(false) - b.value(false) } else { a.value(false) + b.value(false) };
        prop_assert_eq!(r.value(false), exact.rem_euclid(1i128 << w));
    }

    #[test]
    fn multiply_keeps_low_product_bits(wa in arb_width(), wb in arb_width(), signed: bool, a: u64, b: u64) {
        let g = MultGenerics::new(wa, wb, Representation::from_signed(signed));
        let (a, b) = (BitVec::new(wa, a), BitVec::new(wb, b));
        let p = mult_eval(a, b, &g).unwrap();
        prop_assert_eq!(p.width(), (wa + wb).min(32));
        prop_assert_eq!(p.value(signed), value(a.value(signed) * b.value(signed), g.width_p, signed));
    }

    #[test]
    fn division_identity(wn in arb_width(), wd in arb_width(), signed: bool, n: u64, d: u64) {
        let rep = Representation::from_signed(signed);
        let g = DivideGenerics { width_n: wn, width_d: wd, n_representation: rep, d_representation: rep };
        let (n, d) = (BitVec::new(wn, n), BitVec::new(wd, d));
        match divide_eval(n, d, &g) {
            Err(_) => prop_assert!(d.is_zero()),
            Ok((q, r)) => {
                let (nv, dv) = (n.value(signed), d.value(signed));
                prop_assert!(r.value(signed).abs() < dv.abs());
                prop_assert!(r.value(signed) == 0 || r.value(signed).signum() == nv.signum());
                prop_assert_eq!(q.value(signed), value(nv / dv, wn, signed));
            }
        }
    }

    #[test]
    fn adapters_preserve_value(from in 1u32..32, extra in 1u32..=32, signed: bool, bits: u64) {
        let g = ConcatGenerics { from_width: from, to_width: from + extra, extension: Extension::from_signed(signed) };
        let v = BitVec::new(from, bits);
        prop_assert_eq!(concat_extend_eval(v, &g).unwrap().value(signed), v.value(signed));
    }

    #[test]
    fn printed_expression_parses_back(text in common::arb_spec()) {
        let spec = parse_ci_spec(&text).unwrap();
        let decl = |d: &cigen::frontend::OperandDecl, dir: &str| format!("{dir} {} : {}<{}>;", d.name, d.signedness, d.width);
        let mut rebuilt = format!("ci {}(opcode={}) {{", spec.name, spec.opcode);
        for d in &spec.inputs {
            rebuilt += &decl(d, "input");
        }
        rebuilt += &decl(&spec.output, "output");
        rebuilt += &format!("{} = {}; }}", spec.output.name, spec.expr);
        prop_assert_eq!(parse_ci_spec(&rebuilt).unwrap(), spec);
    }

    #[test]
    fn operation_sequence_respects_dependencies(text in common::arb_spec()) {
        let dfg = build_dfg(&parse_ci_spec(&text).unwrap());
        let a = analyze(&dfg);
        let pos = |id| a.operation_sequence.iter().position(|&x| x == id);
        prop_assert_eq!(a.operation_sequence.len(), dfg.ops().count());
        for &id in &a.operation_sequence {
            if let NodeKind::Op { left, right, .. } = dfg.node(id).kind {
                for child in [left, right] {
                    if !dfg.node(child).is_leaf() {
                        prop_assert!(pos(child) < pos(id));
                    }
                }
            }
        }
        let levels: Vec<u32> = a.operation_sequence.iter().map(|&id| dfg.node(id).level).collect();
        prop_assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mapping_invariants(text in common::arb_spec()) {
        let (spec, mapped) = compile(&text);
        prop_assert_eq!(mapped.instances.len(), spec.expr.op_count());
        prop_assert!(mapped.adapters.iter().all(|a| a.to_width > a.from_width));
        for inst in &mapped.instances {
            prop_assert!(inst.generics.validate().is_ok(), "{:?}", inst.generics);
            prop_assert!(inst.tap_width() >= inst.width);
        }
        let k = spec.expr.identifiers().len();
        prop_assert_eq!(mapped.load_cycles(), k.div_ceil(2));
    }

    #[test]
    fn emitted_vhdl_is_structurally_sound(text in common::arb_spec()) {
        let (spec, mapped) = compile(&text);
        let design = build_design(&spec, &mapped);
        prop_assert_eq!(validate_structure(&design), vec![]);
        let vhdl = emit_vhdl(&design);
        prop_assert_eq!(read_emitted(&vhdl).unwrap(), design_views(&design));
        prop_assert_eq!(emit_vhdl(&build_design(&spec, &mapped)), vhdl);
    }

    #[test]
    fn shallow_specs_are_equivalent(text in common::arb_spec_with_depth(3), seed: u64) {
        let (spec, mapped) = compile(&text);
        let report = check_equivalence(&spec, &mapped, &vectors(&spec, 50, seed));
        prop_assert!(report.passed(), "{:?}", report.counterexample);
    }

    #[test]
    fn gating_never_changes_the_result(
        text in common::arb_spec_with_depth(4),
        seed: u64,
        gaps in prop::collection::vec((0usize..8, 1usize..8), 0..5),
    ) {
        let (spec, mapped) = compile(&text);
        let inputs = &vectors(&spec, 1, seed)[0];
        let plain = simulate_ci(&spec, &mapped, inputs, &Stimulus::default());
        let gated = simulate_ci(&spec, &mapped, inputs, &Stimulus { gaps, ..Stimulus::default() });
        match (plain, gated) {
            (Ok(p), Ok(g)) => {
                prop_assert_eq!(p.final_result, g.final_result);
                prop_assert_eq!(p.done_cycle, g.done_cycle);
                for w in g.records.windows(2) {
                    if !w[1].clk_en {
                        prop_assert_eq!(&w[0].registers, &w[1].registers);
                        prop_assert_eq!(w[0].result, w[1].result);
                    }
                }
            }
            (Err(p), Err(g)) => prop_assert_eq!(p, g),
            (p, g) => prop_assert!(false, "plain {:?} vs gated {:?}", p.map(|t| t.final_result), g.map(|t| t.final_result)),
        }
    }

    #[test]
    fn reset_clears_and_rerun_is_correct(text in common::arb_spec_with_depth(4), seed: u64, at in 0usize..6) {
        let (spec, mapped) = compile(&text);
        let inputs = &vectors(&spec, 1, seed)[0];
        let stim = Stimulus { resets: vec![at], ..Stimulus::default() };
        let reference = eval_reference(&spec, inputs);
        match simulate_ci(&spec, &mapped, inputs, &stim) {
            Ok(t) => {
                prop_assert_eq!(Ok(t.final_result), reference);
                if let Some(r) = t.records.get(at) {
                    prop_assert!(r.reset && !r.done && !r.busy && r.result == 0);
                    prop_assert!(r.registers.values().all(|&v| v == 0));
                }
            }
            Err(e) => prop_assert!(e.is_divide_by_zero() && reference.unwrap_err().is_divide_by_zero()),
        }
    }

    #[test]
    fn report_matches_schema(text in common::arb_spec(), power in 0.1f64..1000.0, time in 0.1f64..1000.0, with_energy: bool) {
        let (_, mapped) = compile(&text);
        let energy = with_energy.then(|| Energy::new(power, time).unwrap());
        let report = estimate_metrics(&mapped, &Config::default().costs, energy);
        let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        let validator = jsonschema::validator_for(&schema).unwrap();
        let instance: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
        prop_assert!(errors.is_empty(), "{:?}", errors);
        prop_assert!(report.speedup_estimate > 0.0);
        prop_assert_eq!(report.ci_cycles, mapped.done_cycle() + 1);
    }
}

/// Renders a tree as C with random redundant parentheses around subterms.
fn render_c(e: &ExprTree, parens: &mut impl Iterator<Item = bool>) -> String {
    let inner = match e {
        ExprTree::Leaf(n) => n.clone(),
        ExprTree::BinOp { kind, left, right } => {
            format!("({} {} {})", render_c(left, parens), kind.symbol(), render_c(right, parens))
        }
    };
    if parens.next().unwrap_or(false) {
        format!("({inner})")
    } else {
        inner
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn c_expression_matches_once_and_only_in_code(
        text in common::arb_spec_with_depth(4),
        parens in prop::collection::vec(any::<bool>(), 64),
    ) {
        let spec = parse_ci_spec(&text).unwrap();
        let c_compatible = !format!("{}", spec.expr).contains(" mod ") && spec.expr.op_count() > 0;
        let expr = render_c(&spec.expr, &mut parens.into_iter());
        let src = format!(
            "int f(void) {{\n  /* {expr} */\n  const char *s = \"{expr}\";\n  // {expr}\n  return {expr};\n}}\n"
        );
        let sites = find_call_sites(&src, &spec).unwrap();
        if c_compatible {
            prop_assert_eq!(sites.len(), 1);
            let patched = rewrite(&src, &spec).unwrap();
            let (comment, literal) = (format!("/* {expr} */"), format!("\"{expr}\""));
            prop_assert!(patched.contains(&comment));
            prop_assert!(patched.contains(&literal));
            prop_assert!(matches!(rewrite(&patched, &spec), Err(PatchError::NoMatchFound(_))));
        } else {
            prop_assert!(sites.is_empty());
        }
    }

    #[test]
    fn bytes_outside_matches_are_preserved(prefix in "[ a-z0-9;=\n]{0,40}", suffix in "[ a-z0-9;=\n]{0,40}") {
        let spec = parse_ci_spec(common::MAC).unwrap();
        let src = format!("{prefix};\nq = (a * b) + c;\n{suffix}");
        let sites = find_call_sites(&src, &spec).unwrap();
        prop_assume!(sites.len() == 1);
        let patched = rewrite(&src, &spec).unwrap();
        let include = "#include \"ci_f.h\"\n";
        prop_assert!(patched.starts_with(include));
        let body = &patched[include.len()..];
        let span = sites[0].span.clone();
        prop_assert_eq!(&body[..span.start], &src[..span.start]);
        prop_assert_eq!(&body[span.start + "CI_F(a, b, c)".len()..], &src[span.end..]);
    }
}
