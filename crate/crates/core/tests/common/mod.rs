//! Random instruction specs shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

pub const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "g"];
pub const WIDTHS: [u32; 4] = [4, 8, 16, 32];
pub const OPERATORS: [&str; 6] = ["+", "-", "*", "/", "%", "mod"];

#[derive(Debug, Clone)]
pub enum Tree {
    Leaf(usize),
    Op(&'static str, Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn render(&self) -> String {
        match self {
            Tree::Leaf(i) => NAMES[*i].to_string(),
            Tree::Op(op, l, r) => format!("({} {op} {})", l.render(), r.render()),
        }
    }

    pub fn used(&self, out: &mut [bool; 6]) {
        match self {
            Tree::Leaf(i) => out[*i] = true,
            Tree::Op(_, l, r) => {
                l.used(out);
                r.used(out);
            }
        }
    }
}

pub fn arb_tree(depth: u32) -> impl Strategy<Value = Tree> {
    let leaf = (0..NAMES.len()).prop_map(Tree::Leaf);
    leaf.prop_recursive(depth, 64, 2, |inner| {
        (prop::sample::select(&OPERATORS[..]), inner.clone(), inner)
            .prop_map(|(op, l, r)| Tree::Op(op, Box::new(l), Box::new(r)))
    })
}

fn arb_decl() -> impl Strategy<Value = (bool, u32)> {
    (any::<bool>(), prop::sample::select(&WIDTHS[..]))
}

/// A spec over up to six operands with widths in {4, 8, 16, 32}, mixed
/// signedness and expression depth at most `depth`.
pub fn arb_spec_with_depth(depth: u32) -> impl Strategy<Value = String> {
    (
        arb_tree(depth),
        prop::array::uniform6(arb_decl()),
        arb_decl(),
        0u32..=4,
    )
        .prop_map(|(tree, decls, out, opcode)| {
            let mut used = [false; 6];
            tree.used(&mut used);
            let sig = |s: bool| if s { "signed" } else { "unsigned" };
            let mut text = format!("ci fz(opcode={opcode}) {{\n");
            for (i, (s, w)) in decls.iter().enumerate() {
                if used[i] {
                    text += &format!("  input {} : {}<{w}>;\n", NAMES[i], sig(*s));
                }
            }
            text += &format!("  output x : {}<{}>;\n", sig(out.0), out.1);
            text += &format!("  x = {};\n}}\n", tree.render());
            text
        })
}

pub fn arb_spec() -> impl Strategy<Value = String> {
    arb_spec_with_depth(6)
}

/// A fixed, reproducible corpus of `n` specs.
pub fn corpus(n: usize) -> Vec<String> {
    let mut runner = TestRunner::deterministic();
    let strategy = arb_spec();
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy never rejects").current())
        .collect()
}

pub const MAC: &str = "ci f(opcode=0) {
  input a : signed<32>;
  input b : signed<32>;
  input c : signed<32>;
  output x : signed<32>;
  x = (a * b) + c;
}
";
