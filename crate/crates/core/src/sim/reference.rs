use super::{Inputs, SimError};
use crate::frontend::{CiSpec, ExprTree, OpKind, Signedness};
use crate::lpm::BitVec;

/// Value of `v` reduced to `width` bits and read back with `signed`.
fn wrap(v: i128, width: u32, signed: bool) -> i128 {
    let m = 1i128 << width;
    let u = v.rem_euclid(m);
    if signed && u >= m / 2 {
        u - m
    } else {
        u
    }
}

/// Checks that every used operand is bound and representable, and that no
/// unknown name is bound.
pub fn check_inputs(spec: &CiSpec, inputs: &Inputs) -> Result<(), SimError> {
    for name in inputs.keys() {
        if spec.input(name).is_none() {
            return Err(SimError::UnknownInput(name.clone()));
        }
    }
    for decl in spec.used_inputs() {
        let &value = inputs
            .get(&decl.name)
            .ok_or_else(|| SimError::MissingInput(decl.name.clone()))?;
        if !BitVec::fits(decl.width, decl.signedness.is_signed(), value as i128) {
            return Err(SimError::InputOutOfRange {
                name: decl.name.clone(),
                value,
                width: decl.width,
                signedness: decl.signedness,
            });
        }
    }
    Ok(())
}

struct Val {
    v: i128,
    width: u32,
    signedness: Signedness,
}

fn eval(spec: &CiSpec, e: &ExprTree, inputs: &Inputs) -> Result<Val, SimError> {
    match e {
        ExprTree::Leaf(name) => {
            let decl = spec.input(name).expect("parser resolves every identifier");
            Ok(Val {
                v: inputs[name] as i128,
                width: decl.width,
                signedness: decl.signedness,
            })
        }
        ExprTree::BinOp { kind, left, right } => {
            let l = eval(spec, left, inputs)?;
            let r = eval(spec, right, inputs)?;
            let signedness = l.signedness.join(r.signedness);
            let (a, b) = (l.v, r.v);
            let (v, width) = match kind {
                OpKind::Add => (a + b, l.width.max(r.width)),
                OpKind::Sub => (a - b, l.width.max(r.width)),
                OpKind::Mul => (a * b, (l.width + r.width).min(32)),
                _ => {
                    if b == 0 {
                        return Err(SimError::DivideByZero {
                            site: e.to_string(),
                            cycle: None,
                        });
                    }
                    // Rust's `/` and `%` truncate toward zero.
                    let rem = a % b;
                    match kind {
                        OpKind::Divs | OpKind::Divu => (a / b, l.width),
                        OpKind::Rems | OpKind::Remu | OpKind::Modu => (rem, r.width),
                        OpKind::Mods if signedness.is_signed() && rem != 0 && (rem < 0) != (b < 0) => {
                            (rem + b, r.width)
                        }
                        _ => (rem, r.width),
                    }
                }
            };
            Ok(Val {
                v: wrap(v, width, signedness.is_signed()),
                width,
                signedness,
            })
        }
    }
}

/// Evaluates the instruction on plain integers: each operation's exact value
/// is reduced to its node width, the root is brought to the output
/// declaration, and the result is the 32-bit pattern on the result port.
pub fn eval_reference(spec: &CiSpec, inputs: &Inputs) -> Result<BitVec, SimError> {
    check_inputs(spec, inputs)?;
    let root = eval(spec, &spec.expr, inputs)?;
    let out = wrap(root.v, spec.output.width, spec.output.signedness.is_signed());
    Ok(BitVec::from_i128(32, out))
}
