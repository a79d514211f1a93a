//! Parameterized arithmetic modules: bit-exact behavior plus VHDL templates.
//!
//! Each [`ComponentKind`] has an `*_eval` function describing what the
//! hardware computes for a given set of generics, and a template in
//! [`render_instance`] producing its component declaration and instance.

mod bitvec;
pub(crate) mod template;

pub use bitvec::{BitVec, MAX_WIDTH};
pub use template::{component_declaration, component_name, render_instance, HdlFragment};

use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentKind {
    AddSub,
    ConcatExtend,
    Divide,
    Mult,
}

impl ComponentKind {
    pub fn label(self) -> &'static str {
        match self {
            ComponentKind::AddSub => "ADD_SUB",
            ComponentKind::ConcatExtend => "CONCAT_EXTEND",
            ComponentKind::Divide => "DIVIDE",
            ComponentKind::Mult => "MULT",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Add,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Signed,
    Unsigned,
}

impl Representation {
    pub fn from_signed(signed: bool) -> Representation {
        if signed {
            Representation::Signed
        } else {
            Representation::Unsigned
        }
    }

    pub fn is_signed(self) -> bool {
        self == Representation::Signed
    }

    pub fn vhdl(self) -> &'static str {
        match self {
            Representation::Signed => "SIGNED",
            Representation::Unsigned => "UNSIGNED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    Zero,
    Sign,
}

impl Extension {
    pub fn from_signed(signed: bool) -> Extension {
        if signed {
            Extension::Sign
        } else {
            Extension::Zero
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AddSubGenerics {
    pub width: u32,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultGenerics {
    pub width_a: u32,
    pub width_b: u32,
    pub width_p: u32,
    pub representation: Representation,
}

impl MultGenerics {
    /// Product width is capped at the 32-bit result port.
    pub fn new(width_a: u32, width_b: u32, representation: Representation) -> MultGenerics {
        MultGenerics {
            width_a,
            width_b,
            width_p: (width_a + width_b).min(32),
            representation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivideGenerics {
    pub width_n: u32,
    pub width_d: u32,
    pub n_representation: Representation,
    pub d_representation: Representation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConcatGenerics {
    pub from_width: u32,
    pub to_width: u32,
    pub extension: Extension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpmGenerics {
    AddSub(AddSubGenerics),
    Mult(MultGenerics),
    Divide(DivideGenerics),
    ConcatExtend(ConcatGenerics),
}

impl LpmGenerics {
    pub fn kind(&self) -> ComponentKind {
        match self {
            LpmGenerics::AddSub(_) => ComponentKind::AddSub,
            LpmGenerics::Mult(_) => ComponentKind::Mult,
            LpmGenerics::Divide(_) => ComponentKind::Divide,
            LpmGenerics::ConcatExtend(_) => ComponentKind::ConcatExtend,
        }
    }

    /// Width of the primary output (quotient for DIVIDE).
    pub fn output_width(&self) -> u32 {
        match self {
            LpmGenerics::AddSub(g) => g.width,
            LpmGenerics::Mult(g) => g.width_p,
            LpmGenerics::Divide(g) => g.width_n,
            LpmGenerics::ConcatExtend(g) => g.to_width,
        }
    }

    pub fn validate(&self) -> Result<(), LpmError> {
        let widths: Vec<u32> = match self {
            LpmGenerics::AddSub(g) => vec![g.width],
            LpmGenerics::Mult(g) => {
                if g.width_p != (g.width_a + g.width_b).min(32) {
                    return Err(LpmError::InvalidGenerics(format!(
                        "LPM_WIDTHP {} must be min(32, {} + {})",
                        g.width_p, g.width_a, g.width_b
                    )));
                }
                vec![g.width_a, g.width_b, g.width_p]
            }
            LpmGenerics::Divide(g) => vec![g.width_n, g.width_d],
            LpmGenerics::ConcatExtend(g) => {
                if g.to_width <= g.from_width {
                    return Err(LpmError::NotWidening {
                        from: g.from_width,
                        to: g.to_width,
                    });
                }
                vec![g.from_width, g.to_width]
            }
        };
        if widths.iter().any(|&w| w == 0 || w > MAX_WIDTH) {
            return Err(LpmError::InvalidGenerics(format!(
                "widths {widths:?} must lie in 1..={MAX_WIDTH}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpmError {
    #[error("operand width {found} does not match expected width {expected}")]
    WidthMismatch { expected: u32, found: u32 },
    #[error("division by zero")]
    DivideByZero,
    #[error("extension from {from} to {to} bits does not widen")]
    NotWidening { from: u32, to: u32 },
    #[error("invalid generics: {0}")]
    InvalidGenerics(String),
}

fn check_width(v: BitVec, expected: u32) -> Result<(), LpmError> {
    if v.width() == expected {
        Ok(())
    } else {
        Err(LpmError::WidthMismatch {
            expected,
            found: v.width(),
        })
    }
}

/// `(a ± b) mod 2^width`. Both inputs must already share one width.
pub fn add_sub_eval(a: BitVec, b: BitVec, direction: Direction) -> Result<BitVec, LpmError> {
    check_width(b, a.width())?;
    let bits = match direction {
        Direction::Add => a.bits().wrapping_add(b.bits()),
        Direction::Sub => a.bits().wrapping_sub(b.bits()),
    };
    Ok(BitVec::new(a.width(), bits))
}

/// Full product at `width_a + width_b`, reduced to the low `width_p` bits.
pub fn mult_eval(a: BitVec, b: BitVec, g: &MultGenerics) -> Result<BitVec, LpmError> {
    check_width(a, g.width_a)?;
    check_width(b, g.width_b)?;
    let signed = g.representation.is_signed();
    let product = a.value(signed) * b.value(signed);
    Ok(BitVec::from_i128(g.width_p, product))
}

/// Truncating division. The quotient has `width_n` bits and the remainder,
/// which takes the dividend's sign, has `width_d` bits.
pub fn divide_eval(n: BitVec, d: BitVec, g: &DivideGenerics) -> Result<(BitVec, BitVec), LpmError> {
    check_width(n, g.width_n)?;
    check_width(d, g.width_d)?;
    let nv = n.value(g.n_representation.is_signed());
    let dv = d.value(g.d_representation.is_signed());
    if dv == 0 {
        return Err(LpmError::DivideByZero);
    }
    // i128 holds every 64-bit quotient, including MIN / -1.
    let q = nv / dv;
    let r = nv % dv;
    Ok((BitVec::from_i128(g.width_n, q), BitVec::from_i128(g.width_d, r)))
}

/// Turns a dividend-signed remainder into a divisor-signed modulus:
/// `r + d` when `r` is nonzero and its sign differs from `d`'s.
pub fn mod_correct(remainder: BitVec, divisor: BitVec, representation: Representation) -> Result<BitVec, LpmError> {
    check_width(divisor, remainder.width())?;
    if !representation.is_signed() || remainder.is_zero() || remainder.msb() == divisor.msb() {
        return Ok(remainder);
    }
    add_sub_eval(remainder, divisor, Direction::Add)
}

pub fn concat_extend_eval(a: BitVec, g: &ConcatGenerics) -> Result<BitVec, LpmError> {
    if g.to_width <= g.from_width {
        return Err(LpmError::NotWidening {
            from: g.from_width,
            to: g.to_width,
        });
    }
    check_width(a, g.from_width)?;
    Ok(match g.extension {
        Extension::Zero => a.zero_extend(g.to_width),
        Extension::Sign => a.sign_extend(g.to_width),
    })
}
