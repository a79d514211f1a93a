use serde::Serialize;
use std::fmt;

pub const MAX_WIDTH: u32 = 64;

/// A fixed-width two's-complement bit pattern. Whether it reads as signed or
/// unsigned is decided by the consumer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BitVec {
    width: u32,
    bits: u64,
}

fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl BitVec {
    /// Keeps the low `width` bits of `bits`.
    pub fn new(width: u32, bits: u64) -> BitVec {
        assert!(
            (1..=MAX_WIDTH).contains(&width),
            "bit vector width {width} outside 1..={MAX_WIDTH}"
        );
        BitVec {
            width,
            bits: bits & mask(width),
        }
    }

    pub fn zero(width: u32) -> BitVec {
        BitVec::new(width, 0)
    }

    /// Two's-complement encoding of `value` reduced modulo 2^width.
    pub fn from_i128(width: u32, value: i128) -> BitVec {
        BitVec::new(width, value as u64)
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn msb(self) -> bool {
        self.bits >> (self.width - 1) & 1 == 1
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn to_unsigned(self) -> u64 {
        self.bits
    }

    pub fn to_signed(self) -> i64 {
        if self.width == 64 {
            return self.bits as i64;
        }
        if self.msb() {
            (self.bits | !mask(self.width)) as i64
        } else {
            self.bits as i64
        }
    }

    pub fn value(self, signed: bool) -> i128 {
        if signed {
            self.to_signed() as i128
        } else {
            self.to_unsigned() as i128
        }
    }

    /// Whether `value` fits in `width` bits under the given reading.
    pub fn fits(width: u32, signed: bool, value: i128) -> bool {
        if signed {
            let half = 1i128 << (width - 1);
            (-half..half).contains(&value)
        } else {
            (0..(1i128 << width)).contains(&value)
        }
    }

    pub fn truncate(self, width: u32) -> BitVec {
        assert!(width <= self.width, "truncate must not widen");
        BitVec::new(width, self.bits)
    }

    pub fn zero_extend(self, width: u32) -> BitVec {
        assert!(width >= self.width, "extend must not narrow");
        BitVec::new(width, self.bits)
    }

    pub fn sign_extend(self, width: u32) -> BitVec {
        assert!(width >= self.width, "extend must not narrow");
        BitVec::new(width, self.to_signed() as u64)
    }

    /// Extends per `signed`, or keeps the low bits when narrowing.
    pub fn resize(self, width: u32, signed: bool) -> BitVec {
        if width <= self.width {
            self.truncate(width)
        } else if signed {
            self.sign_extend(width)
        } else {
            self.zero_extend(width)
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}'h{:x}", self.width, self.bits)
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.width.div_ceil(4) as usize;
        write!(f, "0x{:0digits$x}", self.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readings() {
        let v = BitVec::new(8, 0xff);
        assert_eq!(v.to_unsigned(), 255);
        assert_eq!(v.to_signed(), -1);
        assert_eq!(BitVec::from_i128(8, -128).bits(), 0x80);
        assert_eq!(BitVec::from_i128(4, 17).bits(), 1);
        assert_eq!(BitVec::new(64, u64::MAX).to_signed(), -1);
    }

    #[test]
    fn fits_bounds() {
        assert!(BitVec::fits(8, true, -128));
        assert!(!BitVec::fits(8, true, 128));
        assert!(BitVec::fits(8, false, 255));
        assert!(!BitVec::fits(8, false, -1));
    }

    #[test]
    fn resize() {
        let v = BitVec::new(8, 0x80);
        assert_eq!(v.resize(16, true).bits(), 0xff80);
        assert_eq!(v.resize(16, false).bits(), 0x0080);
        assert_eq!(BitVec::new(16, 0x1234).resize(8, true).bits(), 0x34);
    }
}
