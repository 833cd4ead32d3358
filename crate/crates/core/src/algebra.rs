//! Exact arithmetic for GF(4) and for residues modulo a positive integer.
//!
//! GF(4) = {0, 1, x, x^2} with x^2 = x + 1. Elements are stored in a 2-bit
//! encoding (0 -> 00, 1 -> 01, x -> 10, x^2 -> 11) so that addition is XOR and
//! the additive group is visibly the Klein four-group. The same encoding is
//! used as the layer index of a vertex when a block is labelled by GF(4).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf4(u8);

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0b00);
    pub const ONE: Gf4 = Gf4(0b01);
    pub const X: Gf4 = Gf4(0b10);
    pub const X2: Gf4 = Gf4(0b11);

    /// All elements in encoding order.
    pub const ALL: [Gf4; 4] = [Gf4::ZERO, Gf4::ONE, Gf4::X, Gf4::X2];

    pub fn from_bits(bits: u8) -> Option<Gf4> {
        (bits < 4).then_some(Gf4(bits))
    }

    /// The 2-bit encoding, which doubles as the layer index.
    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `x^i`; the multiplicative group has order 3.
    pub fn pow_x(i: usize) -> Gf4 {
        match i % 3 {
            0 => Gf4::ONE,
            1 => Gf4::X,
            _ => Gf4::X2,
        }
    }

    // Discrete log base x of a nonzero element.
    fn log_x(self) -> Option<usize> {
        match self.0 {
            0b01 => Some(0),
            0b10 => Some(1),
            0b11 => Some(2),
            _ => None,
        }
    }
}

impl Add for Gf4 {
    type Output = Gf4;

    fn add(self, rhs: Gf4) -> Gf4 {
        Gf4(self.0 ^ rhs.0)
    }
}

impl Mul for Gf4 {
    type Output = Gf4;

    fn mul(self, rhs: Gf4) -> Gf4 {
        match (self.log_x(), rhs.log_x()) {
            (Some(a), Some(b)) => Gf4::pow_x(a + b),
            _ => Gf4::ZERO,
        }
    }
}

impl fmt::Display for Gf4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "0",
            1 => "1",
            2 => "x",
            _ => "x2",
        };
        f.write_str(s)
    }
}

/// Reduces `value` into `[0, modulus)`.
pub fn modulo(value: i64, modulus: usize) -> usize {
    assert!(modulus > 0, "modulus must be positive");
    value.rem_euclid(modulus as i64) as usize
}

/// An element of Z_n, always normalized into `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: usize,
    modulus: usize,
}

impl Residue {
    pub fn new(value: i64, modulus: usize) -> Residue {
        Residue {
            value: modulo(value, modulus),
            modulus,
        }
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn modulus(self) -> usize {
        self.modulus
    }

    fn check(self, other: Residue) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
    }
}

impl Add for Residue {
    type Output = Residue;

    fn add(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue::new((self.value + rhs.value) as i64, self.modulus)
    }
}

impl Sub for Residue {
    type Output = Residue;

    fn sub(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue::new(self.value as i64 - rhs.value as i64, self.modulus)
    }
}

impl Neg for Residue {
    type Output = Residue;

    fn neg(self) -> Residue {
        Residue::new(-(self.value as i64), self.modulus)
    }
}

impl Mul for Residue {
    type Output = Residue;

    fn mul(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue::new(((self.value * rhs.value) % self.modulus) as i64, self.modulus)
    }
}
