//! Arithmetic in GF(2^8) with the reduction polynomial x^8 + x^4 + x^3 + x + 1
//! (0x11B) and generator 0x03.
//!
//! Multiplication goes through log/antilog tables built once per process. A
//! full 256x256 product table is also kept so the hot encoding loops can grab
//! the row for a fixed multiplier and do one lookup per byte.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Sub};
use std::sync::LazyLock;

use crate::error::{Error, Result};

/// Reduction polynomial, including the x^8 term.
pub const POLYNOMIAL: u16 = 0x11B;
/// Generator used to build the log/antilog tables.
pub const GENERATOR: u8 = 0x03;

struct Tables {
    log: [u8; 256],
    // doubled so that exp[log a + log b] never needs a modulo
    exp: [u8; 512],
    inv: [u8; 256],
}

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut log = [0u8; 256];
    let mut exp = [0u8; 512];
    let mut val: u8 = 1;
    for i in 0..255 {
        exp[i] = val;
        log[val as usize] = i as u8;
        val = mul_slow(val, GENERATOR);
    }
    for i in 255..512 {
        exp[i] = exp[i - 255];
    }
    let mut inv = [0u8; 256];
    for a in 1..256usize {
        inv[a] = exp[255 - log[a] as usize];
    }
    Tables { log, exp, inv }
});

static PRODUCTS: LazyLock<Box<[[u8; 256]; 256]>> = LazyLock::new(|| {
    let mut table = Box::new([[0u8; 256]; 256]);
    for a in 0..256 {
        for b in 0..256 {
            table[a][b] = mul(a as u8, b as u8);
        }
    }
    table
});

/// Shift-and-add multiplication; only used to seed the tables.
const fn mul_slow(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= (POLYNOMIAL & 0xFF) as u8;
        }
        b >>= 1;
    }
    acc
}

#[inline]
pub fn add(a: u8, b: u8) -> u8 {
    a ^ b
}

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    let t = &*TABLES;
    t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
}

pub fn inv(a: u8) -> Result<u8> {
    if a == 0 {
        return Err(Error::ZeroInverse);
    }
    Ok(TABLES.inv[a as usize])
}

pub fn div(a: u8, b: u8) -> Result<u8> {
    Ok(mul(a, inv(b)?))
}

/// `base` raised to `exp`, with `0^0 == 1`.
pub fn pow(base: u8, exp: usize) -> u8 {
    if exp == 0 {
        return 1;
    }
    if base == 0 {
        return 0;
    }
    let t = &*TABLES;
    t.exp[(t.log[base as usize] as usize * exp) % 255]
}

/// Row of the product table: `mul_row(a)[b] == mul(a, b)`.
#[inline]
pub fn mul_row(a: u8) -> &'static [u8; 256] {
    &PRODUCTS[a as usize]
}

/// Evaluates `c_0 + c_1 x + ... + c_m x^m` with Horner's rule.
/// Coefficients are ordered constant term first.
pub fn horner_eval(coeffs: &[u8], x: u8) -> Result<u8> {
    let (last, rest) = coeffs.split_last().ok_or(Error::EmptyPolynomial)?;
    let row = mul_row(x);
    Ok(rest
        .iter()
        .rev()
        .fold(*last, |acc, &c| row[acc as usize] ^ c))
}

/// `dst[i] ^= mul(coeff, src[i])` over the common length.
pub fn mul_add_slice(dst: &mut [u8], src: &[u8], coeff: u8) {
    match coeff {
        0 => {}
        1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
        _ => {
            let row = mul_row(coeff);
            dst.iter_mut()
                .zip(src)
                .for_each(|(d, &s)| *d ^= row[s as usize]);
        }
    }
}

/// One element of GF(2^8).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn inv(self) -> Result<FieldElement> {
        inv(self.0).map(FieldElement)
    }

    pub fn pow(self, exp: usize) -> FieldElement {
        FieldElement(pow(self.0, exp))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl From<u8> for FieldElement {
    fn from(v: u8) -> Self {
        FieldElement(v)
    }
}

impl From<FieldElement> for u8 {
    fn from(v: FieldElement) -> Self {
        v.0
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        FieldElement(mul(self.0, rhs.0))
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: FieldElement) {
        self.0 = mul(self.0, rhs.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Carry-less multiplication followed by polynomial reduction, written
    // independently of the table path.
    fn peasant(a: u8, b: u8) -> u8 {
        let mut wide: u16 = 0;
        for bit in 0..8 {
            if b >> bit & 1 == 1 {
                wide ^= (a as u16) << bit;
            }
        }
        for bit in (8..16).rev() {
            if wide >> bit & 1 == 1 {
                wide ^= POLYNOMIAL << (bit - 8);
            }
        }
        wide as u8
    }

    #[test]
    fn add_examples() {
        assert_eq!(add(0x00, 0x57), 0x57);
        assert_eq!(add(0xA3, 0xA3), 0x00);
        assert_eq!(add(0x57, 0x83), 0xD4);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(mul(0x00, 0xFF), 0x00);
        assert_eq!(mul(0x01, 0xC2), 0xC2);
        assert_eq!(peasant(0x57, 0x13), 0xFE);
        assert_eq!(mul(0x57, 0x13), 0xFE);
    }

    #[test]
    fn mul_matches_peasant_everywhere() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(mul(a, b), peasant(a, b), "{a:#x} * {b:#x}");
                assert_eq!(mul(a, b), mul(b, a));
                assert_eq!(mul_row(a)[b as usize], mul(a, b));
            }
        }
    }

    #[test]
    fn generator_has_full_order() {
        let mut seen = std::collections::HashSet::new();
        let mut v = 1u8;
        for _ in 0..255 {
            assert!(seen.insert(v));
            v = peasant(v, GENERATOR);
        }
        assert_eq!(v, 1);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv(0x01).unwrap(), 0x01);
        let brute = (1..=255u8).find(|&b| peasant(0x02, b) == 1).unwrap();
        assert_eq!(brute, 0x8D);
        assert_eq!(inv(0x02).unwrap(), 0x8D);
        assert!(matches!(inv(0x00), Err(Error::ZeroInverse)));
    }

    #[test]
    fn every_nonzero_element_has_inverse() {
        for a in 1..=255u8 {
            assert_eq!(mul(a, inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn horner_examples() {
        assert_eq!(horner_eval(&[0x2A], 0x07).unwrap(), 0x2A);
        assert_eq!(horner_eval(&[0x00, 0x01], 0x09).unwrap(), 0x09);
        let expected = 0x11 ^ peasant(0x57, 0x02) ^ peasant(0x13, 0x04);
        assert_eq!(horner_eval(&[0x11, 0x57, 0x13], 0x02).unwrap(), expected);
        assert!(matches!(horner_eval(&[], 3), Err(Error::EmptyPolynomial)));
    }

    #[test]
    fn pow_and_div() {
        assert_eq!(pow(0, 0), 1);
        assert_eq!(pow(0, 3), 0);
        assert_eq!(pow(2, 8), 0x1B);
        assert_eq!(div(0xFE, 0x13).unwrap(), 0x57);
        let x = FieldElement(0x57) * FieldElement(0x13);
        assert_eq!(x, FieldElement(0xFE));
        assert_eq!(FieldElement(7) + FieldElement(7), FieldElement::ZERO);
    }

    proptest! {
        #[test]
        fn distributive(a: u8, b: u8, c: u8) {
            prop_assert_eq!(mul(a, b ^ c), mul(a, b) ^ mul(a, c));
            prop_assert_eq!(mul(a, mul(b, c)), mul(mul(a, b), c));
        }

        #[test]
        fn horner_matches_power_sum(coeffs in prop::collection::vec(any::<u8>(), 1..=17), x: u8) {
            let naive = coeffs
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &c)| acc ^ peasant(c, pow(x, i)));
            prop_assert_eq!(horner_eval(&coeffs, x).unwrap(), naive);
        }

        #[test]
        fn mul_add_slice_matches_scalar(src in prop::collection::vec(any::<u8>(), 0..64), coeff: u8) {
            let mut dst = vec![0x5Au8; src.len()];
            mul_add_slice(&mut dst, &src, coeff);
            for (d, s) in dst.iter().zip(&src) {
                prop_assert_eq!(*d, 0x5A ^ mul(coeff, *s));
            }
        }
    }
}
