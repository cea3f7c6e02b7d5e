//! Arithmetic over GF(2^m) with the polynomial basis and primitive element α = 2.
//!
//! Elements are stored as their polynomial-basis bit patterns, so bit `c` of an
//! element's value is the coefficient of α^c. Multiplication goes through
//! log/antilog tables built once per field.

use std::fmt;

use crate::error::{Error, Result};

/// Element of GF(2^m), stored as its polynomial-basis representation.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// Conventional primitive polynomial for degree `m`.
pub fn default_primitive_poly(m: u32) -> Option<u32> {
    let poly = match m {
        2 => 0b111,
        3 => 0b1011,
        4 => 0b1_0011,
        5 => 0b10_0101,
        6 => 0b100_0011,
        7 => 0b1000_1001,
        8 => 0b1_0001_1101,
        9 => 0b10_0001_0001,
        10 => 0b100_0000_1001,
        11 => 0b1000_0000_0101,
        12 => 0b1_0000_0101_0011,
        _ => return None,
    };
    Some(poly)
}

/// A binary extension field GF(2^m).
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    m: u32,
    primitive_poly: u32,
    /// `antilog[i] = α^i` for `i` in `0..2*(2^m - 1)`; doubled to skip a modulo in `mul`.
    antilog: Vec<u16>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("m", &self.m)
            .field("primitive_poly", &format_args!("{:#x}", self.primitive_poly))
            .finish()
    }
}

impl Field {
    /// Builds the log/antilog tables for GF(2^m) defined by `primitive_poly`.
    ///
    /// Fails with [`Error::NonPrimitivePolynomial`] when α = 2 does not generate
    /// the full multiplicative group.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=12).contains(&m) {
            return Err(Error::UnsupportedDegree(m));
        }
        if primitive_poly >> m != 1 {
            return Err(Error::PolynomialDegree { poly: primitive_poly, m });
        }
        let size = 1usize << m;
        let order = size - 1;
        let mut antilog = vec![0u16; 2 * order];
        let mut log = vec![0u16; size];
        let mut x: u32 = 1;
        for i in 0..order {
            if i > 0 && x == 1 {
                return Err(Error::NonPrimitivePolynomial { poly: primitive_poly, order: i as u32 });
            }
            antilog[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            // The sequence never returned to 1, so the polynomial is reducible.
            return Err(Error::NonPrimitivePolynomial { poly: primitive_poly, order: 0 });
        }
        let (lo, hi) = antilog.split_at_mut(order);
        hi.copy_from_slice(lo);
        Ok(Field { m, primitive_poly, antilog, log })
    }

    /// Field with the conventional primitive polynomial for `m`.
    pub fn with_default_poly(m: u32) -> Result<Self> {
        let poly = default_primitive_poly(m).ok_or(Error::UnsupportedDegree(m))?;
        Field::new(m, poly)
    }

    /// Bits per symbol.
    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Number of field elements, 2^m.
    #[inline]
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Order of the multiplicative group, 2^m - 1.
    #[inline]
    pub fn order(&self) -> usize {
        (1 << self.m) - 1
    }

    /// Element from a raw value, `None` if it does not fit in m bits.
    pub fn element(&self, value: u16) -> Option<FieldElement> {
        ((value as usize) < self.size()).then_some(FieldElement(value))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let idx = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.antilog[idx])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a.0 as usize] as usize;
        Ok(FieldElement(self.antilog[(self.order() - l) % self.order()]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// α^e for any (possibly negative) exponent.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> FieldElement {
        let n = self.order() as i64;
        FieldElement(self.antilog[e.rem_euclid(n) as usize])
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.antilog[((l * e) % self.order() as u64) as usize])
    }

    /// Discrete logarithm base α; `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize] as u32)
    }

    /// Evaluates `poly` (lowest degree first) at `x` by Horner's rule.
    pub fn poly_eval(&self, poly: &Poly, x: FieldElement) -> FieldElement {
        poly.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| self.mul(acc, x) + c)
    }
}

/// Polynomial over GF(2^m), coefficients lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![FieldElement::ONE] }
    }

    /// Builds a polynomial, stripping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += field.mul(a, b);
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, field: &Field, s: FieldElement) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| field.mul(c, s)).collect())
    }

    /// Formal derivative; in characteristic 2 only odd-degree terms survive.
    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| if i % 2 == 1 { c } else { FieldElement::ZERO })
                .collect(),
        )
    }

    /// Keeps terms of degree below `n`.
    pub fn truncate(&self, n: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(n).copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gf16_has_alpha_of_order_15() {
        let f = Field::new(4, 0b1_0011).unwrap();
        assert_eq!(f.size(), 16);
        let mut x = FieldElement::ONE;
        for i in 1..=15 {
            x = f.mul(x, FieldElement(2));
            assert_eq!(x == FieldElement::ONE, i == 15);
        }
    }

    #[test]
    fn gf32_for_31_25_code() {
        let f = Field::new(5, 0b10_0101).unwrap();
        assert_eq!(f.size(), 32);
        assert_eq!(f.order(), 31);
    }

    #[test]
    fn all_ones_quartic_is_not_primitive() {
        // x^4+x^3+x^2+x+1 divides x^5 - 1, so α = 2 has order 5.
        let mut x = 1u32;
        let mut order = 0;
        loop {
            x <<= 1;
            if x & 0x10 != 0 {
                x ^= 0b1_1111;
            }
            order += 1;
            if x == 1 {
                break;
            }
        }
        assert_eq!(order, 5);
        assert_eq!(
            Field::new(4, 0b1_1111),
            Err(Error::NonPrimitivePolynomial { poly: 0b1_1111, order: 5 })
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(1, 0b11), Err(Error::UnsupportedDegree(1)));
        assert!(matches!(Field::new(4, 0b1011), Err(Error::PolynomialDegree { .. })));
        // x^4 + 1 = (x+1)^4 is reducible.
        assert!(matches!(Field::new(4, 0b1_0001), Err(Error::NonPrimitivePolynomial { .. })));
    }

    #[test]
    fn default_polys_are_primitive() {
        for m in 2..=12 {
            Field::with_default_poly(m).unwrap();
        }
    }

    #[test]
    fn gf16_known_products() {
        let f = Field::new(4, 0b1_0011).unwrap();
        // α·α³ = α⁴ = α + 1
        assert_eq!(f.mul(FieldElement(2), FieldElement(8)), FieldElement(3));
        for a in 0..16 {
            assert_eq!(f.mul(FieldElement(a), FieldElement::ZERO), FieldElement::ZERO);
        }
    }

    #[test]
    fn inverse_of_one_and_zero() {
        for m in 2..=12 {
            let f = Field::with_default_poly(m).unwrap();
            assert_eq!(f.inv(FieldElement::ONE), Ok(FieldElement::ONE));
            assert_eq!(f.inv(FieldElement::ZERO), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn exhaustive_inverses_up_to_m8() {
        for m in 2..=8 {
            let f = Field::with_default_poly(m).unwrap();
            for a in 1..f.size() as u16 {
                let a = FieldElement(a);
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn random_field_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [4, 5, 8, 12] {
            let f = Field::with_default_poly(m).unwrap();
            for _ in 0..10_000 {
                let mut draw = || FieldElement(rng.random_range(0..f.size() as u16));
                let (a, b, c) = (draw(), draw(), draw());
                assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
                assert_eq!((a + b) + c, a + (b + c));
            }
        }
    }

    #[test]
    fn zero_poly_evaluates_to_zero() {
        let f = Field::with_default_poly(5).unwrap();
        for x in 0..32 {
            assert_eq!(f.poly_eval(&Poly::zero(), FieldElement(x)), FieldElement::ZERO);
        }
        assert_eq!(Poly::new(vec![FieldElement::ZERO; 4]), Poly::zero());
    }

    #[test]
    fn poly_eval_matches_expansion() {
        let f = Field::with_default_poly(4).unwrap();
        // (x + α)(x + α²) has roots α and α².
        let p = Poly::new(vec![f.alpha_pow(1), FieldElement::ONE])
            .mul(&f, &Poly::new(vec![f.alpha_pow(2), FieldElement::ONE]));
        assert_eq!(p.degree(), Some(2));
        assert!(f.poly_eval(&p, f.alpha_pow(1)).is_zero());
        assert!(f.poly_eval(&p, f.alpha_pow(2)).is_zero());
        assert!(!f.poly_eval(&p, f.alpha_pow(3)).is_zero());
    }
}
