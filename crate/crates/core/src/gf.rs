//! Arithmetic in binary extension fields GF(2^m), 1 <= m <= 16.
//!
//! Elements use the polynomial-basis bit representation: bit `i` of a
//! [`Symbol`] is the coefficient of `x^i`. Addition is XOR. Multiplication
//! goes through log/antilog tables built once per field from a generator
//! found by search, so any irreducible reduction polynomial is accepted,
//! primitive or not.

use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};

/// Raw field symbol. Always `< 2^m` for the owning field.
pub type Symbol = u16;

pub const MAX_DEGREE: u32 = 16;

/// Primitive polynomials used when a caller only names the degree.
/// Index `m - 1`. Degree 8 is x^8 + x^4 + x^3 + x^2 + 1.
const DEFAULT_POLYS: [u32; 16] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

struct Tables {
    degree: u32,
    poly: u32,
    // exp has 2(q-1) entries so log a + log b never needs a modulo.
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

/// Descriptor of GF(2^m) with its reduction polynomial. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    tables: Arc<Tables>,
}

impl Field {
    /// Builds GF(2^degree) reduced modulo `poly` (bit `degree` must be set).
    pub fn new(degree: u32, poly: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return param(format!("field degree {degree} outside 1..={MAX_DEGREE}"));
        }
        if poly >> degree != 1 {
            return param(format!(
                "reduction polynomial {poly:#x} does not have degree {degree}"
            ));
        }
        if !is_irreducible(poly) {
            return param(format!("reduction polynomial {poly:#x} is reducible over GF(2)"));
        }

        let order = 1u32 << degree;
        let cycle = (order - 1) as usize;
        let generator = (1..order)
            .find(|&g| multiplicative_order(g, poly, degree) == cycle)
            .ok_or_else(|| Error::Internal(format!("no generator for poly {poly:#x}")))?;

        let mut exp = vec![0 as Symbol; 2 * cycle];
        let mut log = vec![0u32; order as usize];
        let mut x = 1u32;
        for i in 0..cycle {
            exp[i] = x as Symbol;
            exp[i + cycle] = x as Symbol;
            log[x as usize] = i as u32;
            x = mulmod(x, generator, poly, degree);
        }

        Ok(Self {
            tables: Arc::new(Tables { degree, poly, exp, log }),
        })
    }

    /// GF(2^degree) with the built-in primitive polynomial for that degree.
    pub fn with_degree(degree: u32) -> Result<Self> {
        match DEFAULT_POLYS.get(degree.wrapping_sub(1) as usize) {
            Some(&poly) => Self::new(degree, poly),
            None => param(format!("field degree {degree} outside 1..={MAX_DEGREE}")),
        }
    }

    pub fn gf2() -> Self {
        Self::with_degree(1).expect("GF(2) is valid")
    }

    /// GF(256) with x^8 + x^4 + x^3 + x^2 + 1.
    pub fn gf256() -> Self {
        Self::with_degree(8).expect("GF(256) is valid")
    }

    pub fn default_poly(degree: u32) -> Option<u32> {
        DEFAULT_POLYS.get(degree.wrapping_sub(1) as usize).copied()
    }

    pub fn degree(&self) -> u32 {
        self.tables.degree
    }

    pub fn poly(&self) -> u32 {
        self.tables.poly
    }

    /// Field order q = 2^m.
    pub fn order(&self) -> u32 {
        1 << self.tables.degree
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as u32) < self.order()
    }

    pub fn check(&self, a: Symbol) -> Result<Symbol> {
        if self.contains(a) {
            Ok(a)
        } else {
            param(format!("symbol {a} is not an element of GF(2^{})", self.degree()))
        }
    }

    /// Every element of the field, in increasing bit order.
    pub fn elements(&self) -> impl Iterator<Item = Symbol> {
        (0..self.order()).map(|v| v as Symbol)
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.tables;
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let t = &self.tables;
        let cycle = t.exp.len() / 2;
        Ok(t.exp[(cycle - t.log[a as usize] as usize) % cycle])
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Result<Symbol> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Symbol, e: u32) -> Symbol {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &self.tables;
        let cycle = (t.exp.len() / 2) as u64;
        t.exp[((t.log[a as usize] as u64 * e as u64) % cycle) as usize]
    }

    /// Sum of `u[i] * v[i]`. Slices must be the same length.
    pub fn dot(&self, u: &[Symbol], v: &[Symbol]) -> Symbol {
        debug_assert_eq!(u.len(), v.len());
        u.iter()
            .zip(v)
            .fold(0, |acc, (&a, &b)| acc ^ self.mul(a, b))
    }

    pub fn element(&self, value: Symbol) -> Result<FieldElement> {
        FieldElement::new(self, value)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.degree() == other.degree() && self.poly() == other.poly()
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; {:#x})", self.degree(), self.poly())
    }
}

/// A field symbol tagged with the field it belongs to.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Symbol,
}

impl FieldElement {
    pub fn new(field: &Field, value: Symbol) -> Result<Self> {
        field.check(value)?;
        Ok(Self {
            field: field.clone(),
            value,
        })
    }

    pub fn value(&self) -> Symbol {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            param(format!(
                "operands from different fields: {:?} and {:?}",
                self.field, other.field
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with_value(self.field.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with_value(self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with_value(self.field.inv(self.value)?))
    }

    fn with_value(&self, value: Symbol) -> Self {
        Self {
            field: self.field.clone(),
            value,
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}@{:?}", self.value, self.field)
    }
}

fn mulmod(mut a: u32, mut b: u32, poly: u32, degree: u32) -> u32 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 != 0 {
            a ^= poly;
        }
    }
    acc
}

fn multiplicative_order(g: u32, poly: u32, degree: u32) -> usize {
    let mut x = g;
    let mut order = 1;
    while x != 1 {
        x = mulmod(x, g, poly, degree);
        order += 1;
        if order > (1usize << degree) {
            return 0;
        }
    }
    order
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: u32) -> bool {
    if poly < 2 {
        return false;
    }
    let deg = poly_degree(poly);
    (2u32..(1 << (deg / 2 + 1))).all(|divisor| poly_rem(poly, divisor) != 0)
}
