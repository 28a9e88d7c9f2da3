//! Exact arithmetic in the cyclotomic field Q(ζ), ζ a primitive 12th root of
//! unity.
//!
//! Elements are stored in the power basis `c0 + c1·ζ + c2·ζ² + c3·ζ³` and
//! reduced modulo the cyclotomic polynomial `ζ⁴ − ζ² + 1`. The field holds
//! every root of unity the identities need: `−1 = ζ⁶`, `i = ζ³`,
//! `ζ₃ = ζ⁴ = ζ² − 1` and `ζ₆ = ζ²`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::parse::Cursor;

/// ζ^m for m = 0..11 in the power basis.
const ZETA_POWERS: [[i64; 4]; 12] = [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [-1, 0, 1, 0],
    [0, -1, 0, 1],
    [-1, 0, 0, 0],
    [0, -1, 0, 0],
    [0, 0, -1, 0],
    [0, 0, 0, -1],
    [1, 0, -1, 0],
    [0, 1, 0, -1],
];

/// An element of Q(ζ₁₂).
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    c: [BigRational; 4],
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for x in &self.c {
            x.numer().hash(state);
            x.denom().hash(state);
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn from_coords(c: [BigRational; 4]) -> Self {
        Scalar { c }
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar { c: [r, BigRational::zero(), BigRational::zero(), BigRational::zero()] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(n.into(), d.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// ζ₁₂^m, any integer m.
    pub fn zeta12_pow(m: i64) -> Self {
        let p = ZETA_POWERS[m.rem_euclid(12) as usize];
        Scalar { c: [rat(p[0]), rat(p[1]), rat(p[2]), rat(p[3])] }
    }

    pub fn zeta12() -> Self {
        Self::zeta12_pow(1)
    }

    /// Primitive n-th root of unity e^{2πi/n} for n dividing 12.
    pub fn root_of_unity(n: i64) -> Option<Self> {
        if n <= 0 || 12 % n != 0 {
            return None;
        }
        Some(Self::zeta12_pow(12 / n))
    }

    pub fn imag_unit() -> Self {
        Self::zeta12_pow(3)
    }

    /// i^n, period 4.
    pub fn unit_power(n: i64) -> Self {
        Self::zeta12_pow(3 * n.rem_euclid(4))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.is_rational()
    }

    pub fn is_minus_one(&self) -> bool {
        self.is_rational() && self.c[0] == -BigRational::one()
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then(|| &self.c[0])
    }

    /// Returns k when the value equals i^k (k in 0..4).
    pub fn as_unit_power(&self) -> Option<i64> {
        (0..4).find(|&k| *self == Self::unit_power(k))
    }

    /// Image under the Galois automorphism ζ ↦ ζ^k (k coprime to 12).
    pub fn galois(&self, k: i64) -> Self {
        let mut out = Scalar::zero();
        for (j, cj) in self.c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let p = ZETA_POWERS[(k * j as i64).rem_euclid(12) as usize];
            for (o, &pv) in out.c.iter_mut().zip(p.iter()) {
                if pv != 0 {
                    *o += cj * rat(pv);
                }
            }
        }
        out
    }

    /// Complex conjugation, ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(11)
    }

    pub fn norm(&self) -> BigRational {
        let n = self * &self.galois(5) * self.galois(7) * self.galois(11);
        debug_assert!(n.is_rational());
        n.c[0].clone()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(r.recip()));
        }
        let others = self.galois(5) * self.galois(7) * self.galois(11);
        let n = (self * &others).c[0].clone();
        Ok(others.scale(&n.recip()))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut out = self.clone();
        for x in out.c.iter_mut() {
            if !x.is_zero() {
                *x *= r;
            }
        }
        out
    }

    pub fn mul_int(&self, n: i128) -> Self {
        let r = BigRational::from_integer(BigInt::from(n));
        self.scale(&r)
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// A square root inside the field, when one is found among the simple
    /// shapes `r`, `r·i` (r a rational square) and `r·ζ^k`.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        for k in 0..12 {
            let rotated = self * &Scalar::zeta12_pow(-2 * k);
            if let Some(r) = rotated.as_rational() {
                if let Some(s) = rational_sqrt(r) {
                    return Some(Scalar::from_rational(s) * Scalar::zeta12_pow(k));
                }
            }
        }
        None
    }

    /// Multiplicative order if this is a root of unity.
    pub fn root_order(&self) -> Option<u32> {
        (1..=12).find(|&k| self.pow(k as i64).map(|p| p.is_one()).unwrap_or(false))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let v = parse_expr(&mut cur)?;
        cur.finish()?;
        Ok(v)
    }

    /// Whether the textual rendering needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        self.c.iter().filter(|x| !x.is_zero()).count() > 1
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

pub(crate) fn parse_expr(cur: &mut Cursor<'_>) -> Result<Scalar> {
    let mut acc = parse_term(cur)?;
    loop {
        if cur.eat('+') {
            acc += parse_term(cur)?;
        } else if cur.peek() == Some('-') {
            cur.eat('-');
            acc -= parse_term(cur)?;
        } else {
            return Ok(acc);
        }
    }
}

fn parse_term(cur: &mut Cursor<'_>) -> Result<Scalar> {
    let mut acc = parse_factor(cur)?;
    loop {
        if cur.eat('*') {
            acc = &acc * &parse_factor(cur)?;
        } else if cur.eat('/') {
            let rhs = parse_factor(cur)?;
            acc = acc.checked_div(&rhs).map_err(|_| cur.error("division by zero"))?;
        } else {
            return Ok(acc);
        }
    }
}

fn parse_factor(cur: &mut Cursor<'_>) -> Result<Scalar> {
    if cur.eat('-') {
        return Ok(-parse_factor(cur)?);
    }
    let base = parse_atom(cur)?;
    if cur.eat('^') {
        let e = cur.signed_i64()?;
        return base.pow(e).map_err(|_| cur.error("zero to a negative power"));
    }
    Ok(base)
}

fn parse_atom(cur: &mut Cursor<'_>) -> Result<Scalar> {
    if cur.eat('(') {
        let v = parse_expr(cur)?;
        cur.expect(')')?;
        return Ok(v);
    }
    if let Some(n) = cur.unsigned() {
        return Ok(Scalar::from_rational(BigRational::from_integer(n)));
    }
    let save = cur.pos;
    match cur.ident() {
        Some(name) => named_constant(name).ok_or_else(|| {
            cur.pos = save;
            cur.error(format!("unknown constant {name:?}"))
        }),
        None => Err(cur.error("expected scalar")),
    }
}

/// Named constants accepted in scalar literals.
pub fn named_constant(name: &str) -> Option<Scalar> {
    match name {
        "i" | "z4" => Some(Scalar::imag_unit()),
        "z12" => Some(Scalar::zeta12()),
        "z6" => Some(Scalar::zeta12_pow(2)),
        "z3" => Some(Scalar::zeta12_pow(4)),
        "z2" => Some(Scalar::from_int(-1)),
        _ => None,
    }
}

impl fmt::Display for Scalar {
    /// `c0+c1*z12+c2*z12^2+c3*z12^3`, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let neg = x.is_negative();
            let mag = x.abs();
            if neg {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let z = match j {
                0 => "",
                1 => "z12",
                2 => "z12^2",
                _ => "z12^3",
            };
            if j == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{z}")?;
            } else {
                write!(f, "{mag}*{z}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn mul_coords(a: &[BigRational; 4], b: &[BigRational; 4]) -> [BigRational; 4] {
    let a_rat = a[1..].iter().all(Zero::is_zero);
    let b_rat = b[1..].iter().all(Zero::is_zero);
    if a_rat {
        return [&b[0] * &a[0], &b[1] * &a[0], &b[2] * &a[0], &b[3] * &a[0]];
    }
    if b_rat {
        return [&a[0] * &b[0], &a[1] * &b[0], &a[2] * &b[0], &a[3] * &b[0]];
    }
    let mut p: [BigRational; 7] = Default::default();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            p[i + j] += ai * bj;
        }
    }
    // ζ⁶ = −1, ζ⁵ = ζ³ − ζ, ζ⁴ = ζ² − 1
    let [p0, p1, p2, p3, p4, p5, p6] = p;
    [p0 - &p6 - &p4, p1 - &p5, p2 + p4, p3 + p5]
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar { c: mul_coords(&self.c, &rhs.c) }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul<Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self * &rhs
    }
}

impl Mul<&Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        &self * rhs
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.c = mul_coords(&self.c, &rhs.c);
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (x, y) in self.c.iter_mut().zip(rhs.c.iter()) {
            if !y.is_zero() {
                *x += y;
            }
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (x, y) in self.c.iter_mut().zip(rhs.c.iter()) {
            if !y.is_zero() {
                *x -= y;
            }
        }
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(mut self) -> Scalar {
        for x in self.c.iter_mut() {
            if !x.is_zero() {
                *x = -x.clone();
            }
        }
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

/// Least common multiple helper used by grid alignment.
pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}
