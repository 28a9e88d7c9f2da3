//! Monomials `c·q^e`, optionally carrying integer powers of named parameters.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::parse::Cursor;
use crate::qseries::render_q_power;
use crate::ring::{named_constant, Scalar};
use crate::Exponent;

/// `coeff·q^qexp`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: Scalar,
    pub qexp: Exponent,
}

/// `coeff·q^qexp·∏ name^power`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamMonomial {
    pub coeff: Scalar,
    pub qexp: Exponent,
    pub params: BTreeMap<String, i64>,
}

impl Monomial {
    pub fn new(coeff: Scalar, qexp: Exponent) -> Self {
        Monomial { coeff, qexp }
    }

    pub fn q_pow(e: Exponent) -> Self {
        Monomial { coeff: Scalar::one(), qexp: e }
    }

    pub fn one() -> Self {
        Self::q_pow(Exponent::zero())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { coeff: &self.coeff * &other.coeff, qexp: self.qexp + other.qexp }
    }

    pub fn pow(&self, n: i64) -> Result<Monomial> {
        Ok(Monomial { coeff: self.coeff.pow(n)?, qexp: self.qexp * Exponent::from_integer(n) })
    }

    pub fn inv(&self) -> Result<Monomial> {
        self.pow(-1)
    }

    pub fn parse(s: &str) -> Result<Monomial> {
        ParamMonomial::parse(s)?.into_plain().ok_or_else(|| Error::parse("parameters not allowed here", s, 0))
    }
}

impl ParamMonomial {
    pub fn constant(coeff: Scalar) -> Self {
        ParamMonomial { coeff, qexp: Exponent::zero(), params: BTreeMap::new() }
    }

    pub fn from_plain(m: &Monomial) -> Self {
        ParamMonomial { coeff: m.coeff.clone(), qexp: m.qexp, params: BTreeMap::new() }
    }

    pub fn into_plain(self) -> Option<Monomial> {
        self.params.is_empty().then_some(Monomial { coeff: self.coeff, qexp: self.qexp })
    }

    pub fn mul(&self, other: &ParamMonomial) -> ParamMonomial {
        let mut params = self.params.clone();
        for (k, v) in &other.params {
            *params.entry(k.clone()).or_insert(0) += v;
        }
        params.retain(|_, v| *v != 0);
        ParamMonomial { coeff: &self.coeff * &other.coeff, qexp: self.qexp + other.qexp, params }
    }

    pub fn pow(&self, n: i64) -> Result<ParamMonomial> {
        let mut params = self.params.clone();
        for v in params.values_mut() {
            *v *= n;
        }
        params.retain(|_, v| *v != 0);
        Ok(ParamMonomial { coeff: self.coeff.pow(n)?, qexp: self.qexp * Exponent::from_integer(n), params })
    }

    /// Replaces every parameter by the assigned monomial.
    pub fn substitute(&self, assign: &HashMap<String, Monomial>) -> Result<Monomial> {
        let mut out = Monomial { coeff: self.coeff.clone(), qexp: self.qexp };
        for (name, &p) in &self.params {
            let m = assign
                .get(name)
                .ok_or_else(|| Error::InvalidSpec(format!("no value assigned to parameter {name:?}")))?;
            out = out.mul(&m.pow(p)?);
        }
        Ok(out)
    }

    pub fn parse(s: &str) -> Result<ParamMonomial> {
        let mut cur = Cursor::new(s);
        let m = parse_term(&mut cur)?;
        cur.finish()?;
        Ok(m)
    }
}

fn is_reserved(name: &str) -> bool {
    name == "q" || named_constant(name).is_some()
}

/// `factor (('*' | '/') factor)*` where a factor is a number, a named
/// constant, `q`, a parameter name or a parenthesized scalar, optionally raised
/// to a power.
pub(crate) fn parse_term(cur: &mut Cursor<'_>) -> Result<ParamMonomial> {
    let mut acc = parse_factor(cur)?;
    loop {
        if cur.eat('*') {
            acc = acc.mul(&parse_factor(cur)?);
        } else if cur.peek() == Some('/') {
            cur.eat('/');
            let rhs = parse_factor(cur)?;
            if rhs.coeff.is_zero() {
                return Err(cur.error("division by zero"));
            }
            acc = acc.mul(&rhs.pow(-1)?);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_factor(cur: &mut Cursor<'_>) -> Result<ParamMonomial> {
    if cur.eat('-') {
        let mut f = parse_factor(cur)?;
        f.coeff = -f.coeff;
        return Ok(f);
    }
    if cur.eat('(') {
        let v = crate::ring::parse_expr(cur)?;
        cur.expect(')')?;
        return int_power(cur, ParamMonomial::constant(v));
    }
    if let Some(n) = cur.unsigned() {
        let v = Scalar::from_rational(BigRational::from_integer(n));
        return int_power(cur, ParamMonomial::constant(v));
    }
    let save = cur.pos;
    let Some(name) = cur.ident() else {
        return Err(cur.error("expected monomial factor"));
    };
    if name == "q" {
        let e = if cur.eat('^') { cur.exponent()? } else { Exponent::one() };
        return Ok(ParamMonomial { coeff: Scalar::one(), qexp: e, params: BTreeMap::new() });
    }
    if let Some(c) = named_constant(name) {
        return int_power(cur, ParamMonomial::constant(c));
    }
    if name.len() > 16 {
        cur.pos = save;
        return Err(cur.error("parameter name too long"));
    }
    let mut params = BTreeMap::new();
    params.insert(name.to_string(), 1);
    int_power(cur, ParamMonomial { coeff: Scalar::one(), qexp: Exponent::zero(), params })
}

fn int_power(cur: &mut Cursor<'_>, base: ParamMonomial) -> Result<ParamMonomial> {
    if cur.eat('^') {
        let n = cur.signed_i64()?;
        if base.coeff.is_zero() && n < 0 {
            return Err(cur.error("zero to a negative power"));
        }
        return base.pow(n);
    }
    Ok(base)
}

impl fmt::Display for ParamMonomial {
    /// `-2*u*v^-1*q^(1/2)`; unit coefficients and zero exponents are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let (neg, mag) = match self.coeff.as_rational() {
            Some(r) if r.is_negative() => (true, Scalar::from_rational(-r.clone())),
            _ => (false, self.coeff.clone()),
        };
        if !mag.is_one() {
            parts.push(if mag.is_compound() { format!("({mag})") } else { mag.to_string() });
        }
        for (name, &p) in &self.params {
            debug_assert!(!is_reserved(name));
            parts.push(if p == 1 { name.clone() } else { format!("{name}^{p}") });
        }
        if !self.qexp.is_zero() {
            parts.push(render_q_power(&self.qexp));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        if neg {
            write!(f, "-")?;
        }
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ParamMonomial::from_plain(self).fmt(f)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial({self})")
    }
}

impl fmt::Debug for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamMonomial({self})")
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                <$t>::parse(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Monomial);
string_serde!(ParamMonomial);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let m = ParamMonomial::parse("b^2*q^2/c").unwrap();
        assert_eq!(m.params.get("b"), Some(&2));
        assert_eq!(m.params.get("c"), Some(&-1));
        assert_eq!(m.qexp, Exponent::from_integer(2));
        let m = ParamMonomial::parse("-q/u").unwrap();
        assert!(m.coeff.is_minus_one());
        assert_eq!(m.qexp, Exponent::one());
        let m = Monomial::parse("i*q^(3/2)").unwrap();
        assert_eq!(m.coeff, Scalar::imag_unit());
        assert_eq!(m.qexp, Exponent::new(3, 2));
        assert_eq!(Monomial::parse("q^-1").unwrap().qexp, Exponent::from_integer(-1));
        assert!(Monomial::parse("u*q").is_err());
        assert!(Monomial::parse("q^").is_err());
    }

    #[test]
    fn substitution() {
        let m = ParamMonomial::parse("u*v*q^-1").unwrap();
        let mut assign = HashMap::new();
        assign.insert("u".to_string(), Monomial::parse("-q^(1/2)").unwrap());
        assign.insert("v".to_string(), Monomial::parse("q^2").unwrap());
        let s = m.substitute(&assign).unwrap();
        assert!(s.coeff.is_minus_one());
        assert_eq!(s.qexp, Exponent::new(3, 2));
        assign.remove("v");
        assert!(m.substitute(&assign).is_err());
    }

    #[test]
    fn render_round_trip() {
        for text in ["-q", "q^(1/2)", "u^-1*q^2", "3/4*q^3", "z12^3*q^(3/2)", "1", "-1", "(1+z12)*u"] {
            let m = ParamMonomial::parse(text).unwrap();
            assert_eq!(m.to_string(), text);
            assert_eq!(ParamMonomial::parse(&m.to_string()).unwrap(), m);
        }
    }
}
