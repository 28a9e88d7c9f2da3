//! Small byte cursor shared by the textual formats (scalars, monomials,
//! series, product expressions and sum-side polynomials).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::Exponent;

pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(msg, self.src, self.pos)
    }

    pub fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    /// Identifier made of ASCII letters, digits and underscores, starting with a letter.
    pub fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let mut end = 0;
        for (idx, c) in rest.char_indices() {
            let ok = if idx == 0 { c.is_ascii_alphabetic() } else { c.is_ascii_alphanumeric() || c == '_' };
            if !ok {
                break;
            }
            end = idx + c.len_utf8();
        }
        if end == 0 {
            None
        } else {
            self.pos += end;
            Some(&rest[..end])
        }
    }

    pub fn unsigned(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.bytes().take_while(|b| b.is_ascii_digit()).count();
        if len == 0 {
            return None;
        }
        self.pos += len;
        rest[..len].parse().ok()
    }

    pub fn signed_i64(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let n = self.unsigned().ok_or_else(|| self.error("expected integer"))?;
        let v: i64 = n.try_into().map_err(|_| self.error("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    /// `p`, `-p`, `p/d` or `-p/d` (no surrounding parentheses).
    pub fn rational(&mut self) -> Result<BigRational> {
        let neg = self.eat('-');
        let n = self.unsigned().ok_or_else(|| self.error("expected number"))?;
        let save = self.pos;
        let d = if self.eat('/') {
            match self.unsigned() {
                Some(d) => d,
                None => {
                    self.pos = save;
                    BigInt::from(1)
                }
            }
        } else {
            BigInt::from(1)
        };
        if d == BigInt::from(0) {
            return Err(self.error("zero denominator"));
        }
        let r = BigRational::new(n, d);
        Ok(if neg { -r } else { r })
    }

    /// Exponent after `^`: `5`, `-5`, `(p/d)`, `(-p/d)`.
    pub fn exponent(&mut self) -> Result<Exponent> {
        if self.eat('(') {
            let r = self.rational()?;
            self.expect(')')?;
            small_rational(&r).ok_or_else(|| self.error("exponent out of range"))
        } else {
            Ok(Exponent::from_integer(self.signed_i64()?))
        }
    }
}

pub(crate) fn small_rational(r: &BigRational) -> Option<Exponent> {
    let n: i64 = r.numer().try_into().ok()?;
    let d: i64 = r.denom().try_into().ok()?;
    Some(Exponent::new(n, d))
}

/// Exact fraction text for exponents: `p` for integers, `p/d` otherwise.
pub fn exponent_str(e: &Exponent) -> String {
    if e.is_integer() {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

pub fn parse_exponent_str(s: &str) -> Result<Exponent> {
    let mut c = Cursor::new(s);
    let r = c.rational()?;
    c.finish()?;
    small_rational(&r).ok_or_else(|| Error::parse("exponent out of range", s, 0))
}

pub(crate) mod serde_exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Exponent;

    pub fn serialize<S: Serializer>(e: &Exponent, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::exponent_str(e))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Exponent, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_exponent_str(&s).map_err(serde::de::Error::custom)
    }
}
