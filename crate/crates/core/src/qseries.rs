//! Truncated Puiseux series in `q` on a grid `q^{1/d}` with [`Scalar`]
//! coefficients.
//!
//! A series stores its grid denominator `d`, an order cap `N` (every
//! coefficient at an exponent above `N` is unknown and dropped) and a dense
//! window of coefficients starting at its lowest nonzero exponent. Negative
//! exponents are allowed, so finite Laurent tails such as `q^{-1}` survive.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::monomial::parse_term;
use crate::parse::{exponent_str, Cursor};
use crate::ring::{lcm, Scalar};
use crate::Exponent;

/// Largest grid denominator accepted by [`QSeries::rescale`] and sum folding.
pub const DEFAULT_MAX_GRID: i64 = 24;

#[derive(Clone)]
pub struct QSeries {
    den: i64,
    /// Cap in grid units: exponents `e` with `e·den > cap` are dropped.
    cap: i64,
    /// Grid index of `coeffs[0]`.
    low: i64,
    coeffs: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralityReport {
    pub is_integer_grid: bool,
    pub first_fractional: Option<Exponent>,
}

/// First exponent where two series disagree, with both coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Difference {
    pub exponent: Exponent,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

fn to_grid(e: Exponent, den: i64) -> Option<i64> {
    let scaled = e * Exponent::from_integer(den);
    scaled.is_integer().then(|| scaled.to_integer())
}

impl QSeries {
    fn from_dense(den: i64, cap: i64, low: i64, coeffs: Vec<Scalar>) -> Self {
        let mut s = QSeries { den, cap, low, coeffs };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let max_len = (self.cap - self.low + 1).max(0) as usize;
        if self.coeffs.len() > max_len {
            self.coeffs.truncate(max_len);
        }
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    /// The zero series known up to `cap`.
    pub fn zero(cap: Exponent) -> Self {
        let den = *cap.denom();
        QSeries { den, cap: cap.to_integer_scaled(den), low: 0, coeffs: Vec::new() }
    }

    pub fn zero_on_grid(den: i64, cap: Exponent) -> Self {
        let den = lcm(den, *cap.denom());
        QSeries { den, cap: cap.to_integer_scaled(den), low: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar, cap: Exponent) -> Self {
        Self::monomial(c, Exponent::zero(), cap)
    }

    pub fn one(cap: Exponent) -> Self {
        Self::constant(Scalar::one(), cap)
    }

    /// `c·q^e`, dropped entirely if `e` exceeds the cap.
    pub fn monomial(c: Scalar, e: Exponent, cap: Exponent) -> Self {
        let den = lcm(*e.denom(), *cap.denom());
        let idx = e.to_integer_scaled(den);
        Self::from_dense(den, cap.to_integer_scaled(den), idx, vec![c])
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents add.
    pub fn from_terms<I>(terms: I, cap: Exponent) -> Self
    where
        I: IntoIterator<Item = (Exponent, Scalar)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let den = terms.iter().fold(*cap.denom(), |d, (e, _)| lcm(d, *e.denom()));
        let cap_idx = cap.to_integer_scaled(den);
        let kept: Vec<(i64, Scalar)> =
            terms.into_iter().map(|(e, c)| (e.to_integer_scaled(den), c)).filter(|(i, _)| *i <= cap_idx).collect();
        let Some(low) = kept.iter().map(|(i, _)| *i).min() else {
            return QSeries { den, cap: cap_idx, low: 0, coeffs: Vec::new() };
        };
        let high = kept.iter().map(|(i, _)| *i).max().unwrap_or(low);
        let mut coeffs = vec![Scalar::zero(); (high - low + 1) as usize];
        for (i, c) in kept {
            coeffs[(i - low) as usize] += c;
        }
        Self::from_dense(den, cap_idx, low, coeffs)
    }

    /// Integer-coefficient power series on grid `den` with `coeffs[k]` at `q^{(low+k)/den}`.
    pub(crate) fn from_int_coeffs(den: i64, cap: i64, low: i64, coeffs: &[i128], scale: &Scalar) -> Self {
        let v = coeffs.iter().map(|&n| if n == 0 { Scalar::zero() } else { scale.mul_int(n) }).collect();
        Self::from_dense(den, cap, low, v)
    }

    pub(crate) fn from_raw(den: i64, cap: i64, low: i64, coeffs: Vec<Scalar>) -> Self {
        Self::from_dense(den, cap, low, coeffs)
    }

    pub fn grid_den(&self) -> i64 {
        self.den
    }

    pub fn cap(&self) -> Exponent {
        Exponent::new(self.cap, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Exponent> {
        (!self.is_zero()).then(|| Exponent::new(self.low, self.den))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &Scalar)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (Exponent::new(self.low + k as i64, self.den), c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Coefficient of `q^e`; zero when `e` is off the grid or absent.
    pub fn coeff(&self, e: Exponent) -> Result<Scalar> {
        if e > self.cap() {
            return Err(Error::BeyondCap { exponent: e, cap: self.cap() });
        }
        let Some(idx) = to_grid(e, self.den) else {
            return Ok(Scalar::zero());
        };
        let k = idx - self.low;
        if k < 0 || k as usize >= self.coeffs.len() {
            return Ok(Scalar::zero());
        }
        Ok(self.coeffs[k as usize].clone())
    }

    /// Re-expresses the series on a finer grid `den` (a multiple of the current one).
    pub fn regrid(&self, den: i64) -> Self {
        assert!(den % self.den == 0, "grid {den} is not a refinement of {}", self.den);
        let f = den / self.den;
        if f == 1 {
            return self.clone();
        }
        let mut coeffs = Vec::new();
        if !self.coeffs.is_empty() {
            coeffs = vec![Scalar::zero(); (self.coeffs.len() - 1) * f as usize + 1];
            for (k, c) in self.coeffs.iter().enumerate() {
                coeffs[k * f as usize] = c.clone();
            }
        }
        QSeries { den, cap: self.cap * f, low: self.low * f, coeffs }
    }

    /// Coarsest grid carrying every stored exponent and the cap.
    pub fn reduce_grid(&self) -> Self {
        let mut g = self.den.gcd(&self.cap);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                g = g.gcd(&(self.low + k as i64));
            }
            if g == 1 {
                return self.clone();
            }
        }
        let coeffs = self.coeffs.iter().step_by(g as usize).cloned().collect();
        QSeries { den: self.den / g, cap: self.cap / g, low: self.low / g, coeffs }
    }

    /// Lowers the cap to `min(cap, current cap)`.
    pub fn truncate(&self, cap: Exponent) -> Self {
        if cap >= self.cap() {
            return self.clone();
        }
        let den = lcm(self.den, *cap.denom());
        let mut s = self.regrid(den);
        s.cap = cap.to_integer_scaled(den);
        s.normalize();
        s
    }

    fn aligned(a: &QSeries, b: &QSeries) -> (QSeries, QSeries) {
        let den = lcm(a.den, b.den);
        let cap = a.cap().min(b.cap());
        (a.regrid(den).truncate(cap), b.regrid(den).truncate(cap))
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.combine(other, true)
    }

    fn combine(&self, other: &QSeries, negate: bool) -> QSeries {
        let (a, b) = Self::aligned(self, other);
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return if negate { b.neg() } else { b };
        }
        let low = a.low.min(b.low);
        let high = (a.low + a.coeffs.len() as i64).max(b.low + b.coeffs.len() as i64);
        let mut coeffs = vec![Scalar::zero(); (high - low) as usize];
        for (k, c) in a.coeffs.iter().enumerate() {
            coeffs[(a.low - low) as usize + k] = c.clone();
        }
        for (k, c) in b.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(b.low - low) as usize + k];
            if negate {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        Self::from_dense(a.den, a.cap, low, coeffs)
    }

    pub fn neg(&self) -> QSeries {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = -std::mem::replace(c, Scalar::zero());
        }
        s
    }

    pub fn scale(&self, c: &Scalar) -> QSeries {
        if c.is_one() {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        Self::from_dense(self.den, self.cap, self.low, coeffs)
    }

    /// Multiplication by `q^e`; the cap moves with the series.
    pub fn shift(&self, e: Exponent) -> QSeries {
        let den = lcm(self.den, *e.denom());
        let mut s = self.regrid(den);
        let d = e.to_integer_scaled(den);
        s.low += d;
        s.cap += d;
        if s.coeffs.is_empty() {
            s.low = 0;
        }
        s
    }

    /// Cauchy product. The result is known up to
    /// `min(cap_a, cap_b, cap_a + val_b, cap_b + val_a)`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        self.mul_to(other, None)
    }

    /// Product truncated at `min(limit, natural cap)`, skipping the work above `limit`.
    pub fn mul_to(&self, other: &QSeries, limit: Option<Exponent>) -> QSeries {
        let mut den = lcm(self.den, other.den);
        if let Some(l) = limit {
            den = lcm(den, *l.denom());
        }
        let a = self.regrid(den);
        let b = other.regrid(den);
        let mut cap = a.cap.min(b.cap);
        if let Some(l) = limit {
            cap = cap.min(l.to_integer_scaled(den));
        }
        if !b.is_zero() {
            cap = cap.min(a.cap + b.low);
        }
        if !a.is_zero() {
            cap = cap.min(b.cap + a.low);
        }
        if a.is_zero() || b.is_zero() {
            return QSeries { den, cap, low: 0, coeffs: Vec::new() };
        }
        let low = a.low + b.low;
        let len = (cap - low + 1).max(0) as usize;
        let mut coeffs = vec![Scalar::zero(); len];
        let bnz: Vec<(usize, &Scalar)> = b.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        for (i, ai) in a.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if ai.is_zero() {
                continue;
            }
            for &(j, bj) in &bnz {
                let k = i + j;
                if k >= len {
                    break;
                }
                let p = ai * bj;
                coeffs[k] += &p;
            }
        }
        Self::from_dense(den, cap, low, coeffs)
    }

    pub fn pow(&self, n: i64) -> Result<QSeries> {
        if n < 0 {
            return self.invert()?.pow(-n);
        }
        let mut acc = QSeries::one(self.cap());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn invert(&self) -> Result<QSeries> {
        if self.is_zero() || self.low != 0 {
            return Err(Error::NonUnitLeadingTerm);
        }
        let inv0 = self.coeffs[0].inv()?;
        let len = (self.cap + 1).max(0) as usize;
        let nz: Vec<(usize, &Scalar)> = self.coeffs.iter().enumerate().skip(1).filter(|(_, c)| !c.is_zero()).collect();
        let mut g: Vec<Scalar> = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                g.push(inv0.clone());
                continue;
            }
            let mut acc = Scalar::zero();
            for &(k, fk) in &nz {
                if k > n {
                    break;
                }
                if !g[n - k].is_zero() {
                    acc += fk * &g[n - k];
                }
            }
            g.push(if acc.is_zero() { acc } else { -(&acc * &inv0) });
        }
        Ok(Self::from_dense(self.den, self.cap, 0, g))
    }

    /// In-place product with `(1 − c·q^{s/den})` for a positive grid step `s`.
    pub(crate) fn mul_binomial_steps(&mut self, c: &Scalar, s: i64) {
        debug_assert!(s > 0);
        if c.is_zero() || self.is_zero() {
            return;
        }
        let len = (self.cap - self.low + 1).max(0) as usize;
        let s = s as usize;
        if s >= len {
            return;
        }
        self.coeffs.resize(len.min(self.coeffs.len() + s), Scalar::zero());
        let unit = if c.is_one() {
            Some(true)
        } else if c.is_minus_one() {
            Some(false)
        } else {
            None
        };
        for k in (s..self.coeffs.len()).rev() {
            let (head, tail) = self.coeffs.split_at_mut(k);
            let src = &head[k - s];
            if src.is_zero() {
                continue;
            }
            match unit {
                Some(true) => tail[0] -= src,
                Some(false) => tail[0] += src,
                None => tail[0] -= &(src * c),
            }
        }
        self.normalize();
    }

    /// In-place division by `(1 − c·q^{s/den})` for a positive grid step `s`.
    pub(crate) fn div_binomial_steps(&mut self, c: &Scalar, s: i64) {
        debug_assert!(s > 0);
        if c.is_zero() || self.is_zero() {
            return;
        }
        let len = (self.cap - self.low + 1).max(0) as usize;
        let s = s as usize;
        if s >= len {
            return;
        }
        self.coeffs.resize(len, Scalar::zero());
        let unit = if c.is_one() {
            Some(true)
        } else if c.is_minus_one() {
            Some(false)
        } else {
            None
        };
        for k in s..len {
            let (head, tail) = self.coeffs.split_at_mut(k);
            let src = &head[k - s];
            if src.is_zero() {
                continue;
            }
            match unit {
                Some(true) => tail[0] += src,
                Some(false) => tail[0] -= src,
                None => tail[0] += &(src * c),
            }
        }
        self.normalize();
    }

    /// Substitution `q ↦ q^m` for a positive rational `m`.
    pub fn rescale(&self, m: Exponent) -> Result<QSeries> {
        self.rescale_with_max(m, DEFAULT_MAX_GRID)
    }

    pub fn rescale_with_max(&self, m: Exponent, max_grid: i64) -> Result<QSeries> {
        if m <= Exponent::zero() {
            return Err(Error::InvalidSpec(format!("rescale factor {m} must be positive")));
        }
        let terms: Vec<(Exponent, Scalar)> = self.terms().map(|(e, c)| (e * m, c.clone())).collect();
        let out = QSeries::from_terms(terms, self.cap() * m).reduce_grid();
        if out.den > max_grid {
            return Err(Error::GridOverflow { den: out.den, max: max_grid });
        }
        Ok(out)
    }

    pub fn integrality_report(&self) -> IntegralityReport {
        let first = self.terms().map(|(e, _)| e).find(|e| !e.is_integer());
        IntegralityReport { is_integer_grid: first.is_none(), first_fractional: first }
    }

    /// Compares two series up to the smaller cap.
    pub fn first_difference(&self, other: &QSeries) -> Option<Difference> {
        let d = self.sub(other);
        let (e, _) = d.terms().next()?;
        Some(Difference {
            exponent: e,
            lhs: self.coeff(e).unwrap_or_else(|_| Scalar::zero()),
            rhs: other.coeff(e).unwrap_or_else(|_| Scalar::zero()),
        })
    }

    /// Rendering with the cap appended, parseable by [`QSeries::parse`].
    pub fn to_canonical(&self) -> String {
        format!("{self} | cap={}", exponent_str(&self.cap()))
    }

    /// Parses `terms | cap=N`; the cap suffix is required.
    pub fn parse(s: &str) -> Result<QSeries> {
        let (body, cap_text) =
            s.rsplit_once('|').ok_or_else(|| Error::parse("missing '| cap=N' suffix", s, s.len()))?;
        let mut cc = Cursor::new(cap_text);
        if !cc.eat_str("cap") || !cc.eat('=') {
            return Err(Error::parse("expected 'cap='", s, body.len() + 1));
        }
        let r = cc.rational()?;
        cc.finish()?;
        let cap = crate::parse::small_rational(&r).ok_or_else(|| Error::parse("cap out of range", s, body.len()))?;
        let terms = parse_series_terms(body)?;
        Ok(QSeries::from_terms(terms, cap))
    }
}

pub(crate) fn parse_series_terms(body: &str) -> Result<Vec<(Exponent, Scalar)>> {
    let mut cur = Cursor::new(body);
    let mut terms = Vec::new();
    if cur.at_end() {
        return Err(cur.error("empty series"));
    }
    let mut sign = if cur.eat('-') { -1 } else { 1 };
    loop {
        let t = parse_term(&mut cur)?;
        if !t.params.is_empty() {
            return Err(cur.error("parameters are not allowed in a series"));
        }
        let c = if sign < 0 { -t.coeff } else { t.coeff };
        terms.push((t.qexp, c));
        if cur.eat('+') {
            sign = 1;
        } else if cur.eat('-') {
            sign = -1;
        } else {
            break;
        }
    }
    cur.finish()?;
    Ok(terms)
}

trait ScaledInt {
    fn to_integer_scaled(&self, den: i64) -> i64;
}

impl ScaledInt for Exponent {
    fn to_integer_scaled(&self, den: i64) -> i64 {
        let v = *self * Exponent::from_integer(den);
        assert!(v.is_integer(), "exponent {self} is not on grid 1/{den}");
        v.to_integer()
    }
}

pub(crate) fn exponent_on_grid(e: Exponent, den: i64) -> i64 {
    e.to_integer_scaled(den)
}

impl PartialEq for QSeries {
    /// Equal when the caps agree and every stored coefficient agrees.
    fn eq(&self, other: &Self) -> bool {
        self.cap() == other.cap()
            && self.num_terms() == other.num_terms()
            && self.terms().zip(other.terms()).all(|((e1, c1), (e2, c2))| e1 == e2 && c1 == c2)
    }
}

impl Eq for QSeries {}

pub(crate) fn render_q_power(e: &Exponent) -> String {
    if e.is_integer() {
        match e.to_integer() {
            1 => "q".to_string(),
            n => format!("q^{n}"),
        }
    } else {
        format!("q^({}/{})", e.numer(), e.denom())
    }
}

/// `coeff*q^e` with unit coefficients elided; `negative` reports a leading minus
/// that the caller may turn into a ` - ` separator.
pub(crate) fn render_term(c: &Scalar, e: &Exponent) -> (bool, String) {
    let (neg, mag) = match c.as_rational() {
        Some(r) if r < &num_rational::BigRational::zero() => (true, Scalar::from_rational(-r.clone())),
        _ => (false, c.clone()),
    };
    let coeff = if mag.is_compound() { format!("({mag})") } else { mag.to_string() };
    let text = if e.is_zero() {
        coeff
    } else if mag.is_one() {
        render_q_power(e)
    } else {
        format!("{coeff}*{}", render_q_power(e))
    };
    (neg, text)
}

impl fmt::Display for QSeries {
    /// Terms in ascending exponent order, e.g. `1 - q + 2*q^(1/2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms().enumerate() {
            let (neg, text) = render_term(c, &e);
            match (idx, neg) {
                (0, true) => write!(f, "-{text}")?,
                (0, false) => write!(f, "{text}")?,
                (_, true) => write!(f, " - {text}")?,
                (_, false) => write!(f, " + {text}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries({})", self.to_canonical())
    }
}
