//! q-Pochhammer symbols, product sides and recovery of product exponents
//! from a series.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{parse_term, Monomial, ParamMonomial};
use crate::parse::{serde_exponent, Cursor};
use crate::qseries::{exponent_on_grid, render_q_power, QSeries};
use crate::ring::{lcm, Scalar};
use crate::Exponent;

/// `(base; q^modulus)_∞^power`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub base: ParamMonomial,
    pub modulus: Exponent,
    pub power: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTerm {
    pub weight: Scalar,
    pub factors: Vec<Factor>,
}

/// Sum of weighted products of infinite Pochhammer symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductExpr {
    pub terms: Vec<ProductTerm>,
}

/// A product of binomials `(1 − c·q^e)^r` kept as
/// `prefactor · constant · ∏ (1 − c·q^e)^r` with every remaining `e > 0`.
struct BinomialProduct {
    prefactor: Monomial,
    constant: Scalar,
    vanishes: bool,
    finite: Vec<(Scalar, Exponent, i64)>,
    /// `∏_{k≥0} (1 − c·q^{e + k·step})^r` with `e > 0`.
    families: Vec<(Scalar, Exponent, Exponent, i64)>,
}

impl BinomialProduct {
    fn new() -> Self {
        BinomialProduct {
            prefactor: Monomial::one(),
            constant: Scalar::one(),
            vanishes: false,
            finite: Vec::new(),
            families: Vec::new(),
        }
    }

    fn push(&mut self, c: &Scalar, e: Exponent, power: i64) -> Result<()> {
        if c.is_zero() || power == 0 {
            return Ok(());
        }
        if e > Exponent::zero() {
            self.finite.push((c.clone(), e, power));
        } else if e.is_zero() {
            let v = &Scalar::one() - c;
            if v.is_zero() {
                if power < 0 {
                    return Err(Error::DivisionByZero);
                }
                self.vanishes = true;
            } else {
                self.constant = &self.constant * &v.pow(power)?;
            }
        } else {
            // 1 − c·q^e = (−c·q^e)(1 − c⁻¹·q^{−e})
            let lead = Monomial::new(-c.clone(), e).pow(power)?;
            self.prefactor = self.prefactor.mul(&lead);
            self.finite.push((c.inv()?, -e, power));
        }
        Ok(())
    }

    /// Adds `(c·q^e; q^step)_∞^power`; the finitely many factors with
    /// nonpositive exponent are peeled off first.
    fn push_infinite(&mut self, c: &Scalar, e: Exponent, step: Exponent, power: i64) -> Result<()> {
        let mut e = e;
        while e <= Exponent::zero() {
            self.push(c, e, power)?;
            e += step;
        }
        if !c.is_zero() && power != 0 {
            self.families.push((c.clone(), e, step, power));
        }
        Ok(())
    }

    fn eval(&self, cap: Exponent) -> QSeries {
        if self.vanishes {
            return QSeries::zero(cap);
        }
        let shift = self.prefactor.qexp;
        let work = cap - shift;
        let mut den = *work.denom();
        for (_, e, _) in &self.finite {
            den = lcm(den, *e.denom());
        }
        for (_, e, s, _) in &self.families {
            den = lcm(lcm(den, *e.denom()), *s.denom());
        }
        let work_idx = exponent_on_grid(work, den);
        let mut acc = QSeries::from_raw(den, work_idx, 0, vec![Scalar::one()]);
        let mut apply = |c: &Scalar, e: Exponent, power: i64| {
            let s = exponent_on_grid(e, den);
            for _ in 0..power.abs() {
                if power > 0 {
                    acc.mul_binomial_steps(c, s);
                } else {
                    acc.div_binomial_steps(c, s);
                }
            }
        };
        for (c, e, r) in &self.finite {
            if *e <= work {
                apply(c, *e, *r);
            }
        }
        for (c, e0, step, r) in &self.families {
            let mut e = *e0;
            while e <= work {
                apply(c, e, *r);
                e += *step;
            }
        }
        let scale = &self.prefactor.coeff * &self.constant;
        acc.scale(&scale).shift(shift)
    }
}

fn check_step(step: Exponent) -> Result<()> {
    if step <= Exponent::zero() {
        return Err(Error::InvalidSpec(format!("Pochhammer step {step} must be positive")));
    }
    Ok(())
}

/// `∏_{k<n} (1 − a·q^{step·k})` truncated at `cap`.
pub fn poch_finite(a: &Monomial, step: Exponent, n: u64, cap: Exponent) -> QSeries {
    let mut bp = BinomialProduct::new();
    let mut e = a.qexp;
    for _ in 0..n {
        bp.push(&a.coeff, e, 1).expect("positive powers never divide");
        e += step;
    }
    bp.eval(cap)
}

/// `∏_{k≥0} (1 − a·q^{step·k})` truncated at `cap`.
pub fn poch_inf(a: &Monomial, step: Exponent, cap: Exponent) -> Result<QSeries> {
    poch_inf_pow(a, step, 1, cap)
}

/// `(a; q^step)_∞^power`. Requires `a.qexp ≥ 0`, and `a ≠ 1` when `a.qexp = 0`.
pub fn poch_inf_pow(a: &Monomial, step: Exponent, power: i64, cap: Exponent) -> Result<QSeries> {
    check_step(step)?;
    if a.qexp < Exponent::zero() && !a.coeff.is_zero() {
        return Err(Error::DivergentProduct(format!("base {a} has negative q-order")));
    }
    if a.qexp.is_zero() && a.coeff.is_one() {
        return Err(Error::DivergentProduct("base 1 has a vanishing leading factor".into()));
    }
    let mut bp = BinomialProduct::new();
    bp.push_infinite(&a.coeff, a.qexp, step, power)?;
    Ok(bp.eval(cap))
}

impl Factor {
    pub fn new(base: Monomial, modulus: Exponent, power: i64) -> Self {
        Factor { base: ParamMonomial::from_plain(&base), modulus, power }
    }
}

impl ProductTerm {
    /// The product alone, with the weight applied.
    ///
    /// Bases with negative q-order are accepted here: their finitely many
    /// Laurent factors are split off as a monomial.
    pub fn eval(&self, cap: Exponent) -> Result<QSeries> {
        let mut bp = BinomialProduct::new();
        for f in &self.factors {
            check_step(f.modulus)?;
            if !f.base.params.is_empty() {
                return Err(Error::InvalidSpec(format!("unassigned parameter in factor base {}", f.base)));
            }
            if f.base.qexp.is_zero() && f.base.coeff.is_one() && f.power < 0 {
                return Err(Error::DivergentProduct("base 1 in a denominator".into()));
            }
            bp.push_infinite(&f.base.coeff, f.base.qexp, f.modulus, f.power)?;
        }
        bp.constant = &bp.constant * &self.weight;
        Ok(bp.eval(cap))
    }
}

impl ProductExpr {
    pub fn single(weight: Scalar, factors: Vec<Factor>) -> Self {
        ProductExpr { terms: vec![ProductTerm { weight, factors }] }
    }

    /// `Σ weight·∏ (base; q^n)_∞^r` truncated at `cap`.
    pub fn eval(&self, cap: Exponent) -> Result<QSeries> {
        let mut acc = QSeries::zero(cap);
        for t in &self.terms {
            acc = acc.add(&t.eval(cap)?);
        }
        Ok(acc)
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names: Vec<String> =
            self.terms.iter().flat_map(|t| t.factors.iter().flat_map(|f| f.base.params.keys().cloned())).collect();
        names.sort();
        names.dedup();
        names
    }

    pub fn substitute(&self, assign: &HashMap<String, Monomial>) -> Result<ProductExpr> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let factors = t
                    .factors
                    .iter()
                    .map(|f| {
                        let base = ParamMonomial::from_plain(&f.base.substitute(assign)?);
                        Ok(Factor { base, modulus: f.modulus, power: f.power })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ProductTerm { weight: t.weight.clone(), factors })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductExpr { terms })
    }

    /// Every weight is rational.
    pub fn has_rational_weights(&self) -> bool {
        self.terms.iter().all(|t| t.weight.is_rational())
    }

    /// Parses `w * (m1, m2; q^n)^r / (m3; q^n) + ...`.
    pub fn parse(s: &str) -> Result<ProductExpr> {
        let mut cur = Cursor::new(s);
        let mut terms = Vec::new();
        let mut negate = cur.eat('-');
        loop {
            let mut t = parse_product_term(&mut cur)?;
            if negate {
                t.weight = -t.weight;
            }
            terms.push(t);
            if cur.eat('+') {
                negate = false;
            } else if cur.eat('-') {
                negate = true;
            } else {
                break;
            }
        }
        cur.finish()?;
        Ok(ProductExpr { terms })
    }
}

fn parse_product_term(cur: &mut Cursor<'_>) -> Result<ProductTerm> {
    let mut weight = Scalar::one();
    let mut factors = Vec::new();
    let mut divide = false;
    loop {
        let save = cur.pos;
        let group = if cur.peek() == Some('(') { try_parse_group(cur)? } else { None };
        match group {
            Some((bases, modulus)) => {
                let r = if cur.eat('^') { cur.signed_i64()? } else { 1 };
                let r = if divide { -r } else { r };
                factors.extend(bases.into_iter().map(|base| Factor { base, modulus, power: r }));
            }
            None => {
                cur.pos = save;
                let m = parse_weight_factor(cur)?;
                weight = if divide {
                    weight.checked_div(&m).map_err(|_| cur.error("division by zero"))?
                } else {
                    &weight * &m
                };
            }
        }
        if cur.eat('*') {
            divide = false;
        } else if cur.peek() == Some('/') {
            cur.eat('/');
            divide = true;
        } else {
            return Ok(ProductTerm { weight, factors });
        }
    }
}

/// A scalar factor of a term weight: number, named constant or parenthesized scalar.
fn parse_weight_factor(cur: &mut Cursor<'_>) -> Result<Scalar> {
    if cur.eat('(') {
        let v = crate::ring::parse_expr(cur)?;
        cur.expect(')')?;
        return Ok(v);
    }
    let save = cur.pos;
    let m = parse_single_factor(cur)?;
    if !m.qexp.is_zero() || !m.params.is_empty() {
        cur.pos = save;
        return Err(cur.error("expected a Pochhammer group or a scalar weight"));
    }
    Ok(m.coeff)
}

fn parse_single_factor(cur: &mut Cursor<'_>) -> Result<ParamMonomial> {
    let neg = cur.eat('-');
    let mut m = if let Some(n) = cur.unsigned() {
        ParamMonomial::constant(Scalar::from_rational(BigRational::from_integer(n)))
    } else {
        let save = cur.pos;
        match cur.ident().and_then(crate::ring::named_constant) {
            Some(c) => ParamMonomial::constant(c),
            None => {
                cur.pos = save;
                return Err(cur.error("expected a Pochhammer group or a scalar weight"));
            }
        }
    };
    if cur.eat('^') {
        m = m.pow(cur.signed_i64()?).map_err(|_| cur.error("zero to a negative power"))?;
    }
    if neg {
        m.coeff = -m.coeff;
    }
    Ok(m)
}

/// `(m1, m2, ...; q^n)`, or `None` if the parenthesis holds no `;`.
fn try_parse_group(cur: &mut Cursor<'_>) -> Result<Option<(Vec<ParamMonomial>, Exponent)>> {
    let rest = &cur.src[cur.pos..];
    let mut depth = 0;
    let mut is_group = false;
    for ch in rest.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            ';' if depth == 1 => is_group = true,
            _ => {}
        }
    }
    if !is_group {
        return Ok(None);
    }
    cur.expect('(')?;
    let mut bases = vec![parse_term(cur)?];
    while cur.eat(',') {
        bases.push(parse_term(cur)?);
    }
    cur.expect(';')?;
    let at = cur.pos;
    let m = parse_term(cur)?;
    if !m.coeff.is_one() || !m.params.is_empty() || m.qexp <= Exponent::zero() {
        cur.pos = at;
        return Err(cur.error("Pochhammer modulus must be q^n with n > 0"));
    }
    cur.expect(')')?;
    Ok(Some((bases, m.qexp)))
}

impl fmt::Display for ProductTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let (neg, mag) = match self.weight.as_rational() {
            Some(r) if r.is_negative() => (true, Scalar::from_rational(-r.clone())),
            _ => (false, self.weight.clone()),
        };
        if !mag.is_one() || self.factors.is_empty() {
            parts.push(if mag.is_compound() { format!("({mag})") } else { mag.to_string() });
        }
        let mut k = 0;
        while k < self.factors.len() {
            let head = &self.factors[k];
            let mut j = k + 1;
            while j < self.factors.len()
                && self.factors[j].modulus == head.modulus
                && self.factors[j].power == head.power
            {
                j += 1;
            }
            let bases: Vec<String> = self.factors[k..j].iter().map(|x| x.base.to_string()).collect();
            let mut g = format!("({}; {})", bases.join(", "), render_q_power(&head.modulus));
            if head.power != 1 {
                g.push_str(&format!("^{}", head.power));
            }
            parts.push(g);
            k = j;
        }
        if neg {
            write!(f, "-")?;
        }
        write!(f, "{}", parts.join(" * "))
    }
}

impl fmt::Display for ProductExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            let text = t.to_string();
            match (k, text.strip_prefix('-')) {
                (0, _) => write!(f, "{text}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {text}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FactorRepr {
    coeff: Scalar,
    #[serde(with = "serde_exponent")]
    qexp: Exponent,
    #[serde(with = "serde_exponent")]
    modulus: Exponent,
    power: i64,
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    params: std::collections::BTreeMap<String, i64>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    weight: Scalar,
    factors: Vec<FactorRepr>,
}

#[derive(Serialize, Deserialize)]
struct ExprRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for ProductExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = ExprRepr {
            terms: self
                .terms
                .iter()
                .map(|t| TermRepr {
                    weight: t.weight.clone(),
                    factors: t
                        .factors
                        .iter()
                        .map(|f| FactorRepr {
                            coeff: f.base.coeff.clone(),
                            qexp: f.base.qexp,
                            modulus: f.modulus,
                            power: f.power,
                            params: f.base.params.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProductExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ExprRepr::deserialize(d)?;
        let mut terms = Vec::new();
        for t in repr.terms {
            let mut factors = Vec::new();
            for f in t.factors {
                if f.modulus <= Exponent::zero() {
                    return Err(serde::de::Error::custom("Pochhammer modulus must be positive"));
                }
                let base = ParamMonomial { coeff: f.coeff, qexp: f.qexp, params: f.params };
                factors.push(Factor { base, modulus: f.modulus, power: f.power });
            }
            terms.push(ProductTerm { weight: t.weight, factors });
        }
        if terms.is_empty() {
            return Err(serde::de::Error::custom("product side needs at least one term"));
        }
        Ok(ProductExpr { terms })
    }
}

/// Exponents `e_a` with `f = ∏_a (1 − q^a)^{−e_a}` up to the cap of `f`.
///
/// `f` must have constant term exactly 1. The series is moved to an integer
/// grid, the logarithmic derivative is peeled off term by term and Möbius
/// inversion recovers the exponents.
pub fn prodmake(f: &QSeries) -> Result<Vec<(Exponent, BigRational)>> {
    let d = f.grid_den();
    let g = if d == 1 { f.clone() } else { f.rescale_with_max(Exponent::from_integer(d), i64::MAX)? };
    if g.valuation() != Some(Exponent::zero()) || !g.coeff(Exponent::zero())?.is_one() {
        return Err(Error::NonUnitLeadingTerm);
    }
    let n = g.cap().floor().to_integer().max(0) as usize;
    let b: Vec<Scalar> = (0..=n).map(|m| g.coeff(Exponent::from_integer(m as i64))).collect::<Result<_>>()?;
    // c_m: coefficients of q·f'/f
    let mut c = vec![Scalar::zero(); n + 1];
    for m in 1..=n {
        let mut acc = b[m].mul_int(m as i128);
        for j in 1..m {
            if !c[j].is_zero() && !b[m - j].is_zero() {
                acc -= &c[j] * &b[m - j];
            }
        }
        c[m] = acc;
    }
    let mu = mobius_table(n);
    let mut out = Vec::new();
    for m in 1..=n {
        let mut acc = Scalar::zero();
        for dd in 1..=m {
            if m % dd == 0 && mu[m / dd] != 0 && !c[dd].is_zero() {
                acc += c[dd].mul_int(mu[m / dd] as i128);
            }
        }
        if acc.is_zero() {
            continue;
        }
        let e = Exponent::new(m as i64, d);
        let r = acc.as_rational().ok_or(Error::NonRationalExponent { exponent: e })?
            / BigRational::from_integer(BigInt::from(m));
        out.push((e, r));
    }
    Ok(out)
}

fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut is_comp = vec![false; n + 1];
    let mut primes = Vec::new();
    if n >= 1 {
        mu[0] = 0;
    }
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            if i * p > n {
                break;
            }
            is_comp[i * p] = true;
            if i % p == 0 {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = -mu[i];
        }
    }
    mu
}

/// `∏_a (1 − q^a)^{−e_a}` truncated at `cap`.
///
/// Works on the common grid `q^{1/D}`: the logarithm has `x·d/dx` coefficients
/// `c_n = Σ_{m | n} m·e_m`, and `n·f_n = Σ_j c_j·f_{n−j}` rebuilds the series.
pub fn expand_exponents(exps: &[(Exponent, BigRational)], cap: Exponent) -> QSeries {
    let den = exps.iter().fold(*cap.denom(), |d, (a, _)| lcm(d, *a.denom()));
    let n = (cap * Exponent::from_integer(den)).floor().to_integer().max(0) as usize;
    let mut c = vec![BigRational::zero(); n + 1];
    for (a, e) in exps {
        assert!(*a > Exponent::zero(), "product exponents need positive bases");
        let m = (*a * Exponent::from_integer(den)).to_integer() as usize;
        if m == 0 || m > n || e.is_zero() {
            continue;
        }
        let w = e * BigRational::from_integer(BigInt::from(m));
        for t in (m..=n).step_by(m) {
            c[t] += &w;
        }
    }
    let mut f = vec![BigRational::zero(); n + 1];
    f[0] = BigRational::one();
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for j in 1..=k {
            if !c[j].is_zero() && !f[k - j].is_zero() {
                acc += &c[j] * &f[k - j];
            }
        }
        f[k] = acc / BigRational::from_integer(BigInt::from(k));
    }
    let terms = f
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (Exponent::new(k as i64, den), Scalar::from_rational(v)));
    QSeries::from_terms(terms, cap)
}

/// Renders prodmake output as `a: e_a` lines.
pub fn format_exponent_table(exps: &[(Exponent, BigRational)]) -> String {
    exps.iter().map(|(a, e)| format!("{}: {}\n", crate::parse::exponent_str(a), e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(1 − q^a)^α = Σ_k C(α, k)·(−q^a)^k`.
    fn binomial_series(a: Exponent, alpha: &BigRational, cap: Exponent) -> QSeries {
        let mut terms = Vec::new();
        let mut coeff = BigRational::one();
        let mut k: i64 = 0;
        while a * Exponent::from_integer(k) <= cap {
            terms.push((a * Exponent::from_integer(k), Scalar::from_rational(coeff.clone())));
            let kk = BigRational::from_integer(BigInt::from(k));
            coeff = -coeff * (alpha - &kk) / (kk + BigRational::one());
            k += 1;
        }
        QSeries::from_terms(terms, cap)
    }
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ex(n: i64) -> Exponent {
        Exponent::from_integer(n)
    }

    fn q(e: i64) -> Monomial {
        Monomial::q_pow(ex(e))
    }

    fn ints(s: &QSeries, n: i64) -> Vec<i64> {
        (0..=n)
            .map(|k| {
                let c = s.coeff(ex(k)).unwrap();
                c.as_rational().unwrap().to_integer().try_into().unwrap()
            })
            .collect()
    }

    /// Euler's pentagonal number theorem, independent of the product code.
    fn pentagonal(cap: i64) -> Vec<i64> {
        let mut v = vec![0; cap as usize + 1];
        for k in -20i64..=20 {
            let e = k * (3 * k - 1) / 2;
            if (0..=cap).contains(&e) {
                v[e as usize] += if k % 2 == 0 { 1 } else { -1 };
            }
        }
        v
    }

    #[test]
    fn finite_products() {
        let p = poch_finite(&q(1), ex(1), 2, ex(10));
        assert_eq!(p.to_string(), "1 - q - q^2 + q^3");
        assert_eq!(poch_finite(&q(3), ex(1), 0, ex(10)), QSeries::one(ex(10)));
        let m1 = Monomial::new(Scalar::from_int(-1), ex(0));
        assert_eq!(poch_finite(&m1, ex(1), 1, ex(10)), QSeries::constant(Scalar::from_int(2), ex(10)));
    }

    #[test]
    fn infinite_products() {
        let p = poch_inf(&q(1), ex(1), ex(7)).unwrap();
        assert_eq!(p.to_string(), "1 - q - q^2 + q^5 + q^7");
        assert_eq!(ints(&poch_inf(&q(1), ex(1), ex(60)).unwrap(), 60), pentagonal(60));
        let m1 = Monomial::new(Scalar::from_int(-1), ex(0));
        assert_eq!(poch_inf(&m1, ex(1), ex(3)).unwrap().to_string(), "2 + 2*q + 2*q^2 + 4*q^3");
        assert!(matches!(poch_inf(&q(-1), ex(1), ex(3)), Err(Error::DivergentProduct(_))));
        assert!(matches!(poch_inf(&q(0), ex(1), ex(3)), Err(Error::DivergentProduct(_))));
    }

    #[test]
    fn rogers_ramanujan_product() {
        let p = ProductExpr::parse("(q, q^4; q^5)^-1").unwrap();
        let s = p.eval(ex(6)).unwrap();
        assert_eq!(s.to_string(), "1 + q + q^2 + q^3 + 2*q^4 + 2*q^5 + 3*q^6");
        assert_eq!(s.coeff(ex(4)).unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn cancellation_and_symmetry() {
        let p = ProductExpr::parse("(q; q) / (q; q)").unwrap();
        assert_eq!(p.eval(ex(20)).unwrap(), QSeries::one(ex(20)));
        let two = ProductExpr::parse("(q^2, q^3, q^5; q^5) / (q; q) + (q^2, q^3, q^5; q^5) / (q; q)").unwrap();
        let one = ProductExpr::parse("2 * (q^2, q^3, q^5; q^5) / (q; q)").unwrap();
        assert_eq!(two.eval(ex(30)).unwrap(), one.eval(ex(30)).unwrap());
    }

    #[test]
    fn negative_order_base() {
        // (q^{-1}; q^5)_∞ = (1 − q^{-1})(q^4; q^5)_∞ = −q^{-1}(1 − q)(q^4; q^5)_∞
        let p = ProductExpr::parse("(q^-1; q^5)").unwrap().eval(ex(10)).unwrap();
        let direct = QSeries::from_terms([(ex(-1), Scalar::from_int(-1)), (ex(0), Scalar::one())], ex(11))
            .mul(&poch_inf(&q(4), ex(5), ex(11)).unwrap());
        assert_eq!(p, direct.truncate(ex(10)));
        assert_eq!(p.cap(), ex(10));
    }

    #[test]
    fn expression_text_round_trip() {
        for text in [
            "(q, q^4; q^5)^-1",
            "2 * (q^4, q^5, q^9; q^9) * (q; q)^-1",
            "(u^-1*q^2, u*q^3, q^5; q^5) * (q; q)^-1 + (u*q^2, u^-1*q^3, q^5; q^5) * (q; q)^-1",
            "(-q, b*c^-1*q^2; q) * (b*q, b^-1*c; q^2)",
            "(q^(1/2); q)^2 * (q; q)^-1",
            "3/4",
            "(-1; q) - (q; q^2)",
        ] {
            let p = ProductExpr::parse(text).unwrap();
            assert_eq!(p.to_string(), text);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(serde_json::from_str::<ProductExpr>(&json).unwrap(), p);
        }
        let p = ProductExpr::parse("1/((q,q^4;q^5))").ok();
        assert!(p.is_none());
        let p = ProductExpr::parse("1/(q,q^4;q^5)").unwrap();
        assert_eq!(p.to_string(), "(q, q^4; q^5)^-1");
        let err = ProductExpr::parse("(q; q^0)").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn prodmake_examples() {
        let p = poch_inf_pow(&q(1), ex(1), -1, ex(10)).unwrap();
        let e = prodmake(&p).unwrap();
        assert_eq!(e.len(), 10);
        assert!(e.iter().all(|(_, v)| v.is_one()));

        let p = ProductExpr::parse("(q^2, q^3; q^6)^-1").unwrap().eval(ex(12)).unwrap();
        let e = prodmake(&p).unwrap();
        let at: Vec<i64> = e.iter().map(|(a, _)| a.to_integer()).collect();
        assert_eq!(at, vec![2, 3, 8, 9]);

        let p = QSeries::from_terms([(ex(0), Scalar::one()), (ex(1), Scalar::one())], ex(6));
        let e = prodmake(&p).unwrap();
        // 1 + q = (1 − q²)/(1 − q)
        assert_eq!(e[0], (ex(1), BigRational::from_integer(1.into())));
        assert_eq!(e[1], (ex(2), BigRational::from_integer((-1).into())));
        assert_eq!(expand_exponents(&e, ex(6)), p);

        let half = ProductExpr::parse("(q^(1/2); q)^2").unwrap().eval(ex(8)).unwrap();
        let e = prodmake(&half).unwrap();
        assert_eq!(e[0], (Exponent::new(1, 2), BigRational::from_integer((-2).into())));
        assert_eq!(expand_exponents(&e, ex(8)), half);

        let two = QSeries::constant(Scalar::from_int(2), ex(3));
        assert_eq!(prodmake(&two).unwrap_err(), Error::NonUnitLeadingTerm);
        let cplx = QSeries::from_terms([(ex(0), Scalar::one()), (ex(1), Scalar::imag_unit())], ex(3));
        assert!(matches!(prodmake(&cplx), Err(Error::NonRationalExponent { .. })));
    }

    #[test]
    fn fractional_exponents_round_trip() {
        // (1 − q)^{1/2}
        let s = binomial_series(ex(1), &BigRational::new(1.into(), 2.into()), ex(8));
        assert_eq!(s.mul(&s), QSeries::from_terms([(ex(0), Scalar::one()), (ex(1), Scalar::from_int(-1))], ex(8)));
        let e = prodmake(&s).unwrap();
        assert_eq!(e, vec![(ex(1), BigRational::new((-1).into(), 2.into()))]);
        assert_eq!(expand_exponents(&e, ex(8)), s);
    }

    fn random_monomial(rng: &mut ChaCha8Rng) -> Monomial {
        let coeffs = [1, -1, 2, -2, 3];
        let c = Scalar::from_int(coeffs[rng.gen_range(0..coeffs.len())]);
        let den = rng.gen_range(1..=2);
        let num = rng.gen_range(1..=4 * den);
        Monomial::new(c, Exponent::new(num, den))
    }

    fn finite_sum(f: impl Fn(u64) -> QSeries, cap: Exponent, nmax: u64) -> QSeries {
        (0..=nmax).fold(QSeries::zero(cap), |acc, n| acc.add(&f(n)))
    }

    fn z_pow(z: &Monomial, n: u64, cap: Exponent) -> QSeries {
        let m = z.pow(n as i64).unwrap();
        QSeries::monomial(m.coeff, m.qexp, cap)
    }

    #[test]
    fn euler_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cap = ex(14);
        let one = ex(1);
        for _ in 0..20 {
            let z = random_monomial(&mut rng);
            let nmax = (cap / z.qexp).to_integer() as u64 + 1;
            let lhs =
                finite_sum(|n| z_pow(&z, n, cap).mul(&poch_finite(&q(1), one, n, cap).invert().unwrap()), cap, nmax);
            assert_eq!(lhs, poch_inf_pow(&z, one, -1, cap).unwrap());

            let neg_z = Monomial::new(-z.coeff.clone(), z.qexp);
            let lhs = finite_sum(
                |n| {
                    let tri = Exponent::from_integer((n * n.saturating_sub(1) / 2) as i64);
                    z_pow(&z, n, cap).shift(tri).mul(&poch_finite(&q(1), one, n, cap).invert().unwrap())
                },
                cap,
                nmax,
            );
            assert_eq!(lhs, poch_inf(&neg_z, one, cap).unwrap());
        }
    }

    #[test]
    fn q_binomial_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cap = ex(12);
        let one = ex(1);
        for _ in 0..20 {
            let a = random_monomial(&mut rng);
            let z = random_monomial(&mut rng);
            let nmax = (cap / z.qexp).to_integer() as u64 + 1;
            let lhs = finite_sum(
                |n| {
                    z_pow(&z, n, cap)
                        .mul(&poch_finite(&a, one, n, cap))
                        .mul(&poch_finite(&q(1), one, n, cap).invert().unwrap())
                },
                cap,
                nmax,
            );
            let rhs = poch_inf(&a.mul(&z), one, cap).unwrap().mul(&poch_inf_pow(&z, one, -1, cap).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn division_agrees_with_inversion() {
        for text in ["(q, q^4; q^5)", "(-q^(1/2), 2*q; q^2)^3", "(q^3; q^3)"] {
            let p = ProductExpr::parse(text).unwrap();
            let inv = ProductExpr::parse(&format!("{text}^-1").replace(")^3^-1", ")^-3")).unwrap();
            let cap = ex(25);
            assert_eq!(inv.eval(cap).unwrap(), p.eval(cap).unwrap().invert().unwrap());
        }
    }

    fn arb_expr() -> impl Strategy<Value = ProductExpr> {
        let factor = (1i64..7, 1i64..7, prop::bool::ANY)
            .prop_map(|(a, n, inv)| Factor::new(Monomial::q_pow(ex(a)), ex(n), if inv { -1 } else { 1 }));
        let term = (prop::collection::vec(factor, 1..4), 1i64..3)
            .prop_map(|(factors, w)| ProductTerm { weight: Scalar::from_int(w), factors });
        term.prop_map(|t| ProductExpr { terms: vec![t] })
    }

    proptest! {
        #[test]
        fn prodmake_inverts_product_eval(p in arb_expr()) {
            let cap = ex(20);
            let s = p.eval(cap).unwrap();
            let lead = s.coeff(ex(0)).unwrap();
            let normalized = s.scale(&lead.inv().unwrap());
            let e = prodmake(&normalized).unwrap();
            prop_assert_eq!(expand_exponents(&e, cap), normalized);
        }
    }
}
