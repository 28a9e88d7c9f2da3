//! Truncated basic hypergeometric series and the classical summation formulas.

use std::collections::HashMap;

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::products::{Factor, ProductExpr};
use crate::qseries::{exponent_on_grid, QSeries};
use crate::report::VerifyReport;
use crate::ring::{lcm, Scalar};
use crate::Exponent;

/// `_rφ_s(upper; lower; p, z)` with `p = q^base_step`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiSpec {
    pub upper: Vec<Monomial>,
    pub lower: Vec<Monomial>,
    pub base_step: Exponent,
    pub argument: Monomial,
}

impl PhiSpec {
    pub fn new(upper: Vec<Monomial>, lower: Vec<Monomial>, argument: Monomial) -> Self {
        PhiSpec { upper, lower, base_step: Exponent::from_integer(1), argument }
    }

    fn excess(&self) -> i64 {
        1 + self.lower.len() as i64 - self.upper.len() as i64
    }
}

/// How the factor `1 − c·q^f` contributes: a unit binomial, a constant, or a
/// monomial times a unit binomial.
enum Piece {
    Trivial,
    Binomial(Scalar, Exponent),
    Constant(Scalar),
    Vanishing,
    Laurent(Monomial, Scalar, Exponent),
}

fn piece(c: &Scalar, f: Exponent) -> Result<Piece> {
    if c.is_zero() {
        return Ok(Piece::Trivial);
    }
    Ok(if f > Exponent::zero() {
        Piece::Binomial(c.clone(), f)
    } else if f.is_zero() {
        let v = &Scalar::one() - c;
        if v.is_zero() {
            Piece::Vanishing
        } else {
            Piece::Constant(v)
        }
    } else {
        Piece::Laurent(Monomial::new(-c.clone(), f), c.inv()?, -f)
    })
}

/// Number of leading terms of the series and the lowest term order among them.
fn term_range(spec: &PhiSpec, cap: Exponent) -> Result<(usize, Exponent)> {
    let step = spec.base_step;
    if step <= Exponent::zero() {
        return Err(Error::InvalidSpec("base step must be positive".into()));
    }
    let g = spec.excess();
    let truncates =
        spec.upper.iter().any(|a| a.coeff.is_one() && a.qexp <= Exponent::zero() && (a.qexp / step).is_integer());
    if !truncates && (g < 0 || (g == 0 && spec.argument.qexp <= Exponent::zero())) {
        return Err(Error::NonTerminating(format!(
            "term orders do not grow: argument order {} with 1+s-r = {g}",
            spec.argument.qexp
        )));
    }
    // every factor has positive order once n reaches `settled`
    let settled = spec
        .upper
        .iter()
        .chain(&spec.lower)
        .map(|m| {
            let k = (-m.qexp / step).floor().to_integer() + 1;
            k.max(0) as usize
        })
        .max()
        .unwrap_or(0);
    let mut order = Exponent::zero();
    let mut min_order = order;
    let mut n: usize = 0;
    loop {
        let stop = n >= settled
            && order > cap
            && Exponent::from_integer(g) * step * Exponent::from_integer(n as i64) + spec.argument.qexp
                > Exponent::zero();
        if stop {
            return Ok((n, min_order));
        }
        if n > 1_000_000 {
            return Err(Error::NonTerminating("more than a million terms below the cap".into()));
        }
        let f_n = step * Exponent::from_integer(n as i64);
        for a in &spec.upper {
            match piece(&a.coeff, a.qexp + f_n)? {
                Piece::Vanishing => return Ok((n + 1, min_order)),
                Piece::Laurent(m, _, _) => order += m.qexp,
                _ => {}
            }
        }
        for b in &spec.lower {
            match piece(&b.coeff, b.qexp + f_n)? {
                Piece::Vanishing => {
                    return Err(Error::PoleInLowerParameter(format!("({b}; q^{step})_n vanishes at n = {}", n + 1)))
                }
                Piece::Laurent(m, _, _) => order -= m.qexp,
                _ => {}
            }
        }
        order += Exponent::from_integer(g) * f_n + spec.argument.qexp;
        min_order = min_order.min(order);
        n += 1;
    }
}

/// `Σ_n (a;p)_n / (p, b;p)_n · ((−1)^n p^{C(n,2)})^{1+s−r} z^n` truncated at `cap`.
pub fn phi_eval(spec: &PhiSpec, cap: Exponent) -> Result<QSeries> {
    let (count, min_order) = term_range(spec, cap)?;
    let step = spec.base_step;
    let g = spec.excess();
    let work = cap - min_order;
    let mut den = lcm(*work.denom(), *cap.denom());
    den = lcm(den, *step.denom());
    den = lcm(den, *spec.argument.qexp.denom());
    for m in spec.upper.iter().chain(&spec.lower) {
        den = lcm(den, *m.qexp.denom());
    }
    let mut unit = QSeries::from_raw(den, exponent_on_grid(work, den), 0, vec![Scalar::one()]);
    let mut lead = Monomial::one();
    let mut acc = QSeries::zero(cap);
    let sign = if g % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
    for n in 0..count {
        if lead.qexp <= cap {
            acc = acc.add(&unit.scale(&lead.coeff).shift(lead.qexp));
        }
        if n + 1 == count {
            break;
        }
        let f_n = step * Exponent::from_integer(n as i64);
        for a in &spec.upper {
            match piece(&a.coeff, a.qexp + f_n)? {
                Piece::Binomial(c, f) => unit.mul_binomial_steps(&c, exponent_on_grid(f, den)),
                Piece::Constant(v) => lead.coeff = &lead.coeff * &v,
                Piece::Laurent(m, c, f) => {
                    lead = lead.mul(&m);
                    unit.mul_binomial_steps(&c, exponent_on_grid(f, den));
                }
                Piece::Trivial | Piece::Vanishing => {}
            }
        }
        for b in &spec.lower {
            match piece(&b.coeff, b.qexp + f_n)? {
                Piece::Binomial(c, f) => unit.div_binomial_steps(&c, exponent_on_grid(f, den)),
                Piece::Constant(v) => lead.coeff = lead.coeff.checked_div(&v)?,
                Piece::Laurent(m, c, f) => {
                    lead = lead.mul(&m.inv()?);
                    unit.div_binomial_steps(&c, exponent_on_grid(f, den));
                }
                Piece::Trivial | Piece::Vanishing => {}
            }
        }
        unit.div_binomial_steps(&Scalar::one(), exponent_on_grid(f_n + step, den));
        lead = lead.mul(&spec.argument);
        lead = lead.mul(&Monomial::new(sign.clone(), Exponent::from_integer(g) * f_n));
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Summation {
    QGauss,
    BaileyDaum,
    QDixon,
    Heine,
}

impl Summation {
    pub const ALL: [Summation; 4] = [Summation::QGauss, Summation::BaileyDaum, Summation::QDixon, Summation::Heine];

    pub fn name(self) -> &'static str {
        match self {
            Summation::QGauss => "q_gauss",
            Summation::BaileyDaum => "bailey_daum",
            Summation::QDixon => "q_dixon",
            Summation::Heine => "heine",
        }
    }

    pub fn params(self) -> &'static [&'static str] {
        match self {
            Summation::QGauss | Summation::QDixon => &["a", "b", "c"],
            Summation::BaileyDaum => &["a", "b"],
            Summation::Heine => &["a", "b", "c", "z"],
        }
    }

    pub fn from_name(s: &str) -> Option<Summation> {
        Summation::ALL.into_iter().find(|w| w.name() == s)
    }
}

fn m(x: &Monomial) -> Monomial {
    x.clone()
}

fn div(a: &Monomial, b: &Monomial) -> Result<Monomial> {
    Ok(a.mul(&b.inv()?))
}

fn q_pow(e: i64) -> Monomial {
    Monomial::q_pow(Exponent::from_integer(e))
}

fn neg(a: &Monomial) -> Monomial {
    Monomial::new(-a.coeff.clone(), a.qexp)
}

/// `∏ (num; q^step)_∞ / ∏ (den; q^step)_∞` as a product side.
pub(crate) fn product_ratio(num: &[(Monomial, i64)], den: &[(Monomial, i64)]) -> ProductExpr {
    let mut factors: Vec<Factor> =
        num.iter().map(|(b, s)| Factor::new(b.clone(), Exponent::from_integer(*s), 1)).collect();
    factors.extend(den.iter().map(|(b, s)| Factor::new(b.clone(), Exponent::from_integer(*s), -1)));
    ProductExpr::single(Scalar::one(), factors)
}

/// Exact square root of a monomial, if one exists in the ring.
pub fn monomial_sqrt(a: &Monomial) -> Option<Monomial> {
    Some(Monomial::new(a.coeff.sqrt()?, a.qexp / Exponent::from_integer(2)))
}

/// Both sides of a summation formula, or the reason it does not apply.
fn summation_sides(
    which: Summation,
    p: &HashMap<String, Monomial>,
    cap: Exponent,
) -> std::result::Result<Result<(QSeries, QSeries)>, String> {
    let get = |n: &str| p.get(n).cloned().ok_or_else(|| format!("parameter {n} is not assigned"));
    let positive = |x: &Monomial, what: &str| {
        if x.qexp > Exponent::zero() {
            Ok(())
        } else {
            Err(format!("argument {what} = {x} needs positive q-order"))
        }
    };
    let inv = |x: &Monomial| x.inv().map_err(|_| "zero parameter in a denominator".to_string());
    let one = Monomial::one();
    let q = q_pow(1);
    match which {
        Summation::QGauss => {
            let (a, b, c) = (get("a")?, get("b")?, get("c")?);
            let z = c.mul(&inv(&a.mul(&b))?);
            positive(&z, "c/ab")?;
            let lhs = || phi_eval(&PhiSpec::new(vec![m(&a), m(&b)], vec![m(&c)], z.clone()), cap);
            let rhs = product_ratio(&[(c.mul(&inv(&a)?), 1), (c.mul(&inv(&b)?), 1)], &[(m(&c), 1), (z.clone(), 1)]);
            Ok(both(lhs, rhs, cap))
        }
        Summation::BaileyDaum => {
            let (a, b) = (get("a")?, get("b")?);
            let z = neg(&q.mul(&inv(&b)?));
            positive(&z, "-q/b")?;
            let aq_b = a.mul(&q).mul(&inv(&b)?);
            let lhs = || phi_eval(&PhiSpec::new(vec![m(&a), m(&b)], vec![aq_b.clone()], z.clone()), cap);
            let rhs = product_ratio(
                &[(neg(&q), 1), (a.mul(&q), 2), (a.mul(&q_pow(2)).mul(&inv(&b.pow(2).unwrap_or(one.clone()))?), 2)],
                &[(aq_b.clone(), 1), (z.clone(), 1)],
            );
            Ok(both(lhs, rhs, cap))
        }
        Summation::QDixon => {
            let (a, b, c) = (get("a")?, get("b")?, get("c")?);
            let r = monomial_sqrt(&a).ok_or_else(|| format!("a = {a} has no exact square root"))?;
            let qr = q.mul(&r);
            let z = qr.mul(&inv(&b.mul(&c))?);
            positive(&z, "q·a^(1/2)/bc")?;
            let aq = a.mul(&q);
            let lhs = || {
                phi_eval(
                    &PhiSpec::new(
                        vec![m(&a), neg(&qr), m(&b), m(&c)],
                        vec![neg(&r), div(&aq, &b)?, div(&aq, &c)?],
                        z.clone(),
                    ),
                    cap,
                )
            };
            let rhs = product_ratio(
                &[
                    (aq.clone(), 1),
                    (div(&qr, &b).map_err(|e| e.to_string())?, 1),
                    (div(&qr, &c).map_err(|e| e.to_string())?, 1),
                    (div(&aq, &b.mul(&c)).map_err(|e| e.to_string())?, 1),
                ],
                &[
                    (div(&aq, &b).map_err(|e| e.to_string())?, 1),
                    (div(&aq, &c).map_err(|e| e.to_string())?, 1),
                    (qr.clone(), 1),
                    (z.clone(), 1),
                ],
            );
            Ok(both(lhs, rhs, cap))
        }
        Summation::Heine => {
            let (a, b, c, z) = (get("a")?, get("b")?, get("c")?, get("z")?);
            positive(&z, "z")?;
            let w = a.mul(&b).mul(&z).mul(&inv(&c)?);
            positive(&w, "abz/c")?;
            let lhs = phi_eval(&PhiSpec::new(vec![m(&a), m(&b)], vec![m(&c)], z.clone()), cap);
            let rhs = (|| {
                let ca = div(&c, &a)?;
                let cb = div(&c, &b)?;
                let inner = phi_eval(&PhiSpec::new(vec![ca, cb], vec![m(&c)], w.clone()), cap)?;
                let pre = product_ratio(&[(w.clone(), 1)], &[(z.clone(), 1)]).eval(cap)?;
                Ok(pre.mul(&inner))
            })();
            Ok(lhs.and_then(|l| rhs.map(|r| (l, r))))
        }
    }
}

fn both(lhs: impl FnOnce() -> Result<QSeries>, rhs: ProductExpr, cap: Exponent) -> Result<(QSeries, QSeries)> {
    let l = lhs()?;
    let r = rhs.eval(cap)?;
    Ok((l, r))
}

/// Checks one summation formula at an assignment of monomials.
pub fn summation_check(which: Summation, assign: &HashMap<String, Monomial>, cap: Exponent) -> VerifyReport {
    let report = VerifyReport::new(which.name(), assign.iter(), cap);
    match summation_sides(which, assign, cap) {
        Err(reason) => report.skip(reason),
        Ok(Err(e)) => report.skip(e.to_string()),
        Ok(Ok((l, r))) => report.compare(&l, &r),
    }
}

fn random_monomial<R: Rng>(rng: &mut R, signs: &[i64], num: std::ops::RangeInclusive<i64>, den: i64) -> Monomial {
    let c = signs[rng.gen_range(0..signs.len())];
    Monomial::new(Scalar::from_int(c), Exponent::new(rng.gen_range(num), den))
}

/// A random assignment that satisfies the formula's formal-convergence conditions.
pub fn sample_assignment<R: Rng>(which: Summation, rng: &mut R) -> HashMap<String, Monomial> {
    loop {
        let den = if rng.gen_bool(0.3) { 2 } else { 1 };
        let mut p = HashMap::new();
        for name in which.params() {
            let mon = match (which, *name) {
                (Summation::QDixon, "a") => {
                    // an exact square: (±1 or i)² · q^{2e}
                    let r = random_monomial(rng, &[1, -1], 0..=3 * den, den);
                    let r = if rng.gen_bool(0.2) { Monomial::new(Scalar::imag_unit(), r.qexp) } else { r };
                    r.pow(2).expect("nonzero")
                }
                (Summation::BaileyDaum, "b") => random_monomial(rng, &[1, -1, 2], -2 * den..=den - 1, den),
                (Summation::Heine, "z") => random_monomial(rng, &[1, -1, 2], 1..=3 * den, den),
                _ => random_monomial(rng, &[1, -1, 2, -2], 0..=5 * den, den),
            };
            p.insert(name.to_string(), mon);
        }
        let cap = Exponent::from_integer(8);
        if summation_sides(which, &p, cap).is_ok_and(|r| r.is_ok()) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::poch_inf_pow;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ex(n: i64) -> Exponent {
        Exponent::from_integer(n)
    }

    fn mono(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    fn assign(pairs: &[(&str, &str)]) -> HashMap<String, Monomial> {
        pairs.iter().map(|(n, v)| (n.to_string(), mono(v))).collect()
    }

    #[test]
    fn euler_case() {
        let z = mono("2*q^(1/2)");
        let s = phi_eval(&PhiSpec::new(vec![mono("0")], vec![], z.clone()), ex(12)).unwrap();
        assert_eq!(s, poch_inf_pow(&z, ex(1), -1, ex(12)).unwrap());
    }

    #[test]
    fn q_gauss_at_small_values() {
        let p = assign(&[("a", "q"), ("b", "q^2"), ("c", "q^5")]);
        let (l, r) = summation_sides(Summation::QGauss, &p, ex(20)).unwrap().unwrap();
        assert_eq!(l, r);
        assert!(summation_check(Summation::QGauss, &p, ex(25)).is_pass());
    }

    #[test]
    fn terminating_series() {
        let spec = PhiSpec::new(vec![mono("q^-2"), mono("q^2")], vec![mono("q^3")], mono("q"));
        assert_eq!(term_range(&spec, ex(30)).unwrap().0, 3);
        let s = phi_eval(&spec, ex(30)).unwrap();
        let one = ex(1);
        let mut manual = QSeries::zero(ex(30));
        for n in 0..3u64 {
            let num = crate::products::poch_finite(&mono("q^-2"), one, n, ex(40)).mul(&crate::products::poch_finite(
                &mono("q^2"),
                one,
                n,
                ex(40),
            ));
            let den = crate::products::poch_finite(&mono("q"), one, n, ex(40)).mul(&crate::products::poch_finite(
                &mono("q^3"),
                one,
                n,
                ex(40),
            ));
            manual = manual.add(&num.mul(&den.invert().unwrap()).shift(ex(n as i64)));
        }
        assert_eq!(s, manual.truncate(ex(30)));
        // q-Chu-Vandermonde: (q;q)_2·q^4/(q^3;q)_2
        assert_eq!(s.valuation(), Some(ex(4)));
    }

    #[test]
    fn preconditions() {
        let err =
            phi_eval(&PhiSpec::new(vec![mono("q"), mono("q")], vec![mono("q^2")], mono("-1")), ex(5)).unwrap_err();
        assert!(matches!(err, Error::NonTerminating(_)));
        let err = phi_eval(&PhiSpec::new(vec![mono("q")], vec![mono("q^-1")], mono("q")), ex(5)).unwrap_err();
        assert!(matches!(err, Error::PoleInLowerParameter(_)));
        // the numerator vanishes first, so the pole is never reached
        let ok = phi_eval(&PhiSpec::new(vec![mono("q^-1")], vec![mono("q^-3")], mono("q")), ex(5));
        assert!(ok.is_ok());
        assert_eq!(
            phi_eval(&PhiSpec::new(vec![mono("q")], vec![mono("q^2")], mono("q^9")), ex(8)).unwrap(),
            QSeries::one(ex(8))
        );
    }

    #[test]
    fn inadmissible_examples_skip() {
        // aq/b = 1 puts a zero in the lower Pochhammer symbol
        let r = summation_check(Summation::BaileyDaum, &assign(&[("a", "q^2"), ("b", "q^3")]), ex(25));
        assert_eq!(r.verdict, crate::report::Verdict::Skip);
        // argument q·a^{1/2}/bc has order 0
        let r = summation_check(Summation::QDixon, &assign(&[("a", "q^4"), ("b", "q"), ("c", "q^2")]), ex(20));
        assert_eq!(r.verdict, crate::report::Verdict::Skip);
        let r = summation_check(Summation::QDixon, &assign(&[("a", "2*q^2"), ("b", "q"), ("c", "q")]), ex(20));
        assert_eq!(r.verdict, crate::report::Verdict::Skip);
    }

    #[test]
    fn admissible_examples_pass() {
        for (which, p) in [
            (Summation::BaileyDaum, assign(&[("a", "q^2"), ("b", "q^(1/2)")])),
            (Summation::BaileyDaum, assign(&[("a", "-q"), ("b", "-1")])),
            (Summation::QDixon, assign(&[("a", "q^4"), ("b", "q^(1/2)"), ("c", "q^(1/2)")])),
            (Summation::QDixon, assign(&[("a", "1"), ("b", "-q^(1/2)"), ("c", "2")])),
            (Summation::Heine, assign(&[("a", "q"), ("b", "-q^2"), ("c", "q^3"), ("z", "q")])),
        ] {
            let r = summation_check(which, &p, ex(20));
            assert!(r.is_pass(), "{r}");
        }
    }

    #[test]
    fn random_admissible_assignments_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for which in Summation::ALL {
            for _ in 0..10 {
                let p = sample_assignment(which, &mut rng);
                let r = summation_check(which, &p, ex(15));
                assert!(r.is_pass(), "{r}");
            }
        }
    }
}
