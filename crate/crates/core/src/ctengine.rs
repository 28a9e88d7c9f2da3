//! Laurent series in `z` with truncated q-series coefficients, the constant
//! term operator and executable versions of the contour-integral formulas.
//!
//! A [`ZLaurent`] stores finitely many slices. The certificate is implicit:
//! every slice that is not stored has q-order above the cap. Factor expansions
//! guarantee it through a lower bound on the order of each slice that grows
//! along both directions of the z-axis.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hyper::{phi_eval, product_ratio, PhiSpec};
use crate::monomial::Monomial;
use crate::products::{Factor, ProductExpr};
use crate::qseries::QSeries;
use crate::report::VerifyReport;
use crate::ring::Scalar;
use crate::Exponent;

/// `(base·z^z_power; q^step)_∞^{±1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSpec {
    pub base: Monomial,
    pub z_power: i64,
    pub step: Exponent,
    pub inverted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZLaurent {
    cap: Exponent,
    slices: BTreeMap<i64, QSeries>,
    /// Largest admissible |z-power| of a stored slice.
    bound: i64,
}

/// `4·(cap + 2)`.
pub fn default_window_bound(cap: Exponent) -> i64 {
    4 * (cap.ceil().to_integer().max(0) + 2)
}

impl FactorSpec {
    pub fn new(base: Monomial, z_power: i64, step: i64, inverted: bool) -> Self {
        FactorSpec { base, z_power, step: Exponent::from_integer(step), inverted }
    }

    /// `(base·z^p; q)_∞`.
    pub fn num(base: Monomial, p: i64) -> Self {
        Self::new(base, p, 1, false)
    }

    /// `1/(base·z^p; q)_∞`.
    pub fn den(base: Monomial, p: i64) -> Self {
        Self::new(base, p, 1, true)
    }

    fn check(&self) -> Result<()> {
        if self.step <= Exponent::zero() {
            return Err(Error::InvalidSpec("factor step must be positive".into()));
        }
        if self.inverted && self.z_power != 0 && !self.base.coeff.is_zero() && self.base.qexp <= Exponent::zero() {
            return Err(Error::DivergentFactor(format!(
                "1/({}·z^{}; q^{})_∞ needs a base of positive q-order",
                self.base, self.z_power, self.step
            )));
        }
        Ok(())
    }

    /// Order of the `n`-th term of the Euler expansion.
    fn term_order(&self, n: i64) -> Exponent {
        let lin = self.base.qexp * Exponent::from_integer(n);
        if self.inverted {
            lin
        } else {
            lin + self.step * Exponent::from_integer(n * (n - 1) / 2)
        }
    }

    /// Lower bound on the q-order of every slice of the expansion.
    pub fn min_order(&self) -> Exponent {
        if self.base.coeff.is_zero() {
            return Exponent::zero();
        }
        if self.z_power != 0 {
            if self.inverted {
                return Exponent::zero();
            }
            // minimum of e·n + s·C(n,2) over n ≥ 0, near the vertex
            let vertex = (Exponent::new(1, 2) - self.base.qexp / self.step).floor().to_integer().max(0);
            return (vertex..=vertex + 1).map(|n| self.term_order(n)).min().unwrap_or_else(Exponent::zero);
        }
        let mut acc = Exponent::zero();
        let mut e = self.base.qexp;
        while e < Exponent::zero() {
            acc += if self.inverted { -e } else { e };
            e += self.step;
        }
        acc
    }

    /// Expansion of the factor alone, complete up to `cap`.
    pub fn expand(&self, cap: Exponent) -> Result<ZLaurent> {
        self.expand_with_bound(cap, default_window_bound(cap))
    }

    fn expand_with_bound(&self, cap: Exponent, bound: i64) -> Result<ZLaurent> {
        self.check()?;
        let mut out = ZLaurent { cap, slices: BTreeMap::new(), bound };
        if self.base.coeff.is_zero() {
            out.slices.insert(0, QSeries::one(cap));
            return Ok(out);
        }
        if self.z_power == 0 {
            let power = if self.inverted { -1 } else { 1 };
            let p = ProductExpr::single(Scalar::one(), vec![Factor::new(self.base.clone(), self.step, power)]);
            out.insert(0, p.eval(cap)?);
            return Ok(out);
        }
        // terms n = 0..count all have order ≤ cap somewhere before the orders start rising past it
        let mut count: i64 = 0;
        loop {
            let rising = self.term_order(count + 1) >= self.term_order(count);
            if rising && self.term_order(count) > cap {
                break;
            }
            count += 1;
            if count.saturating_mul(self.z_power.abs()) > bound {
                return Err(Error::WindowOverflow { needed: count * self.z_power.abs(), max: bound });
            }
        }
        let min = (0..count).map(|n| self.term_order(n)).min().unwrap_or(cap);
        let work = cap - min.min(Exponent::zero());
        // 1/(q^s; q^s)_n at precision `work`, built incrementally
        let mut unit = QSeries::one(work)
            .regrid(*self.step.denom() * *work.denom() / num_integer::gcd(*self.step.denom(), *work.denom()));
        let neg_base = Monomial::new(-self.base.coeff.clone(), self.base.qexp);
        let x = if self.inverted { &self.base } else { &neg_base };
        let mut coeff = Scalar::one();
        for n in 0..count {
            if n > 0 {
                unit = unit.mul_to(&QSeries::one(work), None);
                let s = self.step * Exponent::from_integer(n);
                let steps = (s * Exponent::from_integer(unit.grid_den())).to_integer();
                unit.div_binomial_steps(&Scalar::one(), steps);
                coeff = &coeff * &x.coeff;
            }
            let order = self.term_order(n);
            if order <= cap {
                let slice = unit.scale(&coeff).shift(order).truncate(cap);
                out.insert(self.z_power * n, slice);
            }
        }
        Ok(out)
    }
}

impl ZLaurent {
    pub fn constant(s: QSeries) -> Self {
        let cap = s.cap();
        let mut out = ZLaurent { cap, slices: BTreeMap::new(), bound: default_window_bound(cap) };
        out.insert(0, s);
        out
    }

    /// `c·q^e·z^m`.
    pub fn monomial(m: &Monomial, z_power: i64, cap: Exponent) -> Self {
        let mut out = ZLaurent { cap, slices: BTreeMap::new(), bound: default_window_bound(cap).max(z_power.abs()) };
        out.insert(z_power, QSeries::monomial(m.coeff.clone(), m.qexp, cap));
        out
    }

    fn insert(&mut self, m: i64, s: QSeries) {
        if !s.is_zero() {
            self.slices.insert(m, s);
        }
    }

    pub fn cap(&self) -> Exponent {
        self.cap
    }

    /// Smallest and largest stored z-power.
    pub fn window(&self) -> Option<(i64, i64)> {
        Some((*self.slices.keys().next()?, *self.slices.keys().next_back()?))
    }

    pub fn slices(&self) -> impl Iterator<Item = (i64, &QSeries)> {
        self.slices.iter().map(|(&m, s)| (m, s))
    }

    /// Lower bound on the q-order of every slice, stored or not.
    pub fn min_order(&self) -> Exponent {
        self.slices.values().filter_map(QSeries::valuation).fold(self.cap, Exponent::min)
    }

    /// `[z^m]`; the zero series when the slice is certified absent.
    pub fn constant_term(&self, m: i64) -> QSeries {
        self.slices.get(&m).cloned().unwrap_or_else(|| QSeries::zero(self.cap))
    }

    /// Substitution `z ↦ 1/z`.
    pub fn invert_z(&self) -> ZLaurent {
        ZLaurent {
            cap: self.cap,
            slices: self.slices.iter().map(|(&m, s)| (-m, s.clone())).collect(),
            bound: self.bound,
        }
    }

    pub fn truncate(&self, cap: Exponent) -> ZLaurent {
        let mut out = ZLaurent { cap: cap.min(self.cap), slices: BTreeMap::new(), bound: self.bound };
        for (&m, s) in &self.slices {
            out.insert(m, s.truncate(cap));
        }
        out
    }

    /// Convolution over z-powers. The product is complete up to
    /// `min(cap_a + min_b, cap_b + min_a)`.
    pub fn mul(&self, other: &ZLaurent) -> Result<ZLaurent> {
        let (min_a, min_b) = (self.min_order(), other.min_order());
        let cap = (self.cap + min_b).min(other.cap + min_a);
        let bound = self.bound.max(other.bound);
        let mut acc: BTreeMap<i64, QSeries> = BTreeMap::new();
        let vb: Vec<(i64, &QSeries, Exponent)> =
            other.slices.iter().filter_map(|(&m, s)| Some((m, s, s.valuation()?))).collect();
        for (&ma, sa) in &self.slices {
            let Some(va) = sa.valuation() else { continue };
            for &(mb, sb, vb) in &vb {
                if va + vb > cap {
                    continue;
                }
                let p = sa.mul_to(sb, Some(cap));
                let slot = acc.entry(ma + mb).or_insert_with(|| QSeries::zero(cap));
                *slot = slot.add(&p);
            }
        }
        let mut out = ZLaurent { cap, slices: BTreeMap::new(), bound };
        for (m, s) in acc {
            out.insert(m, s.truncate(cap));
        }
        if let Some((lo, hi)) = out.window() {
            let needed = lo.abs().max(hi.abs());
            if needed > bound {
                return Err(Error::WindowOverflow { needed, max: bound });
            }
        }
        Ok(out)
    }
}

/// Product of factor expansions, complete up to `cap`.
///
/// Factors whose slices can have negative order force the others to be
/// expanded past `cap`, so each factor gets its own working cap.
pub fn expand_product(factors: &[FactorSpec], cap: Exponent) -> Result<ZLaurent> {
    for f in factors {
        f.check()?;
    }
    let mins: Vec<Exponent> = factors.iter().map(|f| f.min_order().min(Exponent::zero())).collect();
    let total: Exponent = mins.iter().copied().sum();
    let bound = default_window_bound(cap - total);
    let mut acc = ZLaurent::constant(QSeries::one(cap - total));
    for (f, m) in factors.iter().zip(&mins) {
        let work = cap - (total - *m);
        acc = acc.mul(&f.expand_with_bound(work, bound)?)?;
    }
    Ok(acc.truncate(cap))
}

/// `[z^m] ∏ factors`.
pub fn constant_term_of(factors: &[FactorSpec], m: i64, cap: Exponent) -> Result<QSeries> {
    Ok(expand_product(factors, cap)?.constant_term(m))
}

/// `(x·z^p, q^s/(x·z^p), q^s; q^s)_∞ = Σ_n (−1)^n q^{s·C(n,2)} x^n z^{pn}` summed directly.
pub fn theta_expand(x: &Monomial, z_power: i64, step: Exponent, cap: Exponent) -> Result<ZLaurent> {
    let mut out = ZLaurent { cap, slices: BTreeMap::new(), bound: default_window_bound(cap) };
    let order = |n: i64| step * Exponent::from_integer(n * (n - 1) / 2) + x.qexp * Exponent::from_integer(n);
    for dir in [1i64, -1] {
        let mut n = if dir > 0 { 0 } else { -1 };
        loop {
            let o = order(n);
            if o > cap && order(n + dir) > o {
                break;
            }
            if (n * z_power).abs() > out.bound {
                return Err(Error::WindowOverflow { needed: (n * z_power).abs(), max: out.bound });
            }
            if o <= cap {
                let sign = if n % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
                let c = &sign * &x.coeff.pow(n)?;
                out.insert(n * z_power, QSeries::monomial(c, o, cap));
            }
            n += dir;
        }
    }
    Ok(out)
}

/// Contour-integral evaluations checked through constant terms in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Master {
    /// Eight-factor integrand; a product times a ₄φ₃ series.
    Phi43,
    /// Denominator bases `a, b` against `α, β`; a pure product.
    Product2x2,
    /// Denominator bases `a, b, c` against `α, β`; a pure product.
    Product3x2,
    /// Balanced five-parameter integrand; a product times a ₂φ₁ series.
    Phi21,
    /// A product times a ₃φ₂ series.
    Phi32,
    /// Two-parameter integrand; the product `(β₁, β₃;q)∞/(q;q)∞`.
    PairProduct,
}

impl Master {
    pub const ALL: [Master; 6] =
        [Master::Phi43, Master::Product2x2, Master::Product3x2, Master::Phi21, Master::Phi32, Master::PairProduct];

    pub fn name(self) -> &'static str {
        match self {
            Master::Phi43 => "phi43",
            Master::Product2x2 => "product_2x2",
            Master::Product3x2 => "product_3x2",
            Master::Phi21 => "phi21",
            Master::Phi32 => "phi32",
            Master::PairProduct => "pair_product",
        }
    }

    pub fn from_name(s: &str) -> Option<Master> {
        Master::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn params(self) -> &'static [&'static str] {
        match self {
            Master::Phi43 => &["a1", "a2", "a3", "b1", "c1", "c2", "c3", "d1"],
            Master::Product2x2 => &["a", "b", "c", "alpha", "beta"],
            Master::Product3x2 => &["a", "b", "c", "alpha", "beta", "gamma"],
            Master::Phi21 => &["alpha1", "alpha2", "beta1", "beta2", "beta3"],
            Master::Phi32 => &["a", "b", "c", "d", "t"],
            Master::PairProduct => &["beta1", "beta3"],
        }
    }
}

/// An integrand and its closed form `product · φ`.
pub struct MasterInstance {
    pub integrand: Vec<FactorSpec>,
    pub product: ProductExpr,
    pub phi: Option<PhiSpec>,
}

type Built = std::result::Result<MasterInstance, String>;

/// Builds the instance, or explains why the assignment is inadmissible.
pub fn master_instance(which: Master, p: &HashMap<String, Monomial>) -> Built {
    let get = |n: &str| p.get(n).cloned().ok_or_else(|| format!("parameter {n} is not assigned"));
    let div = |a: &Monomial, b: &Monomial| -> std::result::Result<Monomial, String> {
        Ok(a.mul(&b.inv().map_err(|_| "zero parameter in a denominator".to_string())?))
    };
    let q = Monomial::q_pow(Exponent::from_integer(1));
    let one = Monomial::one();
    let num = |b: Monomial, zp: i64| FactorSpec::num(b, zp);
    let den = |b: Monomial, zp: i64| FactorSpec::den(b, zp);
    let inst = match which {
        Master::Phi43 => {
            let [a1, a2, a3, b1, c1, c2, c3, d1] = ["a1", "a2", "a3", "b1", "c1", "c2", "c3", "d1"].map(get);
            let (a1, a2, a3, b1, c1, c2, c3, d1) = (a1?, a2?, a3?, b1?, c1?, c2?, c3?, d1?);
            if a1.mul(&a2).mul(&a3).qexp <= c1.mul(&c2).mul(&c3).qexp {
                return Err("needs ord(a1·a2·a3) > ord(c1·c2·c3)".into());
            }
            let integrand = vec![
                num(a1.clone(), 1),
                num(a2.clone(), 1),
                num(a3.clone(), 1),
                num(b1.clone(), -1),
                den(c1.clone(), 1),
                den(c2.clone(), 1),
                den(c3.clone(), 1),
                den(d1.clone(), -1),
            ];
            let bd = div(&b1, &d1)?;
            let product = product_ratio(
                &[(a1.mul(&d1), 1), (a2.mul(&d1), 1), (a3.mul(&d1), 1), (bd.clone(), 1)],
                &[(q.clone(), 1), (c1.mul(&d1), 1), (c2.mul(&d1), 1), (c3.mul(&d1), 1)],
            );
            let phi = PhiSpec::new(
                vec![c1.mul(&d1), c2.mul(&d1), c3.mul(&d1), div(&q.mul(&d1), &b1)?],
                vec![a1.mul(&d1), a2.mul(&d1), a3.mul(&d1)],
                bd,
            );
            MasterInstance { integrand, product, phi: Some(phi) }
        }
        Master::Product2x2 => {
            let (a, b, c, al, be) = (get("a")?, get("b")?, get("c")?, get("alpha")?, get("beta")?);
            let ca = c.mul(&al);
            let integrand = vec![
                num(div(&c, &be)?, 1),
                num(div(&q, &ca)?, 1),
                num(ca.clone(), -1),
                num(div(&q.mul(&be), &c)?, -1),
                den(a.clone(), 1),
                den(b.clone(), 1),
                den(al.clone(), -1),
                den(be.clone(), -1),
            ];
            let product = product_ratio(
                &[
                    (a.mul(&b).mul(&al).mul(&be), 1),
                    (c.clone(), 1),
                    (div(&q, &c)?, 1),
                    (div(&ca, &be)?, 1),
                    (div(&q.mul(&be), &ca)?, 1),
                ],
                &[(a.mul(&al), 1), (a.mul(&be), 1), (b.mul(&al), 1), (b.mul(&be), 1), (q.clone(), 1)],
            );
            MasterInstance { integrand, product, phi: None }
        }
        Master::Product3x2 => {
            let (a, b, c, al, be, ga) = (get("a")?, get("b")?, get("c")?, get("alpha")?, get("beta")?, get("gamma")?);
            if ga.coeff.is_zero() || c.coeff.is_zero() {
                return Err("needs abcαβγ ≠ 0".into());
            }
            let delta = a.mul(&b).mul(&c).mul(&al).mul(&be);
            let ab = al.mul(&be);
            let integrand = vec![
                num(delta.clone(), 1),
                num(div(&q, &ga)?, 1),
                num(ga.clone(), -1),
                num(div(&ga, &ab)?, 1),
                num(div(&q.mul(&ab), &ga)?, -1),
                den(a.clone(), 1),
                den(b.clone(), 1),
                den(c.clone(), 1),
                den(al.clone(), -1),
                den(be.clone(), -1),
            ];
            let product = product_ratio(
                &[
                    (div(&ga, &al)?, 1),
                    (div(&q.mul(&al), &ga)?, 1),
                    (div(&ga, &be)?, 1),
                    (div(&q.mul(&be), &ga)?, 1),
                    (div(&delta, &a)?, 1),
                    (div(&delta, &b)?, 1),
                    (div(&delta, &c)?, 1),
                ],
                &[
                    (a.mul(&al), 1),
                    (a.mul(&be), 1),
                    (b.mul(&al), 1),
                    (b.mul(&be), 1),
                    (c.mul(&al), 1),
                    (c.mul(&be), 1),
                    (q.clone(), 1),
                ],
            );
            MasterInstance { integrand, product, phi: None }
        }
        Master::Phi21 => {
            let (a1, a2, b1, b2, b3) = (get("alpha1")?, get("alpha2")?, get("beta1")?, get("beta2")?, get("beta3")?);
            if a1.mul(&a2) != b1.mul(&b2).mul(&b3) {
                return Err("needs α1·α2 = β1·β2·β3".into());
            }
            let integrand = vec![
                num(a1.clone(), 1),
                num(a2.clone(), 1),
                num(q.clone(), 1),
                num(one.clone(), -1),
                den(b1.clone(), 1),
                den(b2.clone(), 1),
                den(b3.clone(), 1),
            ];
            let r = div(&a1, &b1)?;
            let product = product_ratio(&[(b1.clone(), 1), (r.clone(), 1)], &[(q.clone(), 1)]);
            let phi = PhiSpec::new(vec![div(&a2, &b2)?, div(&a2, &b3)?], vec![b1.clone()], r);
            MasterInstance { integrand, product, phi: Some(phi) }
        }
        Master::Phi32 => {
            let (a, b, c, d, t) = (get("a")?, get("b")?, get("c")?, get("d")?, get("t")?);
            let integrand = vec![
                num(a.mul(&b), 1),
                num(c.clone(), 1),
                num(div(&q, &t)?, 1),
                num(t.clone(), -1),
                den(a.clone(), 1),
                den(b.clone(), 1),
                den(div(&c, &t)?, 1),
                den(d.clone(), -1),
            ];
            let abd = a.mul(&b).mul(&d);
            let cdt = div(&c.mul(&d), &t)?;
            let product = product_ratio(
                &[(abd.clone(), 1), (div(&d.mul(&q), &t)?, 1), (t.clone(), 1), (c.clone(), 1)],
                &[(q.clone(), 1), (a.mul(&d), 1), (b.mul(&d), 1), (cdt.clone(), 1)],
            );
            let phi = PhiSpec::new(vec![a.clone(), b.clone(), cdt], vec![c.clone(), abd], t.clone());
            MasterInstance { integrand, product, phi: Some(phi) }
        }
        Master::PairProduct => {
            let (b1, b3) = (get("beta1")?, get("beta3")?);
            let integrand = vec![
                num(b1.mul(&b3), 1),
                num(q.clone(), 1),
                num(one.clone(), -1),
                den(b1.clone(), 1),
                den(b3.clone(), 1),
            ];
            let product = product_ratio(&[(b1.clone(), 1), (b3.clone(), 1)], &[(q.clone(), 1)]);
            MasterInstance { integrand, product, phi: None }
        }
    };
    for f in &inst.integrand {
        f.check().map_err(|e| e.to_string())?;
    }
    Ok(inst)
}

impl MasterInstance {
    pub fn sides(&self, cap: Exponent) -> Result<(QSeries, QSeries)> {
        let mut rhs = self.product.eval(cap)?;
        if let Some(phi) = &self.phi {
            // the φ series may carry negative orders, so evaluate it past the cap
            let v = rhs.valuation().unwrap_or(Exponent::zero()).min(Exponent::zero());
            let s = phi_eval(phi, cap - v)?;
            let p = self.product.eval(cap - s.valuation().unwrap_or(Exponent::zero()).min(Exponent::zero()))?;
            rhs = p.mul(&s).truncate(cap);
        }
        let lhs = constant_term_of(&self.integrand, 0, cap)?;
        Ok((lhs, rhs))
    }
}

/// Checks one contour-integral formula at an assignment.
pub fn master_check(which: Master, assign: &HashMap<String, Monomial>, cap: Exponent) -> VerifyReport {
    let report = VerifyReport::new(which.name(), assign.iter(), cap);
    match master_instance(which, assign) {
        Err(reason) => report.skip(reason),
        Ok(inst) => match inst.sides(cap) {
            Ok((l, r)) => report.compare(&l, &r),
            Err(e) => report.skip(e.to_string()),
        },
    }
}

fn rand_mono<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Monomial {
    let signs = [1, 1, -1, 2];
    let c = Scalar::from_int(signs[rng.gen_range(0..signs.len())]);
    Monomial::new(c, Exponent::new(rng.gen_range(lo * den..=hi * den), den))
}

/// A random admissible assignment for the formula.
pub fn sample_master<R: Rng>(which: Master, rng: &mut R) -> HashMap<String, Monomial> {
    loop {
        let den = if rng.gen_bool(0.3) { 2 } else { 1 };
        let mut p: HashMap<String, Monomial> = HashMap::new();
        let set = |p: &mut HashMap<String, Monomial>, n: &str, m: Monomial| {
            p.insert(n.to_string(), m);
        };
        match which {
            Master::Phi43 => {
                for n in ["a1", "a2", "a3", "b1"] {
                    set(&mut p, n, rand_mono(rng, 0, 3, den));
                }
                for n in ["c1", "c2", "c3"] {
                    set(&mut p, n, rand_mono(rng, 0, 1, den));
                }
                set(&mut p, "d1", rand_mono(rng, 0, 2, den));
            }
            Master::Product2x2 | Master::Product3x2 | Master::Phi32 => {
                for n in which.params() {
                    set(&mut p, n, rand_mono(rng, 0, 3, den));
                }
            }
            Master::Phi21 => {
                let b: Vec<Monomial> = (0..3).map(|_| rand_mono(rng, 0, 2, den)).collect();
                let a1 = rand_mono(rng, 0, 3, den);
                let prod = b[0].mul(&b[1]).mul(&b[2]);
                let Ok(a2) = a1.inv().map(|i| prod.mul(&i)) else { continue };
                set(&mut p, "alpha1", a1);
                set(&mut p, "alpha2", a2);
                for (n, m) in ["beta1", "beta2", "beta3"].iter().zip(b) {
                    set(&mut p, n, m);
                }
            }
            Master::PairProduct => {
                set(&mut p, "beta1", rand_mono(rng, 0, 2, den));
                set(&mut p, "beta3", rand_mono(rng, 0, 2, den));
            }
        }
        let Ok(inst) = master_instance(which, &p) else { continue };
        if inst.sides(Exponent::from_integer(4)).is_ok() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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

    fn jtp() -> Vec<FactorSpec> {
        vec![FactorSpec::new(mono("q"), 0, 1, false), FactorSpec::num(mono("1"), 1), FactorSpec::num(mono("q"), -1)]
    }

    #[test]
    fn factor_expansion_slices() {
        let f = FactorSpec::num(mono("q"), 1).expand(ex(10)).unwrap();
        assert_eq!(f.constant_term(1).valuation(), Some(ex(1)));
        assert_eq!(f.constant_term(1).coeff(ex(1)).unwrap(), Scalar::from_int(-1));
        let g = FactorSpec::den(mono("q"), 1).expand(ex(10)).unwrap();
        assert_eq!(g.constant_term(0), QSeries::one(ex(10)));
        assert!(matches!(FactorSpec::den(mono("1"), 1).expand(ex(5)), Err(Error::DivergentFactor(_))));
    }

    #[test]
    fn jacobi_triple_product_slices() {
        let cap = ex(20);
        let prod = expand_product(&jtp(), cap).unwrap();
        let theta = theta_expand(&mono("1"), 1, ex(1), cap).unwrap();
        assert_eq!(prod, theta);
        assert_eq!(prod.constant_term(0), QSeries::one(cap));
        assert_eq!(prod.constant_term(1), QSeries::constant(Scalar::from_int(-1), cap));
        for m in -5i64..=5 {
            let s = prod.constant_term(m);
            assert_eq!(s.num_terms(), 1);
            assert_eq!(s.valuation(), Some(ex(m * (m - 1) / 2)));
        }
    }

    #[test]
    fn unit_and_degenerate_products() {
        let cap = ex(10);
        let f = FactorSpec::den(mono("q^(1/2)"), 2).expand(cap).unwrap();
        assert_eq!(f.mul(&ZLaurent::constant(QSeries::one(cap))).unwrap(), f);
        let z = ZLaurent::monomial(&mono("1"), 1, cap).mul(&ZLaurent::monomial(&mono("1"), -1, cap)).unwrap();
        assert_eq!(z.window(), Some((0, 0)));
        assert_eq!(z.constant_term(0), QSeries::one(cap));
    }

    #[test]
    fn two_theta_constant_term() {
        // [z^0] (q, uz, q/(uz); q)_∞ (q^a, z, q^a/z; q^a)_∞ at u = q, a = 2
        let cap = ex(20);
        let factors = vec![
            FactorSpec::new(mono("q"), 0, 1, false),
            FactorSpec::num(mono("q"), 1),
            FactorSpec::num(mono("1"), -1),
            FactorSpec::new(mono("q^2"), 0, 2, false),
            FactorSpec::new(mono("1"), 1, 2, false),
            FactorSpec::new(mono("q^2"), -1, 2, false),
        ];
        let lhs = constant_term_of(&factors, 0, cap).unwrap();
        let rhs = ProductExpr::parse("(-q^3, -1, q^3; q^3)").unwrap().eval(cap).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn certificate_is_stable() {
        let factors = vec![
            FactorSpec::num(mono("q^2"), 1),
            FactorSpec::num(mono("-q^-1"), -1),
            FactorSpec::den(mono("q^(1/2)"), 1),
            FactorSpec::den(mono("2*q"), -1),
        ];
        let a = expand_product(&factors, ex(12)).unwrap();
        let b = expand_product(&factors, ex(16)).unwrap().truncate(ex(12));
        for m in -4..=4 {
            assert_eq!(a.constant_term(m), b.constant_term(m));
        }
        let flipped: Vec<FactorSpec> =
            factors.iter().map(|f| FactorSpec { z_power: -f.z_power, ..f.clone() }).collect();
        let c = expand_product(&flipped, ex(12)).unwrap();
        assert_eq!(c, a.invert_z());
    }

    #[test]
    fn window_overflow() {
        let f = FactorSpec::den(mono("q^(1/24)"), 1);
        assert!(matches!(f.expand(ex(30)), Err(Error::WindowOverflow { .. })));
    }

    #[test]
    fn worked_examples() {
        let cases = [
            (
                Master::Phi21,
                assign(&[("alpha1", "q^3"), ("alpha2", "q^3"), ("beta1", "q^2"), ("beta2", "q^2"), ("beta3", "q^2")]),
            ),
            (Master::PairProduct, assign(&[("beta1", "q"), ("beta3", "q^2")])),
            (Master::Phi32, assign(&[("a", "0"), ("b", "q"), ("c", "0"), ("d", "q"), ("t", "q^(1/2)")])),
        ];
        for (which, p) in cases {
            let r = master_check(which, &p, ex(20));
            assert!(r.is_pass(), "{r}");
        }
        let r = master_check(
            Master::Phi21,
            &assign(&[("alpha1", "q^3"), ("alpha2", "q^3"), ("beta1", "q^2"), ("beta2", "q^2"), ("beta3", "q")]),
            ex(10),
        );
        assert_eq!(r.verdict, crate::report::Verdict::Skip);
    }

    #[test]
    fn random_masters_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for which in Master::ALL {
            for _ in 0..3 {
                let p = sample_master(which, &mut rng);
                let r = master_check(which, &p, ex(10));
                assert!(r.is_pass(), "{r}");
            }
        }
    }
}
