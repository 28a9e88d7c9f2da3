//! Multi-sum "sum sides": `Σ_{i ∈ region} i^{T(i)} q^{Q(i)} ∏_p x_p^{M_p(i)} / ∏_j (q^{n_j}; q^{n_j})_{L_j(i)}`.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::parse::{exponent_str, parse_exponent_str, Cursor};
use crate::qseries::{QSeries, DEFAULT_MAX_GRID};
use crate::ring::{lcm, Scalar};
use crate::Exponent;

/// `Q(i) = Σ_a Σ_b M[a][b]·i_a·i_b + Σ_a l_a·i_a + c` with `M` symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadForm {
    pub matrix: Vec<Vec<Exponent>>,
    pub linear: Vec<Exponent>,
    pub constant: Exponent,
}

/// `Σ_a coeffs[a]·i_a + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearForm {
    pub coeffs: Vec<i64>,
    #[serde(default)]
    pub constant: i64,
}

/// `(q^modulus; q^modulus)_{form(i)}` in the denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subscript {
    #[serde(with = "crate::parse::serde_exponent")]
    pub modulus: Exponent,
    pub form: LinearForm,
}

/// Parameter `name` raised to `form(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamForm {
    pub name: String,
    pub form: LinearForm,
}

/// A constant raised to a linear form, left over after folding parameters
/// whose coefficient is not a power of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffFactor {
    pub coeff: Scalar,
    pub form: LinearForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumSideSpec {
    pub k: usize,
    pub quad: QuadForm,
    pub unit_form: QuadForm,
    #[serde(default)]
    pub subscripts: Vec<Subscript>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<ParamForm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeff_factors: Vec<CoeffFactor>,
    /// Region restriction `form(i) = 0`, produced by folding a zero parameter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_forms: Vec<LinearForm>,
}

/// A sum of specs sharing one product side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSide {
    pub components: Vec<SumSideSpec>,
}

impl QuadForm {
    pub fn zero(k: usize) -> Self {
        QuadForm {
            matrix: vec![vec![Exponent::zero(); k]; k],
            linear: vec![Exponent::zero(); k],
            constant: Exponent::zero(),
        }
    }

    pub fn eval(&self, i: &[i64]) -> Exponent {
        let mut acc = self.constant;
        for a in 0..i.len() {
            if i[a] == 0 {
                continue;
            }
            let ia = Exponent::from_integer(i[a]);
            acc += self.linear[a] * ia;
            for b in 0..i.len() {
                if i[b] != 0 {
                    acc += self.matrix[a][b] * ia * Exponent::from_integer(i[b]);
                }
            }
        }
        acc
    }

    pub fn add_linear(&mut self, form: &LinearForm, scale: Exponent) {
        for (l, &c) in self.linear.iter_mut().zip(&form.coeffs) {
            *l += scale * Exponent::from_integer(c);
        }
        self.constant += scale * Exponent::from_integer(form.constant);
    }

    /// Parses a polynomial of degree at most two in the given variables.
    pub fn parse(text: &str, vars: &[&str]) -> Result<QuadForm> {
        let poly = parse_poly(text, vars)?;
        let k = vars.len();
        let mut q = QuadForm::zero(k);
        for (mono, c) in poly {
            let deg: u32 = mono.iter().sum();
            let idx: Vec<usize> =
                mono.iter().enumerate().flat_map(|(a, &p)| std::iter::repeat_n(a, p as usize)).collect();
            match deg {
                0 => q.constant += c,
                1 => q.linear[idx[0]] += c,
                2 if idx[0] == idx[1] => q.matrix[idx[0]][idx[0]] += c,
                2 => {
                    let half = c / Exponent::from_integer(2);
                    q.matrix[idx[0]][idx[1]] += half;
                    q.matrix[idx[1]][idx[0]] += half;
                }
                _ => return Err(Error::parse("polynomial has degree above two", text, 0)),
            }
        }
        Ok(q)
    }

    /// Common denominator of the values on integer points.
    fn value_den(&self) -> i64 {
        let mut d = *self.constant.denom();
        for (a, row) in self.matrix.iter().enumerate() {
            d = lcm(d, *self.linear[a].denom());
            for (b, m) in row.iter().enumerate() {
                let v = if a == b { *m } else { *m * Exponent::from_integer(2) };
                d = lcm(d, *v.denom());
            }
        }
        d
    }

    /// Integer coefficients of `den·Q` as (diagonal, off-diagonal pairs, linear, constant).
    fn scaled(&self, den: i64) -> ScaledQuad {
        let s = |e: Exponent| {
            let v = e * Exponent::from_integer(den);
            debug_assert!(v.is_integer());
            v.to_integer()
        };
        let k = self.linear.len();
        let mut pairs = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let v = s(self.matrix[a][b] * Exponent::from_integer(2));
                if v != 0 {
                    pairs.push((a, b, v));
                }
            }
        }
        ScaledQuad {
            diag: (0..k).map(|a| s(self.matrix[a][a])).collect(),
            pairs,
            linear: self.linear.iter().map(|&l| s(l)).collect(),
            constant: s(self.constant),
        }
    }
}

struct ScaledQuad {
    diag: Vec<i64>,
    pairs: Vec<(usize, usize, i64)>,
    linear: Vec<i64>,
    constant: i64,
}

impl ScaledQuad {
    fn eval(&self, i: &[i64]) -> i64 {
        let mut acc = self.constant;
        for a in 0..i.len() {
            acc += i[a] * (self.diag[a] * i[a] + self.linear[a]);
        }
        for &(a, b, v) in &self.pairs {
            acc += v * i[a] * i[b];
        }
        acc
    }
}

impl LinearForm {
    pub fn new(coeffs: Vec<i64>, constant: i64) -> Self {
        LinearForm { coeffs, constant }
    }

    /// The coordinate `i_a` among `k` indices.
    pub fn var(k: usize, a: usize) -> Self {
        let mut coeffs = vec![0; k];
        coeffs[a] = 1;
        LinearForm { coeffs, constant: 0 }
    }

    pub fn eval(&self, i: &[i64]) -> i64 {
        self.coeffs.iter().zip(i).map(|(c, x)| c * x).sum::<i64>() + self.constant
    }

    /// Parses an integer linear form such as `i - 2*j + 3*k`.
    pub fn parse(text: &str, vars: &[&str]) -> Result<LinearForm> {
        let q = QuadForm::parse(text, vars)?;
        let int = |e: Exponent| {
            e.is_integer()
                .then(|| e.to_integer())
                .ok_or_else(|| Error::parse("linear form needs integer coefficients", text, 0))
        };
        if q.matrix.iter().flatten().any(|m| !m.is_zero()) {
            return Err(Error::parse("linear form has quadratic terms", text, 0));
        }
        Ok(LinearForm { coeffs: q.linear.iter().map(|&l| int(l)).collect::<Result<_>>()?, constant: int(q.constant)? })
    }
}

impl SumSideSpec {
    /// Plain sum `Σ q^{Q(i)} / ∏ (q^{n_a}; q^{n_a})_{i_a}` with no unit factor.
    pub fn new(quad: QuadForm, moduli: &[i64]) -> Self {
        let k = quad.linear.len();
        SumSideSpec {
            k,
            unit_form: QuadForm::zero(k),
            subscripts: moduli
                .iter()
                .enumerate()
                .map(|(a, &n)| Subscript { modulus: Exponent::from_integer(n), form: LinearForm::var(k, a) })
                .collect(),
            quad,
            params: Vec::new(),
            coeff_factors: Vec::new(),
            zero_forms: Vec::new(),
        }
    }

    pub fn with_unit(mut self, unit_form: QuadForm) -> Self {
        self.unit_form = unit_form;
        self
    }

    pub fn with_param(mut self, name: &str, form: LinearForm) -> Self {
        self.params.push(ParamForm { name: name.to_string(), form });
        self
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    /// Structural checks, including integrality of `T` on a sample of region points.
    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        let bad = |what: &str| Err(Error::InvalidSpec(format!("{what} has the wrong number of indices")));
        if self.quad.linear.len() != k || self.quad.matrix.len() != k || self.quad.matrix.iter().any(|r| r.len() != k) {
            return bad("quadratic form");
        }
        if self.unit_form.linear.len() != k || self.unit_form.matrix.len() != k {
            return bad("unit form");
        }
        for a in 0..k {
            for b in 0..k {
                if self.quad.matrix[a][b] != self.quad.matrix[b][a]
                    || self.unit_form.matrix[a][b] != self.unit_form.matrix[b][a]
                {
                    return Err(Error::InvalidSpec("quadratic matrix is not symmetric".into()));
                }
            }
        }
        for s in &self.subscripts {
            if s.form.coeffs.len() != k {
                return bad("subscript");
            }
            if s.modulus <= Exponent::zero() {
                return Err(Error::InvalidSpec("subscript modulus must be positive".into()));
            }
        }
        for p in &self.params {
            if p.form.coeffs.len() != k {
                return bad("parameter form");
            }
        }
        let mut sample = vec![0i64; k];
        for n in 0..(3usize.pow(k.min(5) as u32)) {
            let mut m = n;
            for x in sample.iter_mut() {
                *x = (m % 3) as i64;
                m /= 3;
            }
            if self.in_region(&sample) && !self.unit_form.eval(&sample).is_integer() {
                return Err(Error::InvalidSpec(format!("unit form is not an integer at {sample:?}")));
            }
        }
        Ok(())
    }

    fn in_region(&self, i: &[i64]) -> bool {
        self.subscripts.iter().all(|s| s.form.eval(i) >= 0) && self.zero_forms.iter().all(|z| z.eval(i) == 0)
    }
}

/// Absorbs parameter values into the quadratic form, the unit form and
/// residual constant factors.
pub fn fold_params(spec: &SumSideSpec, assign: &HashMap<String, Monomial>) -> Result<SumSideSpec> {
    fold_params_with_max(spec, assign, DEFAULT_MAX_GRID)
}

pub fn fold_params_with_max(
    spec: &SumSideSpec,
    assign: &HashMap<String, Monomial>,
    max_grid: i64,
) -> Result<SumSideSpec> {
    let mut out = spec.clone();
    out.params.clear();
    for p in &spec.params {
        let m = assign
            .get(&p.name)
            .ok_or_else(|| Error::InvalidSpec(format!("no value assigned to parameter {:?}", p.name)))?;
        if m.coeff.is_zero() {
            out.zero_forms.push(p.form.clone());
            continue;
        }
        out.quad.add_linear(&p.form, m.qexp);
        if let Some(t) = m.coeff.as_unit_power() {
            out.unit_form.add_linear(&p.form, Exponent::from_integer(t));
        } else {
            out.coeff_factors.push(CoeffFactor { coeff: m.coeff.clone(), form: p.form.clone() });
        }
    }
    let den = grid_den(&out);
    if den > max_grid {
        return Err(Error::GridOverflow { den, max: max_grid });
    }
    Ok(out)
}

/// Denominator of the q-grid the sum lives on before parameters are folded in.
pub fn grid_den(spec: &SumSideSpec) -> i64 {
    spec.subscripts.iter().fold(spec.quad.value_den(), |d, s| lcm(d, *s.modulus.denom()))
}

/// Layers above the cap required before enumeration stops.
const STREAK: usize = 3;
/// Earlier layers a stopping layer must not undercut.
const WINDOW: usize = 6;
/// Upper bound on enumerated lattice points.
const POINT_BUDGET: u64 = 20_000_000;

/// Lattice points of the region with `E(i) ≤ cap`, in lexicographic order,
/// paired with their scaled exponent `den·E(i)`.
fn enumerate_points(
    spec: &SumSideSpec,
    quad: &ScaledQuad,
    cap_idx: i64,
    cap: Exponent,
) -> Result<Vec<(Vec<i64>, i64)>> {
    let k = spec.k;
    let mut points = Vec::new();
    if k == 0 {
        let e = quad.constant;
        if e <= cap_idx && spec.in_region(&[]) {
            points.push((Vec::new(), e));
        }
        return Ok(points);
    }
    let max_layer = 64 * (cap.ceil().to_integer().max(0) + 1);
    let mut above = 0usize;
    // layer minima can oscillate along null directions, so compare with a window
    let mut recent: std::collections::VecDeque<i64> = std::collections::VecDeque::new();
    let mut visited: u64 = 0;
    let mut cur = vec![0i64; k];
    for w in 0..=max_layer {
        let mut layer_min: Option<i64> = None;
        for_each_composition(&mut cur, w, &mut |i| {
            if !spec.in_region(i) {
                return;
            }
            let e = quad.eval(i);
            layer_min = Some(layer_min.map_or(e, |m: i64| m.min(e)));
            if e <= cap_idx {
                points.push((i.to_vec(), e));
            }
        });
        visited += layer_size(k, w);
        if visited > POINT_BUDGET {
            return Err(Error::NonTerminating(format!("more than {POINT_BUDGET} lattice points below layer {w}")));
        }
        let min = layer_min.unwrap_or(i64::MAX);
        let rising = recent.iter().min().is_none_or(|&p| min >= p);
        if min > cap_idx && rising {
            above += 1;
            if above >= STREAK {
                points.sort();
                return Ok(points);
            }
        } else {
            above = 0;
        }
        recent.push_back(min);
        if recent.len() > WINDOW {
            recent.pop_front();
        }
    }
    Err(Error::NonTerminating(format!("terms with exponent ≤ {cap} persist past index weight {max_layer}")))
}

fn layer_size(k: usize, w: i64) -> u64 {
    // C(w + k − 1, k − 1), saturating
    let mut acc: u64 = 1;
    for t in 1..k as u64 {
        acc = acc.saturating_mul(w as u64 + t) / t;
    }
    acc
}

fn for_each_composition(cur: &mut [i64], w: i64, f: &mut dyn FnMut(&[i64])) {
    fn rec(cur: &mut [i64], pos: usize, rest: i64, f: &mut dyn FnMut(&[i64])) {
        if pos + 1 == cur.len() {
            cur[pos] = rest;
            f(cur);
            return;
        }
        for v in 0..=rest {
            cur[pos] = v;
            rec(cur, pos + 1, rest - v, f);
        }
    }
    rec(cur, 0, w, f);
}

/// Dense coefficients of `1/∏ (q^{s_j}; q^{s_j})_{L_j}` up to grid index `width`.
fn inverse_poch_block(key: &[(i64, i64)], width: i64) -> Result<Vec<i128>> {
    let len = width as usize + 1;
    let mut v = vec![0i128; len];
    v[0] = 1;
    for &(step, l) in key {
        for m in 1..=l {
            let s = (m * step) as usize;
            if s >= len {
                break;
            }
            for t in s..len {
                let add = v[t - s];
                if add != 0 {
                    v[t] = v[t].checked_add(add).ok_or(Error::CoefficientOverflow)?;
                }
            }
        }
    }
    Ok(v)
}

impl SumSideSpec {
    /// Exact truncated sum of every term with exponent at most `cap`.
    pub fn eval(&self, assign: &HashMap<String, Monomial>, cap: Exponent) -> Result<QSeries> {
        sum_side_eval(self, assign, cap)
    }
}

pub fn sum_side_eval(spec: &SumSideSpec, assign: &HashMap<String, Monomial>, cap: Exponent) -> Result<QSeries> {
    spec.validate()?;
    let folded = fold_params(spec, assign)?;
    eval_folded(&folded, cap)
}

/// Capped Pochhammer lengths with their steps, and the room below the cap.
type BlockKey = (Vec<(i64, i64)>, i64);

fn eval_folded(spec: &SumSideSpec, cap: Exponent) -> Result<QSeries> {
    let den = lcm(grid_den(spec), *cap.denom());
    let cap_idx = (cap * Exponent::from_integer(den)).to_integer();
    let quad = spec.quad.scaled(den);
    let points = enumerate_points(spec, &quad, cap_idx, cap)?;
    if points.is_empty() {
        return Ok(QSeries::zero_on_grid(den, cap));
    }
    let low = points.iter().map(|(_, e)| *e).min().unwrap_or(0);
    let width = (cap_idx - low) as usize + 1;
    let steps: Vec<i64> =
        spec.subscripts.iter().map(|s| (s.modulus * Exponent::from_integer(den)).to_integer()).collect();

    let mut blocks: HashMap<BlockKey, Vec<i128>> = HashMap::new();
    let mut units: HashMap<(i64, Vec<i64>), Scalar> = HashMap::new();
    let mut groups: HashMap<Scalar, Vec<i128>> = HashMap::new();
    let mut order: Vec<Scalar> = Vec::new();
    for (i, e) in &points {
        let room = cap_idx - e;
        let mut key: Vec<(i64, i64)> = spec
            .subscripts
            .iter()
            .zip(&steps)
            .map(|(s, &st)| (st, s.form.eval(i).min(room / st)))
            .filter(|&(_, l)| l > 0)
            .collect();
        key.sort_unstable();
        let block_key = (key, room);
        if !blocks.contains_key(&block_key) {
            let b = inverse_poch_block(&block_key.0, room)?;
            blocks.insert(block_key.clone(), b);
        }
        let block = &blocks[&block_key];

        let t = spec.unit_form.eval(i);
        if !t.is_integer() {
            return Err(Error::InvalidSpec(format!("unit form is not an integer at {i:?}")));
        }
        let t = t.to_integer().mod_floor(&4);
        let powers: Vec<i64> = spec.coeff_factors.iter().map(|c| c.form.eval(i)).collect();
        let ukey = (t, powers);
        let coeff = match units.get(&ukey) {
            Some(c) => c.clone(),
            None => {
                let mut c = Scalar::unit_power(t);
                for (cf, &p) in spec.coeff_factors.iter().zip(&ukey.1) {
                    c = &c * &cf.coeff.pow(p)?;
                }
                units.insert(ukey, c.clone());
                c
            }
        };
        let acc = groups.entry(coeff.clone()).or_insert_with(|| {
            order.push(coeff);
            vec![0i128; width]
        });
        let off = (e - low) as usize;
        for (t, &v) in block.iter().enumerate() {
            if v != 0 {
                let slot = &mut acc[off + t];
                *slot = slot.checked_add(v).ok_or(Error::CoefficientOverflow)?;
            }
        }
    }
    let mut out = QSeries::zero_on_grid(den, cap);
    for c in &order {
        let dense = &groups[c];
        out = out.add(&QSeries::from_int_coeffs(den, cap_idx, low, dense, c));
    }
    Ok(out.reduce_grid())
}

impl SumSide {
    pub fn single(spec: SumSideSpec) -> Self {
        SumSide { components: vec![spec] }
    }

    pub fn eval(&self, assign: &HashMap<String, Monomial>, cap: Exponent) -> Result<QSeries> {
        let mut acc = QSeries::zero(cap);
        for c in &self.components {
            acc = acc.add(&sum_side_eval(c, assign, cap)?);
        }
        Ok(acc)
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.components.iter().flat_map(|c| c.param_names()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidSpec("sum side has no components".into()));
        }
        self.components.iter().try_for_each(SumSideSpec::validate)
    }
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    matrix: Vec<Vec<String>>,
    linear: Vec<String>,
    constant: String,
}

impl Serialize for QuadForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadRepr {
            matrix: self.matrix.iter().map(|r| r.iter().map(exponent_str).collect()).collect(),
            linear: self.linear.iter().map(exponent_str).collect(),
            constant: exponent_str(&self.constant),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QuadRepr::deserialize(d)?;
        let p = |s: &String| parse_exponent_str(s).map_err(serde::de::Error::custom);
        Ok(QuadForm {
            matrix: r.matrix.iter().map(|row| row.iter().map(p).collect()).collect::<std::result::Result<_, _>>()?,
            linear: r.linear.iter().map(p).collect::<std::result::Result<_, _>>()?,
            constant: p(&r.constant)?,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SumSideRepr {
    One(Box<SumSideSpec>),
    Many(Vec<SumSideSpec>),
}

impl Serialize for SumSide {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.components.len() == 1 {
            self.components[0].serialize(s)
        } else {
            self.components.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for SumSide {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let components = match SumSideRepr::deserialize(d)? {
            SumSideRepr::One(s) => vec![*s],
            SumSideRepr::Many(v) => v,
        };
        if components.is_empty() {
            return Err(serde::de::Error::custom("sum side has no components"));
        }
        Ok(SumSide { components })
    }
}

type Poly = BTreeMap<Vec<u32>, Exponent>;

fn poly_const(k: usize, c: Exponent) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(vec![0; k], c);
    }
    p
}

fn poly_add(a: &Poly, b: &Poly, sign: i64) -> Poly {
    let mut out = a.clone();
    for (m, c) in b {
        let e = out.entry(m.clone()).or_insert_with(Exponent::zero);
        *e += *c * Exponent::from_integer(sign);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (m1, c1) in a {
        for (m2, c2) in b {
            let m: Vec<u32> = m1.iter().zip(m2).map(|(x, y)| x + y).collect();
            *out.entry(m).or_insert_with(Exponent::zero) += *c1 * *c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn as_constant(p: &Poly) -> Option<Exponent> {
    match p.len() {
        0 => Some(Exponent::zero()),
        1 => p.iter().next().filter(|(m, _)| m.iter().all(|&x| x == 0)).map(|(_, c)| *c),
        _ => None,
    }
}

/// Polynomial with rational coefficients: `+ - * /` (division by constants
/// only), `^` with a small exponent, parentheses and `C(expr, n)` for binomials.
pub(crate) fn parse_poly(text: &str, vars: &[&str]) -> Result<Poly> {
    let mut cur = Cursor::new(text);
    let p = poly_expr(&mut cur, vars)?;
    cur.finish()?;
    Ok(p)
}

fn poly_expr(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<Poly> {
    let mut acc = if cur.eat('-') { poly_add(&Poly::new(), &poly_term(cur, vars)?, -1) } else { poly_term(cur, vars)? };
    loop {
        if cur.eat('+') {
            acc = poly_add(&acc, &poly_term(cur, vars)?, 1);
        } else if cur.eat('-') {
            acc = poly_add(&acc, &poly_term(cur, vars)?, -1);
        } else {
            return Ok(acc);
        }
    }
}

fn poly_term(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<Poly> {
    let mut acc = poly_power(cur, vars)?;
    loop {
        if cur.eat('*') {
            acc = poly_mul(&acc, &poly_power(cur, vars)?);
        } else if cur.eat('/') {
            let at = cur.pos;
            let d = poly_power(cur, vars)?;
            match as_constant(&d) {
                Some(c) if !c.is_zero() => acc = poly_mul(&acc, &poly_const(vars.len(), c.recip())),
                _ => {
                    cur.pos = at;
                    return Err(cur.error("division by a non-constant or zero"));
                }
            }
        } else if matches!(cur.peek(), Some(c) if c == '(' || c.is_ascii_alphabetic()) {
            // implicit multiplication, as in 3j(3j+1)
            acc = poly_mul(&acc, &poly_power(cur, vars)?);
        } else {
            return Ok(acc);
        }
    }
}

fn poly_power(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<Poly> {
    let base = poly_atom(cur, vars)?;
    if cur.eat('^') {
        let n = cur.signed_i64()?;
        if !(0..=4).contains(&n) {
            return Err(cur.error("exponent must be between 0 and 4"));
        }
        let mut acc = poly_const(vars.len(), Exponent::one());
        for _ in 0..n {
            acc = poly_mul(&acc, &base);
        }
        return Ok(acc);
    }
    Ok(base)
}

fn poly_atom(cur: &mut Cursor<'_>, vars: &[&str]) -> Result<Poly> {
    let k = vars.len();
    if cur.eat('-') {
        return Ok(poly_add(&Poly::new(), &poly_power(cur, vars)?, -1));
    }
    if cur.eat('(') {
        let p = poly_expr(cur, vars)?;
        cur.expect(')')?;
        return Ok(p);
    }
    if let Some(n) = cur.unsigned() {
        let n: i64 = n.try_into().map_err(|_| cur.error("number out of range"))?;
        let mut p = poly_const(k, Exponent::from_integer(n));
        // a digit directly followed by a variable, as in 3j
        if let Some(c) = cur.src[cur.pos..].chars().next() {
            if c.is_ascii_alphabetic() {
                p = poly_mul(&p, &poly_power(cur, vars)?);
            }
        }
        return Ok(p);
    }
    let save = cur.pos;
    let Some(name) = cur.ident() else {
        return Err(cur.error("expected polynomial term"));
    };
    if name == "C" && cur.eat('(') {
        let x = poly_expr(cur, vars)?;
        cur.expect(',')?;
        let n = cur.signed_i64()?;
        cur.expect(')')?;
        if !(0..=2).contains(&n) {
            return Err(cur.error("only C(x, 0), C(x, 1) and C(x, 2) are supported"));
        }
        let mut acc = poly_const(k, Exponent::one());
        for t in 0..n {
            let shifted = poly_add(&x, &poly_const(k, Exponent::from_integer(t)), -1);
            acc = poly_mul(&acc, &shifted);
        }
        let fact: i64 = (1..=n).product();
        return Ok(poly_mul(&acc, &poly_const(k, Exponent::new(1, fact))));
    }
    match vars.iter().position(|v| *v == name) {
        Some(a) => {
            let mut m = vec![0u32; k];
            m[a] = 1;
            Ok(BTreeMap::from([(m, Exponent::one())]))
        }
        None => {
            cur.pos = save;
            Err(cur.error(format!("unknown variable {name:?}")))
        }
    }
}
