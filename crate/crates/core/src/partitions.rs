//! Brute-force partition counts used as independent oracles.
//!
//! Colors follow the Alladi-Gordon convention: parts are colored `a`, `b` or
//! `ab`, ordered `1_ab < 1_a < 1_b < 2_ab < ...`, and consecutive parts obey
//! a minimal-difference matrix.

use num_traits::Zero;

use crate::products::ProductExpr;
use crate::qseries::QSeries;
use crate::ring::Scalar;
use crate::Exponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Ab,
    A,
    B,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Ab, Color::A, Color::B];

    fn idx(self) -> usize {
        match self {
            Color::A => 0,
            Color::B => 1,
            Color::Ab => 2,
        }
    }

    /// Contribution to the `(u, v)` counts.
    fn weight(self) -> (usize, usize) {
        match self {
            Color::A => (1, 0),
            Color::B => (0, 1),
            Color::Ab => (1, 1),
        }
    }
}

/// Rows and columns in the order `a, b, ab`.
pub const DIFFERENCE_MATRIX: [[u32; 3]; 3] = [[1, 2, 1], [1, 1, 1], [2, 2, 2]];

/// Minimal gap between a part of color `x` and the next smaller part of color `y`.
pub fn min_difference(x: Color, y: Color) -> u32 {
    DIFFERENCE_MATRIX[x.idx()][y.idx()]
}

/// Parts listed from largest to smallest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredPartition {
    pub parts: Vec<(u32, Color)>,
}

impl ColoredPartition {
    pub fn size(&self) -> u32 {
        self.parts.iter().map(|p| p.0).sum()
    }

    pub fn counts(&self) -> (usize, usize) {
        self.parts.iter().fold((0, 0), |(u, v), p| {
            let (du, dv) = p.1.weight();
            (u + du, v + dv)
        })
    }

    pub fn is_valid(&self) -> bool {
        if self.parts.iter().any(|&(n, c)| n == 0 || (n == 1 && c == Color::Ab)) {
            return false;
        }
        self.parts.windows(2).all(|w| {
            let ((x, cx), (y, cy)) = (w[0], w[1]);
            x >= y && x - y >= min_difference(cx, cy)
        })
    }
}

/// Table `t[u][v][n]` for `0 ≤ n ≤ nmax`.
pub type Graded = Vec<Vec<Vec<u64>>>;

fn graded_zero(nmax: usize) -> Graded {
    vec![vec![vec![0; nmax + 1]; nmax + 1]; nmax + 1]
}

/// Every valid three-colored partition of size at most `nmax`.
pub fn colored_partitions(nmax: u32) -> Vec<ColoredPartition> {
    fn go(rest: u32, last: Option<(u32, Color)>, cur: &mut Vec<(u32, Color)>, out: &mut Vec<ColoredPartition>) {
        out.push(ColoredPartition { parts: cur.clone() });
        for n in 1..=rest {
            for c in Color::ALL {
                if n == 1 && c == Color::Ab {
                    continue;
                }
                if let Some((m, cm)) = last {
                    if n > m || m - n < min_difference(cm, c) {
                        continue;
                    }
                }
                cur.push((n, c));
                go(rest - n, Some((n, c)), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(nmax, None, &mut Vec::new(), &mut out);
    out
}

/// `S(u, v, n)` for all `n ≤ nmax`.
pub fn s_table(nmax: u32) -> Graded {
    let mut t = graded_zero(nmax as usize);
    for p in colored_partitions(nmax) {
        let (u, v) = p.counts();
        t[u][v][p.size() as usize] += 1;
    }
    t
}

/// Partitions into distinct parts of size at most `nmax`, as part lists.
fn distinct_partitions(nmax: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, below: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        for n in 1..below.min(rest + 1) {
            cur.push(n);
            go(rest - n, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(nmax, nmax + 1, &mut Vec::new(), &mut out);
    out
}

/// `T(u, v, n)` for all `n ≤ nmax`, by listing pairs of distinct-part partitions.
pub fn t_table(nmax: u32) -> Graded {
    let d = distinct_partitions(nmax);
    let sized: Vec<(usize, u32)> = d.iter().map(|p| (p.len(), p.iter().sum())).collect();
    let mut t = graded_zero(nmax as usize);
    for &(u, n1) in &sized {
        for &(v, n2) in &sized {
            if n1 + n2 <= nmax {
                t[u][v][(n1 + n2) as usize] += 1;
            }
        }
    }
    t
}

pub fn count_s(u: usize, v: usize, n: u32) -> u64 {
    s_table(n).get(u).and_then(|r| r.get(v)).map_or(0, |r| r[n as usize])
}

pub fn count_t(u: usize, v: usize, n: u32) -> u64 {
    t_table(n).get(u).and_then(|r| r.get(v)).map_or(0, |r| r[n as usize])
}

/// Coefficients of `(−aq, −bq; q)_∞`, with `a` and `b` tracked as gradings.
pub fn graded_product(nmax: u32) -> Graded {
    let n = nmax as usize;
    let mut t = graded_zero(n);
    t[0][0][0] = 1;
    for m in 1..=n {
        // multiply by (1 + a q^m)(1 + b q^m)
        for (du, dv) in [(1, 0), (0, 1)] {
            for u in (0..=n).rev() {
                for v in (0..=n).rev() {
                    for k in (m..=n).rev() {
                        if u >= du && v >= dv {
                            let add = t[u - du][v - dv][k - m];
                            t[u][v][k] += add;
                        }
                    }
                }
            }
        }
    }
    t
}

/// First `(u, v, n)` where the two tables disagree.
pub fn first_mismatch(x: &Graded, y: &Graded) -> Option<(usize, usize, usize)> {
    for u in 0..x.len().max(y.len()) {
        for v in 0..x.len().max(y.len()) {
            for n in 0..x.len().max(y.len()) {
                let get = |t: &Graded| t.get(u).and_then(|r| r.get(v)).and_then(|r| r.get(n)).copied().unwrap_or(0);
                if get(x) != get(y) {
                    return Some((u, v, n));
                }
            }
        }
    }
    None
}

/// Parts `first, first + step, first + 2·step, ...`, each usable any number of times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartClass {
    pub first: u64,
    pub step: u64,
}

/// Number of partitions of each `n ≤ cap` into parts from the classes, by
/// dynamic programming. A class listed twice contributes two colors.
pub fn product_partition_expand(classes: &[PartClass], cap: u64) -> QSeries {
    let mut counts = vec![0i128; cap as usize + 1];
    counts[0] = 1;
    for c in classes {
        assert!(c.first > 0 && c.step > 0, "partition classes need positive parts");
        let mut part = c.first;
        while part <= cap {
            let p = part as usize;
            for n in p..=cap as usize {
                counts[n] += counts[n - p];
            }
            part += c.step;
        }
    }
    QSeries::from_int_coeffs(1, cap as i64, 0, &counts, &Scalar::one())
}

/// The classes of a pure partition product `∏ 1/(q^a; q^n)_∞^e`, or `None`
/// when the expression has another shape.
pub fn partition_classes(p: &ProductExpr) -> Option<Vec<PartClass>> {
    let [term] = p.terms.as_slice() else { return None };
    if !term.weight.is_one() {
        return None;
    }
    let mut out = Vec::new();
    for f in &term.factors {
        let e = f.base.qexp;
        if !f.base.params.is_empty()
            || !f.base.coeff.is_one()
            || f.power >= 0
            || !e.is_integer()
            || e <= Exponent::zero()
            || !f.modulus.is_integer()
        {
            return None;
        }
        let c = PartClass { first: e.to_integer() as u64, step: f.modulus.to_integer() as u64 };
        out.extend(std::iter::repeat_n(c, (-f.power) as usize));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(count_t(1, 0, 3), 1);
        assert_eq!(count_t(0, 0, 0), 1);
        assert_eq!(count_t(1, 1, 3), 2);
        assert_eq!(count_s(0, 0, 0), 1);
        assert_eq!(count_s(1, 0, 2), 1);
    }

    #[test]
    fn enumerated_partitions_are_valid() {
        let all = colored_partitions(9);
        assert!(all.iter().all(ColoredPartition::is_valid));
        let bad = ColoredPartition { parts: vec![(3, Color::A), (2, Color::B)] };
        assert!(!bad.is_valid());
        assert!(!ColoredPartition { parts: vec![(1, Color::Ab)] }.is_valid());
    }

    #[test]
    fn s_equals_t() {
        let (s, t) = (s_table(12), t_table(12));
        assert_eq!(first_mismatch(&s, &t), None);
        assert_eq!(first_mismatch(&t, &graded_product(12)), None);
    }

    #[test]
    fn partition_products() {
        let rr = |a, b| vec![PartClass { first: a, step: 5 }, PartClass { first: b, step: 5 }];
        assert_eq!(product_partition_expand(&rr(1, 4), 6).to_string(), "1 + q + q^2 + q^3 + 2*q^4 + 2*q^5 + 3*q^6");
        assert_eq!(product_partition_expand(&[], 5), QSeries::one(Exponent::from_integer(5)));
        assert_eq!(product_partition_expand(&rr(2, 3), 5).to_string(), "1 + q^2 + q^3 + q^4 + q^5");
        let p = ProductExpr::parse("1/(q,q^4;q^5)").unwrap();
        let classes = partition_classes(&p).unwrap();
        assert_eq!(product_partition_expand(&classes, 30), p.eval(Exponent::from_integer(30)).unwrap());
        assert!(partition_classes(&ProductExpr::parse("(q;q)").unwrap()).is_none());
    }
}
