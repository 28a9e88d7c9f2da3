//! Identity records, their JSON file format and the verification driver.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::products::ProductExpr;
use crate::report::VerifyReport;
use crate::sums::{grid_den, LinearForm, QuadForm, Subscript, SumSide, SumSideSpec};
use crate::Exponent;

/// Environment variable naming a catalog file to use instead of the built-in one.
pub const CATALOG_ENV: &str = "QRSID_CATALOG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ProvedInPaper,
    Cited,
    Conjecture,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::ProvedInPaper => "proved-in-paper",
            Status::Cited => "cited",
            Status::Conjecture => "conjecture",
        }
    }

    pub fn parse(s: &str) -> Option<Status> {
        [Status::ProvedInPaper, Status::Cited, Status::Conjecture].into_iter().find(|x| x.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub anchor: String,
    pub quote: String,
}

pub type Assignment = BTreeMap<String, Monomial>;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct IdentityRecord {
    pub id: String,
    pub status: Status,
    pub source: Source,
    pub sum_side: SumSide,
    pub product_side: ProductExpr,
    #[serde(default)]
    pub sampling: Vec<Assignment>,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    status: Status,
    source: &'a Source,
    sum_side: serde_json::Value,
    product_side: &'a ProductExpr,
    sampling: &'a [Assignment],
}

impl Serialize for IdentityRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let with_grid = |spec: &SumSideSpec| -> std::result::Result<serde_json::Value, S::Error> {
            let mut v = serde_json::to_value(spec).map_err(serde::ser::Error::custom)?;
            if let serde_json::Value::Object(m) = &mut v {
                m.insert("grid".into(), grid_den(spec).into());
            }
            Ok(v)
        };
        let sum_side = match self.sum_side.components.as_slice() {
            [one] => with_grid(one)?,
            many => serde_json::Value::Array(many.iter().map(with_grid).collect::<std::result::Result<_, _>>()?),
        };
        RecordOut {
            id: &self.id,
            status: self.status,
            source: &self.source,
            sum_side,
            product_side: &self.product_side,
            sampling: &self.sampling,
        }
        .serialize(s)
    }
}

impl IdentityRecord {
    pub fn param_names(&self) -> Vec<String> {
        let mut names = self.sum_side.param_names();
        names.extend(self.product_side.param_names());
        names.sort();
        names.dedup();
        names
    }

    /// The record's sampling list, or the empty assignment for records without parameters.
    pub fn assignments(&self) -> Vec<Assignment> {
        if self.sampling.is_empty() {
            vec![Assignment::new()]
        } else {
            self.sampling.clone()
        }
    }

    /// Both sides at one assignment.
    pub fn sides(&self, assign: &Assignment, cap: Exponent) -> Result<(crate::QSeries, crate::QSeries)> {
        for name in self.param_names() {
            if !assign.contains_key(&name) {
                return Err(Error::InvalidSpec(format!("parameter {name} is not assigned")));
            }
        }
        let map: HashMap<String, Monomial> = assign.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let lhs = self.sum_side.eval(&map, cap)?;
        let rhs = self.product_side.substitute(&map)?.eval(cap)?;
        Ok((lhs, rhs))
    }

    pub fn verify(&self, assign: &Assignment, cap: Exponent) -> VerifyReport {
        self.verify_against(&self.product_side, assign, cap)
    }

    /// Compares the sum side with another product side, e.g. a mutated one.
    pub fn verify_against(&self, product: &ProductExpr, assign: &Assignment, cap: Exponent) -> VerifyReport {
        let mut report = VerifyReport::new(&self.id, assign.iter(), cap);
        report.status = Some(self.status.as_str().to_string());
        let rec = IdentityRecord { product_side: product.clone(), ..self.clone() };
        let start = Instant::now();
        let mut report = match rec.sides(assign, cap) {
            Ok((l, r)) => report.compare(&l, &r),
            Err(e) => report.error(e.to_string()),
        };
        report.wall_ms = Some(start.elapsed().as_millis() as u64);
        report
    }
}

/// `product` with the q-exponent of one factor base raised by one.
pub fn bump_exponent(product: &ProductExpr, term: usize, factor: usize) -> ProductExpr {
    let mut p = product.clone();
    p.terms[term].factors[factor].base.qexp += Exponent::from_integer(1);
    p
}

/// Every single-factor exponent bump of `product`, tagged with its position.
pub fn exponent_mutations(product: &ProductExpr) -> Vec<((usize, usize), ProductExpr)> {
    let mut out = Vec::new();
    for (t, term) in product.terms.iter().enumerate() {
        for f in 0..term.factors.len() {
            out.push(((t, f), bump_exponent(product, t, f)));
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Filter {
    pub status: Option<Status>,
    pub id_prefix: Option<String>,
}

impl Filter {
    pub fn matches(&self, r: &IdentityRecord) -> bool {
        self.status.is_none_or(|s| s == r.status) && self.id_prefix.as_deref().is_none_or(|p| r.id.starts_with(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub records: Vec<IdentityRecord>,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        let mut records = builtin_records();
        records.sort_by(|a, b| a.id.cmp(&b.id));
        Catalog { records }
    }

    /// The file named by `QRSID_CATALOG` when set, otherwise the built-in records.
    pub fn from_env() -> Result<Catalog> {
        match std::env::var_os(CATALOG_ENV) {
            Some(p) => Catalog::load(Path::new(&p)),
            None => Ok(Catalog::builtin()),
        }
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Catalog::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let mut records: Vec<IdentityRecord> = serde_json::from_str(text).map_err(|e| Error::Parse {
            msg: e.to_string(),
            line: e.line(),
            column: e.column(),
        })?;
        for r in &records {
            r.sum_side.validate().map_err(|e| Error::InvalidSpec(format!("{}: {e}", r.id)))?;
        }
        records.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Catalog { records })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("catalog records serialize")
    }

    pub fn get(&self, id: &str) -> Result<&IdentityRecord> {
        self.records.iter().find(|r| r.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
    }

    /// Reports for one record, at `assign` or at each sampled assignment.
    pub fn verify_identity(&self, id: &str, assign: Option<&Assignment>, cap: Exponent) -> Result<Vec<VerifyReport>> {
        let rec = self.get(id)?;
        Ok(match assign {
            Some(a) => vec![rec.verify(a, cap)],
            None => rec.assignments().par_iter().map(|a| rec.verify(a, cap)).collect(),
        })
    }

    /// One report per selected record and sampled assignment, ordered by id.
    pub fn verify_all(&self, cap: Exponent, filter: &Filter) -> Vec<VerifyReport> {
        let jobs: Vec<(&IdentityRecord, Assignment)> = self
            .records
            .iter()
            .filter(|r| filter.matches(r))
            .flat_map(|r| r.assignments().into_iter().map(move |a| (r, a)))
            .collect();
        jobs.par_iter().map(|(r, a)| r.verify(a, cap)).collect()
    }
}

struct Comp<'a> {
    quad: &'a str,
    unit: &'a str,
}

fn vars_of(spec: &str) -> Vec<&str> {
    spec.split_whitespace().collect()
}

/// `subs` like `"1:i, 2:j"`, params like `"u:i-j, v:j"`.
fn build_spec(vars: &[&str], c: &Comp<'_>, subs: &str, params: &str) -> SumSideSpec {
    let quad = QuadForm::parse(c.quad, vars).unwrap_or_else(|e| panic!("{}: {e}", c.quad));
    let unit =
        if c.unit.is_empty() { QuadForm::zero(vars.len()) } else { QuadForm::parse(c.unit, vars).expect("unit form") };
    let mut spec = SumSideSpec::new(quad, &[]).with_unit(unit);
    spec.k = vars.len();
    spec.subscripts = subs
        .split(',')
        .map(|s| {
            let (m, f) = s.split_once(':').expect("modulus:form");
            Subscript {
                modulus: Exponent::from_integer(m.trim().parse().expect("modulus")),
                form: LinearForm::parse(f.trim(), vars).expect("subscript form"),
            }
        })
        .collect();
    for p in params.split(',').filter(|p| !p.trim().is_empty()) {
        let (n, f) = p.split_once(':').expect("name:form");
        spec = spec.with_param(n.trim(), LinearForm::parse(f.trim(), vars).expect("parameter form"));
    }
    spec
}

struct Def<'a> {
    id: &'a str,
    status: Status,
    anchor: &'a str,
    quote: &'a str,
    vars: &'a str,
    comps: &'a [Comp<'a>],
    subs: &'a str,
    params: &'a str,
    product: &'a str,
    samples: &'a [&'a str],
}

fn parse_assignment(s: &str) -> Assignment {
    s.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').expect("name=monomial");
            (k.trim().to_string(), Monomial::parse(v.trim()).unwrap_or_else(|e| panic!("{v}: {e}")))
        })
        .collect()
}

fn record(d: Def<'_>) -> IdentityRecord {
    let vars = vars_of(d.vars);
    let components = d.comps.iter().map(|c| build_spec(&vars, c, d.subs, d.params)).collect();
    IdentityRecord {
        id: d.id.to_string(),
        status: d.status,
        source: Source { anchor: d.anchor.to_string(), quote: d.quote.to_string() },
        sum_side: SumSide { components },
        product_side: ProductExpr::parse(d.product).unwrap_or_else(|e| panic!("{}: {e}", d.product)),
        sampling: d.samples.iter().map(|s| parse_assignment(s)).collect(),
    }
}

/// `Σ q^{n_1²+…+n_{k−1}²+n_1+…+n_{k−i}} / ((q)_{n_{k−1}−n_{k−2}} ⋯ (q)_{n_1})`
/// over `n_{k−1} ≥ … ≥ n_1 ≥ 0`, against `(q^i, q^{2k+1−i}, q^{2k+1}; q^{2k+1})_∞ / (q;q)_∞`.
/// The linear part runs over the smallest summation indices.
pub fn andrews_gordon(k: usize, i: usize) -> IdentityRecord {
    assert!(k >= 2 && (1..=k).contains(&i));
    let names: Vec<String> = (1..k).map(|j| format!("n{j}")).collect();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut quad: Vec<String> = names.iter().map(|n| format!("{n}^2")).collect();
    quad.extend(names[..k - i].iter().cloned());
    let quad = QuadForm::parse(&quad.join(" + "), &vars).expect("quadratic form");
    let mut spec = SumSideSpec::new(quad, &[]);
    spec.k = k - 1;
    spec.subscripts = (0..k - 1)
        .map(|j| {
            let mut coeffs = vec![0; k - 1];
            coeffs[j] = 1;
            if j > 0 {
                coeffs[j - 1] = -1;
            }
            Subscript { modulus: Exponent::from_integer(1), form: LinearForm::new(coeffs, 0) }
        })
        .collect();
    let m = 2 * k + 1;
    let product = format!("(q^{i}, q^{}, q^{m}; q^{m}) * (q; q)^-1", m - i);
    IdentityRecord {
        id: format!("I-ag-k{k}-i{i}"),
        status: Status::Cited,
        source: Source {
            anchor: "introduction, Andrews-Gordon identity".into(),
            quote: "the Andrews-Gordon identity".into(),
        },
        sum_side: SumSide::single(spec),
        product_side: ProductExpr::parse(&product).expect("product"),
        sampling: Vec::new(),
    }
}

const P: Status = Status::ProvedInPaper;
const C: Status = Status::Cited;

fn one<'a>(quad: &'a str, unit: &'a str) -> [Comp<'a>; 1] {
    [Comp { quad, unit }]
}

fn builtin_records() -> Vec<IdentityRecord> {
    let mut out = Vec::new();
    for k in 2..=3 {
        for i in 1..=k {
            out.push(andrews_gordon(k, i));
        }
    }
    let q11 = "((i-j)^2-i-j)/2";
    let tt = "(i^2-i+j^2-j+4(i-j)^2)/2";
    let tt2 = "(i^2-i+j^2-j+8(i-j)^2)/2";
    let tt3 = "(i^2-i+j^2-j+12(i-j)^2)/2";
    let r12 = "i^2+2i*j+2j^2-i-j";
    let r112a = "(i^2+(i-j+2k)^2-2i+3j-2k)/2";
    let r112b = "(i^2+(i-j+2k)^2-2i+j-2k)/2";
    let r113 = "(i^2+j^2+(i+j+3k)^2-2i-2j-3k)/2";
    let r123 = "(i^2-i)/2+(i-2j+3k)^2/4";
    let r123c = "(i^2+2i+3k)/2+(i-2j+3k)^2/4";
    let a11 = "introduction, double sums";
    let defs = [
        // introduction
        Def {
            id: "I-rr-1",
            status: C,
            anchor: "introduction, Rogers-Ramanujan identities",
            quote: "famous Rogers-Ramanujan identities assert",
            vars: "i",
            comps: &one("i^2", ""),
            subs: "1:i",
            params: "",
            product: "1/(q,q^4;q^5)",
            samples: &[],
        },
        Def {
            id: "I-rr-2",
            status: C,
            anchor: "introduction, Rogers-Ramanujan identities",
            quote: "famous Rogers-Ramanujan identities assert",
            vars: "i",
            comps: &one("i^2+i", ""),
            subs: "1:i",
            params: "",
            product: "1/(q^2,q^3;q^5)",
            samples: &[],
        },
        Def {
            id: "I-slater-1",
            status: C,
            anchor: "introduction, Slater pair",
            quote: "Slater's list",
            vars: "i",
            comps: &one("2i^2", ""),
            subs: "1:2i",
            params: "",
            product: "1/(q^2,q^3,q^4,q^5,q^11,q^12,q^13,q^14;q^16)",
            samples: &[],
        },
        Def {
            id: "I-slater-2",
            status: C,
            anchor: "introduction, Slater pair",
            quote: "Slater's list",
            vars: "i",
            comps: &one("2i^2+2i", ""),
            subs: "1:2i+1",
            params: "",
            product: "1/(q,q^4,q^6,q^7,q^9,q^10,q^12,q^15;q^16)",
            samples: &[],
        },
        Def {
            id: "I-capparelli",
            status: C,
            anchor: "introduction, index (1,3)",
            quote: "analytical forms of two conjectural partition identities",
            vars: "i j",
            comps: &one("2i^2+6i*j+6j^2", ""),
            subs: "1:i, 3:j",
            params: "",
            product: "1/(q^2,q^3,q^9,q^10;q^12)",
            samples: &[],
        },
        Def {
            id: "I-kursungoz-conj",
            status: Status::Conjecture,
            anchor: "introduction, open index (1,3) identity",
            quote: "so far remain open",
            vars: "i j",
            comps: &one("i^2+3j^2+3i*j", ""),
            subs: "1:i, 3:j",
            params: "",
            product: "1/(q,q^3,q^6,q^8;q^9)",
            samples: &[],
        },
        Def {
            id: "I-au",
            status: C,
            anchor: "introduction, index (1,3)",
            quote: "further conjectured that",
            vars: "i j",
            comps: &one("3j(3j+1)/2+i^2+3i*j+i+j", "2j"),
            subs: "1:i, 3:j",
            params: "",
            product: "1/(q^2,q^3;q^6)",
            samples: &[],
        },
        Def {
            id: "I-kr-F1",
            status: C,
            anchor: "introduction, F(q,1,q^3)",
            quote: "Some of their conjectural identities are",
            vars: "i j k",
            comps: &one("3k(k-1)+(i+2j+3k)(i+2j+3k-1)+i+3k", "2k"),
            subs: "1:i, 4:j, 6:k",
            params: "",
            product: "(q^3;q^12) * (q,q^2;q^4)^-1",
            samples: &[],
        },
        Def {
            id: "I-kr-F2",
            status: C,
            anchor: "introduction, F(q,q,q^6)",
            quote: "Some of their conjectural identities are",
            vars: "i j k",
            comps: &one("3k(k-1)+(i+2j+3k)(i+2j+3k-1)+i+j+6k", "2k"),
            subs: "1:i, 4:j, 6:k",
            params: "",
            product: "(q^3;q^4)^-1 * (q,q^8;q^12)^-1",
            samples: &[],
        },
        Def {
            id: "I-kr-G1",
            status: C,
            anchor: "introduction, G(q,q^2,q^4)",
            quote: "Some of their conjectural identities are",
            vars: "i j k",
            comps: &one("(i+2j+3k)(i+2j+3k-1)/2+j^2+i+2j+4k", ""),
            subs: "1:i, 2:j, 3:k",
            params: "",
            product: "(q;q^3)^-1 * (q^3,q^6,q^11;q^12)^-1",
            samples: &[],
        },
        Def {
            id: "I-kr-G2",
            status: C,
            anchor: "introduction, G(q^2,q^4,q^5)",
            quote: "Some of their conjectural identities are",
            vars: "i j k",
            comps: &one("(i+2j+3k)(i+2j+3k-1)/2+j^2+2i+4j+5k", ""),
            subs: "1:i, 2:j, 3:k",
            params: "",
            product: "(q^2;q^3)^-1 * (q^3,q^6,q^7;q^12)^-1",
            samples: &[],
        },
        Def {
            id: "I-takigiku-122",
            status: C,
            anchor: "introduction, index (1,2,2)",
            quote: "level 5 and level 7 standard modules",
            vars: "i j k",
            comps: &one("C(i,2)+8C(j,2)+10C(k,2)+2i*j+2i*k+8j*k+i+4j+5k", ""),
            subs: "1:i, 2:j, 2:k",
            params: "",
            product: "1/(q,q^3,q^4,q^5,q^7,q^9,q^11,q^13,q^15,q^16,q^17,q^19;q^20)",
            samples: &[],
        },
        Def {
            id: "I-laughlin-123",
            status: C,
            anchor: "introduction, index (1,2,3)",
            quote: "identities of Kanade-Russell type",
            vars: "i j k",
            comps: &one("(3k+2j-i)(3k+2j-i-1)/2+j(j-1)-i+6j+6k", "2j"),
            subs: "1:i, 2:j, 3:k",
            params: "",
            product: "(-1;q) * (q^18;q^18) * (q^3;q^3)^-1 * (q^9;q^18)^-1",
            samples: &[],
        },
        Def {
            id: "I-dl-1112",
            status: P,
            anchor: "concluding remarks, index (1,1,1,2)",
            quote: "proved the following identity of index $(1,1,1,2)$",
            vars: "i j k l",
            comps: &one("C(i+j+k+2l+1,2)+C(i+1,2)+C(j+1,2)+l", ""),
            subs: "1:i, 1:j, 1:k, 2:l",
            params: "a:i+l, b:j+l",
            product: "(-q;q) * (-a*q^2,-b*q^2;q^2)",
            samples: &["a=1, b=1", "a=-1, b=q", "a=q^(1/2), b=2", "a=-q, b=-q^(3/2)"],
        },
        // index (1,1)
        Def {
            id: "I-11-sym",
            status: P,
            anchor: a11,
            quote: "symmetric in $u$ and $v$",
            vars: "i j",
            comps: &one(q11, "2i+2j"),
            subs: "1:i, 1:j",
            params: "u:i, v:j",
            product: "(u,v;q) / (u*v*q^-1;q)",
            samples: &["u=-q, v=-q^(1/2)", "u=-q, v=-q", "u=q^2, v=-1", "u=0, v=0", "u=2*q^(3/2), v=z4*q"],
        },
        Def {
            id: "I-11-sym-c1",
            status: P,
            anchor: a11,
            quote: "\\frac{1}{(q^{1/2};q)_{\\infty}^{2}}",
            vars: "i j",
            comps: &one("((i-j)^2+i)/2", ""),
            subs: "1:i, 1:j",
            params: "",
            product: "(q^(1/2);q)^-2",
            samples: &[],
        },
        Def {
            id: "I-11-sym-c2",
            status: P,
            anchor: a11,
            quote: "\\frac{(q^{2};q^{2})_{\\infty}^{2}}{(q;q)_{\\infty}^{3}}",
            vars: "i j",
            comps: &one("((i-j)^2+i+j)/2", ""),
            subs: "1:i, 1:j",
            params: "",
            product: "(q^2;q^2)^2 * (q;q)^-3",
            samples: &[],
        },
        Def {
            id: "I-11-sq",
            status: P,
            anchor: a11,
            quote: "(u;q)_{\\infty}(q;q^{2})_{\\infty}",
            vars: "i j",
            comps: &one("(i-j)^2", "2i+2j"),
            subs: "2:i, 2:j",
            params: "u:i",
            product: "(u;q) * (q;q^2) * (u;q^2)^-2",
            samples: &["u=-q", "u=-q^(3/2)", "u=-q^2", "u=q^(1/2)", "u=3*q"],
        },
        Def {
            id: "I-11-sq-c1",
            status: P,
            anchor: a11,
            quote: "\\frac{(q;q^{2})_{\\infty}^{2}}{(q^{2};q^{4})_{\\infty}^{2}}",
            vars: "i j",
            comps: &one("(i-j)^2+i", "2j"),
            subs: "2:i, 2:j",
            params: "",
            product: "(q;q^2)^2 * (q^2;q^4)^-2",
            samples: &[],
        },
        Def {
            id: "I-11-sq-c2",
            status: P,
            anchor: a11,
            quote: "(q^2,q^{10};q^{8})_{\\infty}(q^{3};q^{4})_{\\infty}",
            vars: "i j",
            comps: &one("2(i-j)^2+3i", "2j"),
            subs: "4:i, 4:j",
            params: "",
            product: "(q^2,q^10;q^8) * (q^3;q^4) * (q^5;q^4)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-sq-c3",
            status: P,
            anchor: a11,
            quote: "(q,q^{2},q^{6};q^{4})_{\\infty}",
            vars: "i j",
            comps: &one("(i-j)^2+2i", "2j"),
            subs: "2:i, 2:j",
            params: "",
            product: "(q,q^2,q^6;q^4) * (q^5;q^4)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-theta-a",
            status: P,
            anchor: a11,
            quote: "(q^{j}-q^{i+1/2})",
            vars: "i j",
            comps: &[Comp { quad: "(i-j)^2/2+j", unit: "2i+2j" }, Comp { quad: "(i-j)^2/2+i+1/2", unit: "2i+2j+2" }],
            subs: "1:i, 1:j",
            params: "",
            product: "(q^(1/2);q)^2 * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-theta-b",
            status: P,
            anchor: a11,
            quote: "(q^{j}+q^{i+1/2})",
            vars: "i j",
            comps: &[Comp { quad: "(i-j)^2/2+j", unit: "" }, Comp { quad: "(i-j)^2/2+i+1/2", unit: "" }],
            subs: "1:i, 1:j",
            params: "",
            product: "(q;q^2) * (q^2;q^2)^-1 * (q^(1/2);q)^-2",
            samples: &[],
        },
        Def {
            id: "I-11-jtp-a1",
            status: P,
            anchor: a11,
            quote: "(-uq^a,-q/u,q^{a+1};q^{a+1})_\\infty",
            vars: "i j",
            comps: &one("C(i,2)+C(j+1,2)+C(j-i,2)", ""),
            subs: "1:i, 1:j",
            params: "u:i-j",
            product: "(-u*q, -q*u^-1, q^2; q^2) * (q;q)^-1",
            samples: &["u=1", "u=-q", "u=q^(1/2)", "u=2", "u=-q^(1/2)"],
        },
        Def {
            id: "I-11-jtp-a2",
            status: P,
            anchor: a11,
            quote: "(-uq^a,-q/u,q^{a+1};q^{a+1})_\\infty",
            vars: "i j",
            comps: &one("C(i,2)+C(j+1,2)+2C(j-i,2)", ""),
            subs: "1:i, 1:j",
            params: "u:i-j",
            product: "(-u*q^2, -q*u^-1, q^3; q^3) * (q;q)^-1",
            samples: &["u=1", "u=-q^2", "u=q^(1/2)", "u=-3", "u=z4"],
        },
        Def {
            id: "I-11-jtp-J1",
            status: P,
            anchor: a11,
            quote: "(-q^{m_{1}-n},-q^{m_{2}+n}",
            vars: "i j",
            comps: &one("2i^2+2j^2-3i*j", ""),
            subs: "1:i, 1:j",
            params: "",
            product: "(-q^2,-q^2,q^4;q^4) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-jtp-J2-0",
            status: P,
            anchor: a11,
            quote: "(q^{3},q^{4},q^{7};q^{7})_{\\infty}",
            vars: "i j",
            comps: &one("(7i^2+7j^2-8i*j+i-j)/2", "2i+2j"),
            subs: "3:i, 3:j",
            params: "",
            product: "(q^3,q^4,q^7;q^7) * (q^3;q^3)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-jtp-J2-1",
            status: P,
            anchor: a11,
            quote: "(q^{2},q^{5},q^{7};q^{7})_{\\infty}",
            vars: "i j",
            comps: &one("(7i^2+7j^2-8i*j+3i-3j)/2", "2i+2j"),
            subs: "3:i, 3:j",
            params: "",
            product: "(q^2,q^5,q^7;q^7) * (q^3;q^3)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-jtp-J2-2",
            status: P,
            anchor: a11,
            quote: "(q,q^{6},q^{7};q^{7})_{\\infty}",
            vars: "i j",
            comps: &one("(7i^2+7j^2-8i*j+5i-5j)/2", "2i+2j"),
            subs: "3:i, 3:j",
            params: "",
            product: "(q,q^6,q^7;q^7) * (q^3;q^3)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-a1",
            status: P,
            anchor: a11,
            quote: "(u^{-1}q^{2a},uq^{2a+1},q^{4a+1};q^{4a+1})_{\\infty}",
            vars: "i j",
            comps: &one(tt, "2i+2j"),
            subs: "1:i, 1:j",
            params: "u:i-j",
            product: "(u^-1*q^2, u*q^3, q^5; q^5) * (q;q)^-1 + (u*q^2, u^-1*q^3, q^5; q^5) * (q;q)^-1",
            samples: &["u=1", "u=-1", "u=q^(1/2)", "u=-2*q", "u=z3"],
        },
        Def {
            id: "I-11-twoterm-a2",
            status: P,
            anchor: a11,
            quote: "(u^{-1}q^{2a},uq^{2a+1},q^{4a+1};q^{4a+1})_{\\infty}",
            vars: "i j",
            comps: &one(tt2, "2i+2j"),
            subs: "1:i, 1:j",
            params: "u:i-j",
            product: "(u^-1*q^4, u*q^5, q^9; q^9) * (q;q)^-1 + (u*q^4, u^-1*q^5, q^9; q^9) * (q;q)^-1",
            samples: &["u=1", "u=-q^(1/2)", "u=q^3", "u=2"],
        },
        Def {
            id: "I-11-twoterm-c1",
            status: P,
            anchor: a11,
            quote: "2(q^{2a},q^{2a+1},q^{4a+1};q^{4a+1})",
            vars: "i j",
            comps: &one(tt, "2i+2j"),
            subs: "1:i, 1:j",
            params: "",
            product: "2 * (q^2,q^3,q^5;q^5) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-c2",
            status: P,
            anchor: a11,
            quote: "2(-q^{2a},-q^{2a+1},q^{4a+1};q^{4a+1})",
            vars: "i j",
            comps: &one(tt, ""),
            subs: "1:i, 1:j",
            params: "",
            product: "2 * (-q^2,-q^3,q^5;q^5) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-c3",
            status: P,
            anchor: a11,
            quote: "(q,q^{4a},q^{4a+1};q^{4a+1})_\\infty",
            vars: "i j",
            comps: &one("(i^2-i+j^2-j+4(i-j)^2)/2+2i-2j", "2i+2j"),
            subs: "1:i, 1:j",
            params: "",
            product: "(q,q^4,q^5;q^5) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-c4",
            status: P,
            anchor: a11,
            quote: "(q^{-1},q^{4a+2},q^{4a+1};q^{4a+1})_\\infty",
            vars: "i j",
            comps: &one("(i^2-i+j^2-j+4(i-j)^2)/2+3i-3j", "2i+2j"),
            subs: "1:i, 1:j",
            params: "",
            product: "(q^-1,q^6,q^5;q^5) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-a2-neg",
            status: P,
            anchor: a11,
            quote: "\\frac{2(q^{4},q^{5},q^{9};q^{9})_{\\infty}}{(q;q)_{\\infty}}",
            vars: "i j",
            comps: &one(tt2, "2i+2j"),
            subs: "1:i, 1:j",
            params: "",
            product: "2 * (q^4,q^5,q^9;q^9) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-a3-neg",
            status: P,
            anchor: a11,
            quote: "\\frac{2(q^{6},q^{7},q^{13};q^{13})_{\\infty}}{(q;q)_{\\infty}}",
            vars: "i j",
            comps: &one(tt3, "2i+2j"),
            subs: "1:i, 1:j",
            params: "",
            product: "2 * (q^6,q^7,q^13;q^13) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-a2-pos",
            status: P,
            anchor: a11,
            quote: "\\frac{2(-q^{4},-q^{5},q^{9};q^{9})_{\\infty}}{(q;q)_{\\infty}}",
            vars: "i j",
            comps: &one(tt2, ""),
            subs: "1:i, 1:j",
            params: "",
            product: "2 * (-q^4,-q^5,q^9;q^9) * (q;q)^-1",
            samples: &[],
        },
        Def {
            id: "I-11-twoterm-a3-pos",
            status: P,
            anchor: a11,
            quote: "\\frac{2(-q^{6},-q^{7},q^{13};q^{13})_{\\infty}}{(q;q)_{\\infty}}",
            vars: "i j",
            comps: &one(tt3, ""),
            subs: "1:i, 1:j",
            params: "",
            product: "2 * (-q^6,-q^7,q^13;q^13) * (q;q)^-1",
            samples: &[],
        },
        // index (1,2)
        Def {
            id: "I-12-a",
            status: P,
            anchor: "index (1,2)",
            quote: "(u;q^{2})_{\\infty}",
            vars: "i j",
            comps: &one(r12, "2i"),
            subs: "1:i, 2:j",
            params: "u:i+j",
            product: "(u;q^2)",
            samples: &["u=q", "u=q^2", "u=-q", "u=q^(1/2)", "u=-1", "u=3"],
        },
        Def {
            id: "I-12-b",
            status: P,
            anchor: "index (1,2)",
            quote: "(u;q)_{\\infty}",
            vars: "i j",
            comps: &one(r12, "2i"),
            subs: "1:i, 2:j",
            params: "u:i+2j",
            product: "(u;q)",
            samples: &["u=q", "u=-q", "u=q^(1/2)", "u=-1", "u=2*q^(3/2)"],
        },
        Def {
            id: "I-12-a-c1",
            status: P,
            anchor: "index (1,2)",
            quote: "(q;q^{2})_{\\infty}",
            vars: "i j",
            comps: &one("i^2+2i*j+2j^2", "2i"),
            subs: "1:i, 2:j",
            params: "",
            product: "(q;q^2)",
            samples: &[],
        },
        Def {
            id: "I-12-a-c2",
            status: P,
            anchor: "index (1,2)",
            quote: "(q^{2};q^{2})_{\\infty}",
            vars: "i j",
            comps: &one("i^2+2i*j+2j^2+i+j", "2i"),
            subs: "1:i, 2:j",
            params: "",
            product: "(q^2;q^2)",
            samples: &[],
        },
        Def {
            id: "I-12-b-c1",
            status: P,
            anchor: "index (1,2)",
            quote: "(q;q)_{\\infty}",
            vars: "i j",
            comps: &one("i^2+2i*j+2j^2+j", "2i"),
            subs: "1:i, 2:j",
            params: "",
            product: "(q;q)",
            samples: &[],
        },
        Def {
            id: "I-12-b-c2",
            status: P,
            anchor: "index (1,2)",
            quote: "\\frac{1}{(q;q^{2})_{\\infty}}",
            vars: "i j",
            comps: &one("i^2+2i*j+2j^2+j", ""),
            subs: "1:i, 2:j",
            params: "",
            product: "(q;q^2)^-1",
            samples: &[],
        },
        // index (1,1,1)
        Def {
            id: "I-111",
            status: P,
            anchor: "index (1,1,1)",
            quote: "(\\beta_{1},\\beta_{3};q)_{\\infty}",
            vars: "i j k",
            comps: &one("(i^2+(i+j+k)^2-2i-j-k)/2", "2j+2k"),
            subs: "1:i, 1:j, 1:k",
            params: "beta1:i+j, beta3:i+k",
            product: "(beta1, beta3; q)",
            samples: &[
                "beta1=q, beta3=q^2",
                "beta1=-q^(1/4), beta3=-q^(1/2)",
                "beta1=-1, beta3=q",
                "beta1=2, beta3=-q^(1/2)",
                "beta1=z3*q, beta3=z6*q",
            ],
        },
        Def {
            id: "I-111-c",
            status: P,
            anchor: "index (1,1,1)",
            quote: "\\frac{(q^4;q^{8})_{\\infty}}{(q;q^4)_{\\infty}(q^{6};q^{8})_{\\infty}}",
            vars: "i j k",
            comps: &one("2i^2+2(i+j+k)^2-i-j", ""),
            subs: "4:i, 4:j, 4:k",
            params: "",
            product: "(q^4;q^8) * (q;q^4)^-1 * (q^6;q^8)^-1",
            samples: &[],
        },
        // index (1,1,2)
        Def {
            id: "I-112-a",
            status: P,
            anchor: "index (1,1,2)",
            quote: "(-q,bq^{2}/c;q)_{\\infty}",
            vars: "i j k",
            comps: &one(r112a, "2i+2j"),
            subs: "1:i, 1:j, 2:k",
            params: "b:j-i, c:i-j+k",
            product: "(-q, b*c^-1*q^2; q) * (b*q, b^-1*c; q^2) * (b^2*c^-1*q^2; q^2)^-1",
            samples: &["b=q^(1/2), c=q^2", "b=-q^(1/2), c=q^2", "b=q^(1/2), c=q", "b=-q, c=q^2"],
        },
        Def {
            id: "I-112-a-c1",
            status: P,
            anchor: "index (1,1,2)",
            quote: "\\frac{(q;q^2)_{\\infty}(q^{3};q^{4})_{\\infty}^{2}}{(q^2;q^{4})_{\\infty}^{2}}",
            vars: "i j k",
            comps: &one("i^2+(i-j+2k)^2+i+2k", "2i+2j"),
            subs: "2:i, 2:j, 4:k",
            params: "",
            product: "(q;q^2) * (q^3;q^4)^2 * (q^2;q^4)^-2",
            samples: &[],
        },
        Def {
            id: "I-112-a-c2",
            status: P,
            anchor: "index (1,1,2)",
            quote:
                "\\frac{(q^{6};q^{8})_{\\infty}^{2}}{(q;q^2)_{\\infty}(q^2;q^{4})_{\\infty}(q^{3};q^{4})_{\\infty}^{2}}",
            vars: "i j k",
            comps: &one("i^2+(i-j+2k)^2+i+2k", ""),
            subs: "2:i, 2:j, 4:k",
            params: "",
            product: "(q^6;q^8)^2 * (q;q^2)^-1 * (q^2;q^4)^-1 * (q^3;q^4)^-2",
            samples: &[],
        },
        Def {
            id: "I-112-a-c3",
            status: P,
            anchor: "index (1,1,2)",
            quote: "\\frac{(q,q^3;q^2)_{\\infty}}{(q^2;q^2)_{\\infty}}",
            vars: "i j k",
            comps: &one("i^2+(i-j+2k)^2-i+2j", "2i+2j"),
            subs: "2:i, 2:j, 4:k",
            params: "",
            product: "(q,q^3;q^2) * (q^2;q^2)^-1",
            samples: &[],
        },
        Def {
            id: "I-112-b",
            status: P,
            anchor: "index (1,1,2)",
            quote: "(-d q/c;q)_{\\infty}",
            vars: "i j k",
            comps: &one(r112b, "2i"),
            subs: "1:i, 1:j, 2:k",
            params: "c:2i-j+2k, d:j",
            product: "(-d*c^-1*q; q) * (c^2; q^2) * (d^2; q^2)^-1",
            samples: &["c=q^(1/2), d=q^(1/4)", "c=q^(1/2), d=q^(3/4)", "c=-q^(1/2), d=q^(1/4)", "c=q, d=-q^(1/2)"],
        },
        Def {
            id: "I-112-b-c1",
            status: P,
            anchor: "index (1,1,2)",
            quote: "\\frac{(q^{4},q^{6};q^{8})_{\\infty}}{(q^{2},q^{3},q^{7};q^{8})_{\\infty}}",
            vars: "i j k",
            comps: &one("2i^2+2(i-j+2k)^2+j", "2i"),
            subs: "4:i, 4:j, 8:k",
            params: "",
            product: "(q^4,q^6;q^8) * (q^2,q^3,q^7;q^8)^-1",
            samples: &[],
        },
        Def {
            id: "I-112-b-c2",
            status: P,
            anchor: "index (1,1,2)",
            quote: "\\frac{(q^{4},q^{10};q^{8})_{\\infty}}{(q^{5},q^{6},q^{9};q^{8})_{\\infty}}",
            vars: "i j k",
            comps: &one("2i^2+2(i-j+2k)^2+3j", "2i"),
            subs: "4:i, 4:j, 8:k",
            params: "",
            product: "(q^4,q^10;q^8) * (q^5,q^6,q^9;q^8)^-1",
            samples: &[],
        },
        // index (1,1,3)
        Def {
            id: "I-113",
            status: P,
            anchor: "index (1,1,3)",
            quote: "\\frac{(u^{3};q^{3})_{\\infty}}{(u;q)_{\\infty}}",
            vars: "i j k",
            comps: &one(r113, "2k"),
            subs: "1:i, 1:j, 3:k",
            params: "u:2i+j+3k",
            product: "(u^3;q^3) * (u;q)^-1",
            samples: &["u=q", "u=q^(1/3)", "u=q^(2/3)", "u=q^(1/2)", "u=-q", "u=2*q"],
        },
        Def {
            id: "I-113-c1",
            status: P,
            anchor: "index (1,1,3)",
            quote: "\\frac{1}{(q,q^{2};q^{3})_{\\infty}}",
            vars: "i j k",
            comps: &one("(i^2+j^2+(i+j+3k)^2+2i+3k)/2", "2k"),
            subs: "1:i, 1:j, 3:k",
            params: "",
            product: "(q,q^2;q^3)^-1",
            samples: &[],
        },
        Def {
            id: "I-113-c2",
            status: P,
            anchor: "index (1,1,3)",
            quote: "\\frac{(q^3;q^{9})_{\\infty}}{(q;q^3)_{\\infty}}",
            vars: "i j k",
            comps: &one("3(i^2+j^2+(i+j+3k)^2)/2-(2i+4j+3k)/2", "2k"),
            subs: "3:i, 3:j, 9:k",
            params: "",
            product: "(q^3;q^9) * (q;q^3)^-1",
            samples: &[],
        },
        Def {
            id: "I-113-c3",
            status: P,
            anchor: "index (1,1,3)",
            quote: "\\frac{(q^{6};q^{9})_{\\infty}}{(q^{2};q^3)_{\\infty}}",
            vars: "i j k",
            comps: &one("3(i^2+j^2+(i+j+3k)^2)/2+(2i-2j+3k)/2", "2k"),
            subs: "3:i, 3:j, 9:k",
            params: "",
            product: "(q^6;q^9) * (q^2;q^3)^-1",
            samples: &[],
        },
        Def {
            id: "I-113-c4",
            status: P,
            anchor: "index (1,1,3)",
            quote: "\\frac{1}{(q,q^5;q^{6})_{\\infty}}",
            vars: "i j k",
            comps: &one("i^2+j^2+(i+j+3k)^2-j", "2k"),
            subs: "2:i, 2:j, 6:k",
            params: "",
            product: "(q,q^5;q^6)^-1",
            samples: &[],
        },
        // index (1,2,2)
        Def {
            id: "I-122-a",
            status: P,
            anchor: "index (1,2,2)",
            quote: "(q^{2};q^{2})_{\\infty}(q^4;q^4)_\\infty^2",
            vars: "i j k",
            comps: &one("i+j^2+2j+(i+j-k)^2", "2j"),
            subs: "1:i, 2:j, 2:k",
            params: "",
            product: "(q^2;q^2) * (q^4;q^4)^2 * (q;q)^-2",
            samples: &[],
        },
        Def {
            id: "I-122-b",
            status: P,
            anchor: "index (1,2,2)",
            quote: "(q^{2};q^{2})_{\\infty}^7",
            vars: "i j k",
            comps: &[Comp { quad: "j^2+j+k+(i+j-k)^2", unit: "2j" }, Comp { quad: "j^2+j+k+(i+j-k+1)^2", unit: "2j" }],
            subs: "1:i, 2:j, 2:k",
            params: "",
            product: "(q^2;q^2)^7 * (q;q)^-4 * (q^4;q^4)^-2",
            samples: &[],
        },
        // index (1,2,3)
        Def {
            id: "I-123-frac",
            status: P,
            anchor: "index (1,2,3)",
            quote: "(u^{2};q)_{\\infty}(q,-u^{2};q^{2})_{\\infty}",
            vars: "i j k",
            comps: &one(r123, "2i+2j"),
            subs: "1:i, 2:j, 3:k",
            params: "u:i+3k",
            product: "(u^2;q) * (q,-u^2;q^2) * (-u^6;q^6)^-1",
            samples: &["u=q", "u=-q", "u=q^2", "u=q^(1/2)", "u=2*q"],
        },
        Def {
            id: "I-123-frac-c1",
            status: P,
            anchor: "index (1,2,3)",
            quote: "(q;q)_{\\infty}(q^{3};q^{6})_{\\infty}(q^{2},q^{10};q^{12})_{\\infty}",
            vars: "i j k",
            comps: &one("(i^2+3k)/2+(i-2j+3k)^2/4", "2i+2j"),
            subs: "1:i, 2:j, 3:k",
            params: "",
            product: "(q;q) * (q^3;q^6) * (q^2,q^10;q^12)",
            samples: &[],
        },
        Def {
            id: "I-123-frac-c2",
            status: P,
            anchor: "index (1,2,3)",
            quote: "\\frac{(q^{2};q)_{\\infty}(q;q^{2})_{\\infty}}{(q^{2},q^{10};q^{12})_{\\infty}}",
            vars: "i j k",
            comps: &one("(i^2+i+6k)/2+(i-2j+3k)^2/4", "2i+2j"),
            subs: "1:i, 2:j, 3:k",
            params: "",
            product: "(q^2;q) * (q;q^2) * (q^2,q^10;q^12)^-1",
            samples: &[],
        },
        Def {
            id: "I-123-gauss",
            status: P,
            anchor: "index (1,2,3)",
            quote: "(q;q^{2})_{\\infty}(-u^{2};q^{3})_{\\infty}",
            vars: "i j k",
            comps: &one(r123, "i-2j+3k"),
            subs: "1:i, 2:j, 3:k",
            params: "u:i+k",
            product: "(q;q^2) * (-u^2;q^3) * (u^2;q^6)^-1",
            samples: &["u=q", "u=q^(3/2)", "u=-q", "u=q^2", "u=2*q"],
        },
        Def {
            id: "I-123-gauss-c1",
            status: P,
            anchor: "index (1,2,3)",
            quote: "(q;q^{2})_{\\infty}(q^{3};q^{6})_{\\infty}^{2}(q^{12};q^{12})_{\\infty}",
            vars: "i j k",
            comps: &one(r123c, "2i+2j"),
            subs: "1:i, 2:j, 3:k",
            params: "",
            product: "(q;q^2) * (q^3;q^6)^2 * (q^12;q^12)",
            samples: &[],
        },
        Def {
            id: "I-123-gauss-c2",
            status: P,
            anchor: "index (1,2,3)",
            quote: "\\frac{(q,q^{5};q^{6})_{\\infty}}{(q^{3};q^{6})_{\\infty}}",
            vars: "i j k",
            comps: &one(r123c, "i-2j+3k"),
            subs: "1:i, 2:j, 3:k",
            params: "",
            product: "(q,q^5;q^6) * (q^3;q^6)^-1",
            samples: &[],
        },
        // index (1,2,4)
        Def {
            id: "I-124-a",
            status: P,
            anchor: "index (1,2,4)",
            quote: "(-u;q)_\\infty",
            vars: "i j k",
            comps: &one("(i+j+2k)(i+j+2k-1)+j+2k^2", "2k"),
            subs: "1:i, 2:j, 4:k",
            params: "u:i+2j+4k",
            product: "(-u;q)",
            samples: &["u=1", "u=q", "u=-q^(1/2)", "u=2", "u=z4"],
        },
        Def {
            id: "I-124-b",
            status: P,
            anchor: "index (1,2,4)",
            quote: "(q^4,q^{12},q^{16};q^{16})_\\infty",
            vars: "i j k",
            comps: &one("(i+j+2k)(i+j+2k-1)+2i+3j+2k^2+6k", "2j"),
            subs: "1:i, 2:j, 4:k",
            params: "",
            product: "(q^4,q^12,q^16;q^16) * (q^2;q^2)^-1",
            samples: &[],
        },
        Def {
            id: "I-124-c",
            status: P,
            anchor: "index (1,2,4)",
            quote: "\\frac{(q^8;q^8)_\\infty^2}{(q^2;q^2)_\\infty (q^{16};q^{16})_\\infty}",
            vars: "i j k",
            comps: &one("(i+j+2k)^2+2k^2", "2j"),
            subs: "1:i, 2:j, 4:k",
            params: "",
            product: "(q^8;q^8)^2 * (q^2;q^2)^-1 * (q^16;q^16)^-1",
            samples: &[],
        },
    ];
    out.extend(defs.into_iter().map(record));
    out
}

/// Reports whose record status is "proved-in-paper" and that did not pass.
pub fn proof_failures(reports: &[VerifyReport]) -> Vec<&VerifyReport> {
    reports.iter().filter(|r| r.status.as_deref() == Some(Status::ProvedInPaper.as_str()) && !r.is_pass()).collect()
}

/// The lowest non-integral exponent with a nonzero coefficient.
pub fn first_fractional_exponent(s: &crate::QSeries) -> Option<Exponent> {
    s.terms().map(|(e, _)| e).find(|e| !e.is_integer())
}
