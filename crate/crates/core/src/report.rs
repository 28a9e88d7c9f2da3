//! Verification reports shared by the catalog, hyper and ctengine checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::monomial::Monomial;
use crate::parse::exponent_str;
use crate::qseries::QSeries;
use crate::Exponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub exponent: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    pub assignment: BTreeMap<String, String>,
    pub cap: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
            Verdict::Error => "ERROR",
        };
        f.pad(s)
    }
}

impl VerifyReport {
    pub fn new<'a, I>(id: &str, assignment: I, cap: Exponent) -> Self
    where
        I: IntoIterator<Item = (&'a String, &'a Monomial)>,
    {
        VerifyReport {
            id: id.to_string(),
            status: None,
            assignment: assignment.into_iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            cap: exponent_str(&cap),
            verdict: Verdict::Skip,
            first_difference: None,
            reason: None,
            wall_ms: None,
        }
    }

    pub fn skip(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Skip;
        self.reason = Some(reason.into());
        self
    }

    pub fn error(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Error;
        self.reason = Some(reason.into());
        self
    }

    /// PASS when both series agree up to the smaller cap, FAIL with the first
    /// differing coefficient otherwise.
    pub fn compare(mut self, lhs: &QSeries, rhs: &QSeries) -> Self {
        match lhs.first_difference(rhs) {
            None => self.verdict = Verdict::Pass,
            Some(d) => {
                self.verdict = Verdict::Fail;
                self.first_difference = Some(Mismatch {
                    exponent: exponent_str(&d.exponent),
                    lhs: d.lhs.to_string(),
                    rhs: d.rhs.to_string(),
                });
            }
        }
        self
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for VerifyReport {
    /// `I-rr-1 PASS cap=40 [cited] u=-q (3 ms)`, with the mismatch or reason appended.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} cap={}", self.id, self.verdict, self.cap)?;
        if let Some(s) = &self.status {
            write!(f, " [{s}]")?;
        }
        for (k, v) in &self.assignment {
            write!(f, " {k}={v}")?;
        }
        if let Some(d) = &self.first_difference {
            write!(f, " first difference at q^{}: {} vs {}", d.exponent, d.lhs, d.rhs)?;
        }
        if let Some(r) = &self.reason {
            write!(f, " ({r})")?;
        }
        if let Some(t) = self.wall_ms {
            write!(f, " ({t} ms)")?;
        }
        Ok(())
    }
}

/// PASS/FAIL/SKIP/ERROR counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub error: usize,
}

impl Summary {
    pub fn of(reports: &[VerifyReport]) -> Self {
        let mut s = Summary::default();
        for r in reports {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Skip => s.skip += 1,
                Verdict::Error => s.error += 1,
            }
        }
        s
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PASS {}  FAIL {}  SKIP {}  ERROR {}", self.pass, self.fail, self.skip, self.error)
    }
}
