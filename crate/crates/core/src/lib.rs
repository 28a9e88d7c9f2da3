//! Exact arithmetic for multi-sum Rogers-Ramanujan type identities.
//!
//! Both sides of an identity are expanded as truncated q-series over the
//! cyclotomic field Q(ζ₁₂) and compared coefficient by coefficient.

pub mod catalog;
pub mod ctengine;
pub mod error;
pub mod hyper;
pub mod monomial;
pub(crate) mod parse;
pub mod partitions;
pub mod products;
pub mod qseries;
pub mod report;
pub mod ring;
pub mod sums;

pub use error::{Error, Result};
pub use monomial::{Monomial, ParamMonomial};
pub use parse::{exponent_str, parse_exponent_str};
pub use products::{Factor, ProductExpr, ProductTerm};
pub use qseries::QSeries;
pub use ring::Scalar;
pub use sums::{LinearForm, QuadForm, SumSide, SumSideSpec};

/// Exact rational exponent of `q`.
pub type Exponent = num_rational::Rational64;
