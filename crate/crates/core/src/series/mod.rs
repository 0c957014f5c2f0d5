//! Truncated power series and Laurent polynomials over an exact field.
//!
//! * [`LaurentPoly`]: sparse elements of k[t, 1/t].
//! * [`TruncSeries1`]: f(X) mod X^N, dense.
//! * [`TruncSeries2`]: F(X, Y) modulo all monomials of total degree ≥ N.
//! * [`XSeries`]: Σ q_n(t) X^n mod X^B with Laurent coefficients.
//!
//! Binary operations on series of different precision return the smaller
//! precision. Operations between different fields (say 𝔽_2 and 𝔽_3) fail
//! with [`SeriesError::FieldMismatch`].

mod laurent;
mod trunc1;
mod trunc2;
mod xseries;

pub use laurent::LaurentPoly;
pub use trunc1::TruncSeries1;
pub use trunc2::TruncSeries2;
pub use xseries::XSeries;

pub(crate) use trunc2::monomial_text;

use thiserror::Error;

use crate::exactnum::{ArithError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },
    #[error("substituted series must have zero constant term")]
    PositiveValuationRequired,
    #[error("series is not reversible (needs f(0) = 0 and an invertible linear coefficient)")]
    NotReversible,
    #[error("constant term is not a unit")]
    NotAUnit,
    #[error("coefficient {value} of {monomial} is not {p}-integral")]
    IntegralityViolation {
        monomial: String,
        value: String,
        p: u64,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub(crate) fn check_fields<K: Scalar>(a: K::Field, b: K::Field) -> Result<(), SeriesError> {
    if a == b {
        Ok(())
    } else {
        Err(SeriesError::FieldMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

/// Joins `(coefficient, monomial)` pairs into "a + 2*X^2 - 1/3*X^3".
/// An empty monomial string stands for the constant term.
pub(crate) fn render_terms<'a, K: Scalar>(
    terms: impl IntoIterator<Item = (&'a K, String)>,
) -> String {
    let mut out = String::new();
    for (c, mono) in terms {
        let negative = c.is_negative();
        let magnitude = if negative { -c.clone() } else { c.clone() };
        let body = if mono.is_empty() {
            magnitude.coeff_text()
        } else if magnitude.is_one() {
            mono
        } else {
            format!("{}*{}", magnitude.coeff_text(), mono)
        };
        match (out.is_empty(), negative) {
            (true, false) => out.push_str(&body),
            (true, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (false, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (false, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

pub(crate) fn power_text(var: &str, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{e}"),
    }
}
