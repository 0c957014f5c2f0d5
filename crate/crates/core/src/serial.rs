//! JSON forms of laws and derivation tables.
//!
//! Law: `{"p": 2, "precision": 8, "monomials": [{"i": 1, "j": 0, "c": 1}, ...]}`.
//! Over ℚ, `p` is 0 and each `c` is a string such as `"-1/2"`.
//!
//! Table: `{"p": 2, "B": 8, "entries": [{"n": 0, "poly": "t"}, ...]}`.
//!
//! Output is pretty-printed with monomials in the series' own order, so
//! parsing and re-serializing reproduces the same bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{FpElem, PrimeField, Rat, Rationals, Scalar};
use crate::fgl::{FglError, FormalGroupLaw, LawScalar};
use crate::hsd::{HSDerivation, HsdError, Window};
use crate::series::{LaurentPoly, SeriesError, TruncSeries2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerialError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("invalid content: {0}")]
    Invalid(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Hsd(#[from] HsdError),
}

impl From<serde_json::Error> for SerialError {
    fn from(e: serde_json::Error) -> Self {
        SerialError::Json(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Int(u64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialJson {
    pub i: usize,
    pub j: usize,
    pub c: CoeffJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawJson {
    pub p: u64,
    pub precision: usize,
    pub monomials: Vec<MonomialJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub n: usize,
    pub poly: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub p: u64,
    #[serde(rename = "B")]
    pub bound: usize,
    pub entries: Vec<EntryJson>,
}

/// Scalars with a JSON coefficient form; `p` is 0 for ℚ.
pub trait JsonScalar: Scalar {
    fn field_from_p(p: u64) -> Result<Self::Field, SerialError>;
    fn to_json(&self) -> CoeffJson;
    fn from_json(field: Self::Field, c: &CoeffJson) -> Result<Self, SerialError>;
}

impl JsonScalar for FpElem {
    fn field_from_p(p: u64) -> Result<PrimeField, SerialError> {
        PrimeField::new(p).map_err(|e| SerialError::Invalid(e.to_string()))
    }

    fn to_json(&self) -> CoeffJson {
        CoeffJson::Int(self.value())
    }

    fn from_json(field: PrimeField, c: &CoeffJson) -> Result<Self, SerialError> {
        match c {
            CoeffJson::Int(v) if *v < field.p() => Ok(FpElem::new(field, *v)),
            other => Err(SerialError::Invalid(format!(
                "coefficient {other:?} is not a residue mod {}",
                field.p()
            ))),
        }
    }
}

impl JsonScalar for Rat {
    fn field_from_p(p: u64) -> Result<Rationals, SerialError> {
        if p == 0 {
            Ok(Rationals)
        } else {
            Err(SerialError::Invalid(format!("expected p = 0 for Q, got {p}")))
        }
    }

    fn to_json(&self) -> CoeffJson {
        CoeffJson::Text(self.to_string())
    }

    fn from_json(_: Rationals, c: &CoeffJson) -> Result<Self, SerialError> {
        match c {
            CoeffJson::Text(s) => s.parse().map_err(|e: crate::exactnum::ArithError| SerialError::Invalid(e.to_string())),
            CoeffJson::Int(_) => Err(SerialError::Invalid("rational coefficients are strings".into())),
        }
    }
}

pub fn law_to_value<K: JsonScalar>(law: &FormalGroupLaw<K>) -> LawJson {
    LawJson {
        p: K::characteristic(law.field()),
        precision: law.precision(),
        monomials: law
            .body()
            .terms()
            .map(|(i, j, c)| MonomialJson { i, j, c: c.to_json() })
            .collect(),
    }
}

pub fn law_to_json<K: JsonScalar>(law: &FormalGroupLaw<K>) -> String {
    serde_json::to_string_pretty(&law_to_value(law)).expect("serializable")
}

/// Parses a law; the result is a custom law and must pass the unit checks.
pub fn law_from_json<K: JsonScalar + LawScalar>(text: &str) -> Result<FormalGroupLaw<K>, SerialError> {
    let raw: LawJson = serde_json::from_str(text)?;
    let field = K::field_from_p(raw.p)?;
    if raw.monomials.iter().any(|m| m.i + m.j >= raw.precision) {
        return Err(SerialError::Invalid("monomial beyond the stated precision".into()));
    }
    let terms = raw
        .monomials
        .iter()
        .map(|m| Ok((m.i, m.j, K::from_json(field, &m.c)?)))
        .collect::<Result<Vec<_>, SerialError>>()?;
    let body = TruncSeries2::from_terms(field, terms, raw.precision);
    Ok(FormalGroupLaw::custom(body)?)
}

pub fn table_to_value<K: JsonScalar>(d: &HSDerivation<K>) -> TableJson {
    TableJson {
        p: K::characteristic(d.field()),
        bound: d.bound(),
        entries: d
            .images()
            .iter()
            .enumerate()
            .map(|(n, q)| EntryJson { n, poly: q.to_string() })
            .collect(),
    }
}

pub fn table_to_json<K: JsonScalar>(d: &HSDerivation<K>) -> String {
    serde_json::to_string_pretty(&table_to_value(d)).expect("serializable")
}

/// Parses a table. Orders missing from `entries` are zero, except ∂_0(t),
/// which defaults to t.
pub fn table_from_json<K: JsonScalar>(text: &str, window: Window) -> Result<HSDerivation<K>, SerialError> {
    let raw: TableJson = serde_json::from_str(text)?;
    let field = K::field_from_p(raw.p)?;
    let mut images: Vec<Option<LaurentPoly<K>>> = vec![None; raw.bound];
    for e in &raw.entries {
        let slot = images
            .get_mut(e.n)
            .ok_or_else(|| SerialError::Invalid(format!("entry n = {} is beyond B = {}", e.n, raw.bound)))?;
        if slot.is_some() {
            return Err(SerialError::Invalid(format!("entry n = {} appears twice", e.n)));
        }
        *slot = Some(LaurentPoly::parse(field, &e.poly)?);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(n, q)| {
            q.unwrap_or_else(|| if n == 0 { LaurentPoly::t(field) } else { LaurentPoly::zero(field) })
        })
        .collect();
    Ok(HSDerivation::from_table(field, images, window)?)
}
