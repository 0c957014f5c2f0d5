//! One-dimensional formal group laws F(X, Y) at finite total-degree
//! precision, and their m-truncations over 𝔽_p.
//!
//! Constructors:
//!
//! * [`FormalGroupLaw::additive`]: X + Y
//! * [`FormalGroupLaw::multiplicative`]: X + Y + XY
//! * [`FormalGroupLaw::honda`]: the reduction mod p of ℓ⁻¹(ℓ(X) + ℓ(Y)) with
//!   ℓ = [`honda_logarithm`], a law of height h over 𝔽_p
//! * [`FormalGroupLaw::honda_integral`]: the same law before reduction,
//!   over ℚ (its coefficients are p-integral)
//! * [`FormalGroupLaw::custom`]: any body passing the unit checks
//!
//! A law remembers how it was built ([`LawKind`]) so that it can be rebuilt
//! at a higher precision. The polynomiality probe
//! [`FormalGroupLaw::coeff_of_y`] relies on this.

mod poly3;
mod truncated;

pub use truncated::TruncatedGroupLaw;

use std::fmt;

use thiserror::Error;

use crate::exactnum::{ArithError, FpElem, PrimeField, Rat, Rationals, Scalar};
use crate::series::{SeriesError, TruncSeries1, TruncSeries2};
use poly3::{series_coeff_map, Poly3, Truncation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FglError {
    #[error("precision {0} is too small (need at least 2)")]
    PrecisionTooSmall(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("not a formal group law: {reason} (first failing monomial {monomial})")]
    InvalidLaw { monomial: String, reason: String },
    #[error("insufficient precision: need {needed}, have {have}")]
    InsufficientPrecision { needed: usize, have: usize },
    #[error("p-series has lowest degree {degree}, which is not a power of {p}")]
    MalformedPSeries { degree: usize, p: u64 },
    #[error("truncated law fails its axioms: {0}")]
    TruncationAxiom(String),
    #[error("a custom law cannot be rebuilt at precision {0}")]
    CannotExtend(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// How a law was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LawKind {
    Additive,
    Multiplicative,
    Honda { p: u64, h: u32 },
    Custom,
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawKind::Additive => f.write_str("additive"),
            LawKind::Multiplicative => f.write_str("multiplicative"),
            LawKind::Honda { p, h } => write!(f, "honda:{p}:{h}"),
            LawKind::Custom => f.write_str("custom"),
        }
    }
}

/// Scalars over which the Honda law can be built.
pub trait LawScalar: Scalar {
    fn honda_body(field: Self::Field, p: u64, h: u32, n: usize) -> Result<TruncSeries2<Self>, FglError>;
}

impl LawScalar for Rat {
    fn honda_body(_: Rationals, p: u64, h: u32, n: usize) -> Result<TruncSeries2<Rat>, FglError> {
        let log = honda_logarithm(p, h, n)?;
        let sum = TruncSeries2::from_univariate(&log, false).add(&TruncSeries2::from_univariate(&log, true))?;
        Ok(TruncSeries2::inverse_compose(&log, &sum)?)
    }
}

impl LawScalar for FpElem {
    fn honda_body(field: PrimeField, p: u64, h: u32, n: usize) -> Result<TruncSeries2<FpElem>, FglError> {
        if field.p() != p {
            return Err(FglError::InvalidParameters(format!(
                "Honda law for p = {p} requested over {field}"
            )));
        }
        Ok(Rat::honda_body(Rationals, p, h, n)?.reduce_mod_p(field)?)
    }
}

/// ℓ(X) = Σ_{n ≥ 0} p^(-n) X^(p^(nh)), truncated at X^N.
pub fn honda_logarithm(p: u64, h: u32, n: usize) -> Result<TruncSeries1<Rat>, FglError> {
    validate_honda(p, h, n)?;
    let mut terms = Vec::new();
    let mut exp: u128 = 1;
    let mut k: u32 = 0;
    while exp < n as u128 {
        let den = num_bigint::BigInt::from(p).pow(k);
        terms.push((exp as usize, Rat::new(1, den)?));
        exp *= (p as u128).pow(h);
        k += 1;
    }
    Ok(TruncSeries1::from_terms(Rationals, terms, n))
}

fn validate_honda(p: u64, h: u32, n: usize) -> Result<(), FglError> {
    PrimeField::new(p)?;
    if h == 0 {
        return Err(FglError::InvalidParameters("height must be at least 1".into()));
    }
    if n < 2 {
        return Err(FglError::PrecisionTooSmall(n));
    }
    Ok(())
}

/// Outcome of [`FormalGroupLaw::check_axioms`]. Failures are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    /// F(0, Y) ≡ Y
    pub left_unit: bool,
    /// F(X, 0) ≡ X
    pub right_unit: bool,
    pub associativity: bool,
    /// Largest total degree compared.
    pub degree_checked: usize,
    pub first_failure: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.left_unit && self.right_unit && self.associativity
    }

    /// Checks a raw body, which need not be a valid law.
    pub fn for_body<K: Scalar>(body: &TruncSeries2<K>) -> AxiomReport {
        let n = body.precision();
        let field = body.field();
        let mut first_failure = None;
        let unit_ok = |on_x: bool, first_failure: &mut Option<String>| {
            for d in 0..n {
                let (i, j) = if on_x { (d, 0) } else { (0, d) };
                let expected = if d == 1 { K::one(field) } else { K::zero(field) };
                if body.coeff(i, j) != expected {
                    first_failure.get_or_insert_with(|| {
                        format!(
                            "{} at {}",
                            if on_x { "F(X,0) != X" } else { "F(0,Y) != Y" },
                            monomial_label(i, j)
                        )
                    });
                    return false;
                }
            }
            true
        };
        let right_unit = unit_ok(true, &mut first_failure);
        let left_unit = unit_ok(false, &mut first_failure);

        let trunc = Truncation::TotalDegree(n);
        let coeffs = series_coeff_map(body);
        let f_xy = Poly3::embed(field, body.terms(), (0, 1), trunc);
        let f_yz = Poly3::embed(field, body.terms(), (1, 2), trunc);
        let x = Poly3::variable(field, 0);
        let z = Poly3::variable(field, 2);
        let associativity = if body.constant_term().is_zero() {
            let lhs = Poly3::substitute(field, &coeffs, &f_xy, &z, n, trunc);
            let rhs = Poly3::substitute(field, &coeffs, &x, &f_yz, n, trunc);
            match first_difference(&lhs, &rhs) {
                None => true,
                Some(e) => {
                    first_failure.get_or_insert_with(|| {
                        format!("associativity fails at X^{}*Y^{}*Z^{}", e[0], e[1], e[2])
                    });
                    false
                }
            }
        } else {
            first_failure.get_or_insert_with(|| "nonzero constant term".to_string());
            false
        };
        AxiomReport {
            left_unit,
            right_unit,
            associativity,
            degree_checked: n - 1,
            first_failure,
        }
    }
}

fn first_difference<K: Scalar>(a: &Poly3<K>, b: &Poly3<K>) -> Option<[usize; 3]> {
    let mut keys: Vec<[usize; 3]> = a.terms().chain(b.terms()).map(|(e, _)| *e).collect();
    keys.sort_by_key(|e| (e[0] + e[1] + e[2], *e));
    keys.dedup();
    keys.into_iter().find(|e| a.get(e) != b.get(e))
}

fn monomial_label(i: usize, j: usize) -> String {
    match (i, j) {
        (0, 0) => "1".into(),
        _ => crate::series::monomial_text(i, j),
    }
}

/// Height of a law over 𝔽_p, as far as the precision can tell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Height {
    /// [p](X) = u·X^(p^h) + higher terms with u ≠ 0.
    Finite { h: u32, unit: FpElem },
    /// [p](X) ≡ 0 mod X^N. Says nothing about degrees ≥ N.
    InfiniteAtPrecision(usize),
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite { h, .. } => write!(f, "height {h}"),
            Height::InfiniteAtPrecision(n) => write!(f, "height infinite at precision {n}"),
        }
    }
}

/// The coefficient of Y^n computed at two precisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffProbe<K: Scalar> {
    pub n: usize,
    /// Known modulo X^(N - n).
    pub low: TruncSeries1<K>,
    /// Known modulo X^(N' - n).
    pub high: TruncSeries1<K>,
    /// Both agree below X^(N - n), and `high` has no terms of X-degree in
    /// [N - n, N' - n). Evidence of polynomiality, not a proof.
    pub stabilized: bool,
}

impl<K: Scalar> CoeffProbe<K> {
    /// Nonzero terms of the higher-precision coefficient, as (X-degree, c).
    pub fn polynomial(&self) -> Vec<(usize, K)> {
        self.high
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| (d, c.clone()))
            .collect()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FormalGroupLaw<K: Scalar> {
    body: TruncSeries2<K>,
    kind: LawKind,
}

impl<K: LawScalar> FormalGroupLaw<K> {
    pub fn additive(field: K::Field, n: usize) -> Result<Self, FglError> {
        if n < 2 {
            return Err(FglError::PrecisionTooSmall(n));
        }
        let one = K::one(field);
        let body = TruncSeries2::from_terms(field, [(1, 0, one.clone()), (0, 1, one)], n);
        Ok(FormalGroupLaw {
            body,
            kind: LawKind::Additive,
        })
    }

    pub fn multiplicative(field: K::Field, n: usize) -> Result<Self, FglError> {
        if n < 2 {
            return Err(FglError::PrecisionTooSmall(n));
        }
        let one = K::one(field);
        let body = TruncSeries2::from_terms(
            field,
            [(1, 0, one.clone()), (0, 1, one.clone()), (1, 1, one)],
            n,
        );
        Ok(FormalGroupLaw {
            body,
            kind: LawKind::Multiplicative,
        })
    }

    /// Validates the unit axioms and the linear terms; associativity is left
    /// to [`FormalGroupLaw::check_axioms`].
    pub fn custom(body: TruncSeries2<K>) -> Result<Self, FglError> {
        if body.precision() < 2 {
            return Err(FglError::PrecisionTooSmall(body.precision()));
        }
        let field = body.field();
        for d in 0..body.precision() {
            let expected = if d == 1 { K::one(field) } else { K::zero(field) };
            for (i, j) in [(d, 0), (0, d)] {
                if body.coeff(i, j) != expected {
                    return Err(FglError::InvalidLaw {
                        monomial: monomial_label(i, j),
                        reason: if d == 1 {
                            "linear coefficient must be 1".into()
                        } else {
                            "F(X,0) = X and F(0,Y) = Y must hold".into()
                        },
                    });
                }
            }
        }
        Ok(FormalGroupLaw {
            body,
            kind: LawKind::Custom,
        })
    }

    /// The same law at another precision. Custom laws can only shrink.
    pub fn at_precision(&self, n: usize) -> Result<Self, FglError> {
        let field = self.field();
        match self.kind {
            LawKind::Additive => Self::additive(field, n),
            LawKind::Multiplicative => Self::multiplicative(field, n),
            LawKind::Honda { p, h } => {
                validate_honda(p, h, n)?;
                Ok(FormalGroupLaw {
                    body: K::honda_body(field, p, h, n)?,
                    kind: self.kind,
                })
            }
            LawKind::Custom if n <= self.precision() => Ok(FormalGroupLaw {
                body: self.body.truncate(n),
                kind: LawKind::Custom,
            }),
            LawKind::Custom => Err(FglError::CannotExtend(n)),
        }
    }

    /// Coefficient of Y^n as a polynomial in X, at this precision N and at
    /// N' (rebuilt). See [`CoeffProbe::stabilized`].
    pub fn coeff_of_y(&self, n: usize, n_high: usize) -> Result<CoeffProbe<K>, FglError> {
        let n_low = self.precision();
        if n >= n_low || n_high < n_low {
            return Err(FglError::InvalidParameters(format!(
                "need n < N <= N' (n = {n}, N = {n_low}, N' = {n_high})"
            )));
        }
        match self.at_precision(n_high) {
            Ok(high) => Ok(self.probe_against(&high, n)),
            Err(FglError::CannotExtend(_)) => {
                let low = self.y_coefficient(n);
                Ok(CoeffProbe {
                    n,
                    high: low.clone(),
                    low,
                    stabilized: false,
                })
            }
            Err(e) => Err(e),
        }
    }

    pub(crate) fn probe_against(&self, high: &Self, n: usize) -> CoeffProbe<K> {
        let low = self.y_coefficient(n);
        let high_c = high.y_coefficient(n);
        let agree = (0..low.precision()).all(|d| low.coeff(d) == high_c.coeff(d));
        let nothing_new = (low.precision()..high_c.precision()).all(|d| high_c.coeff(d).is_zero());
        CoeffProbe {
            n,
            low,
            high: high_c,
            stabilized: agree && nothing_new && high.kind != LawKind::Custom,
        }
    }
}

impl<K: Scalar> FormalGroupLaw<K> {
    pub fn body(&self) -> &TruncSeries2<K> {
        &self.body
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn precision(&self) -> usize {
        self.body.precision()
    }

    pub fn field(&self) -> K::Field {
        self.body.field()
    }

    pub fn check_axioms(&self) -> AxiomReport {
        AxiomReport::for_body(&self.body)
    }

    pub fn is_commutative(&self) -> bool {
        self.body.swap() == self.body
    }

    /// [k](X): the k-fold formal sum X +_F … +_F X.
    pub fn multiplication_series(&self, k: u64) -> TruncSeries1<K> {
        let n = self.precision();
        let x = TruncSeries1::x(self.field(), n);
        let mut acc = TruncSeries1::zero(self.field(), n);
        for _ in 0..k {
            acc = self
                .body
                .eval_univariate(&x, &acc)
                .expect("X and [k](X) vanish at 0");
        }
        acc
    }

    /// ι(X) with F(X, ι(X)) ≡ 0, one coefficient at a time: the X^d
    /// coefficient of F(X, ι) depends on ι_d only through the Y term.
    pub fn formal_inverse(&self) -> TruncSeries1<K> {
        let n = self.precision();
        let field = self.field();
        let x = TruncSeries1::x(field, n);
        let mut iota = x.neg();
        for d in 2..n {
            let head = iota.truncate(d + 1);
            let value = self
                .body
                .truncate(d + 1)
                .eval_univariate(&x.truncate(d + 1), &head)
                .expect("zero constant terms");
            let mut coeffs = iota.coeffs().to_vec();
            coeffs[d] = -value.coeff(d).clone();
            iota = TruncSeries1::new(field, coeffs, n);
        }
        iota
    }

    /// Coefficient of Y^n as a series in X, known modulo X^(N - n).
    pub fn y_coefficient(&self, n: usize) -> TruncSeries1<K> {
        let len = self.precision() - n;
        let coeffs = (0..len).map(|i| self.body.coeff(i, n)).collect();
        TruncSeries1::new(self.field(), coeffs, len)
    }
}

impl FormalGroupLaw<FpElem> {
    /// F_h over 𝔽_p.
    pub fn honda(p: u64, h: u32, n: usize) -> Result<Self, FglError> {
        validate_honda(p, h, n)?;
        let field = PrimeField::new(p)?;
        Ok(FormalGroupLaw {
            body: FpElem::honda_body(field, p, h, n)?,
            kind: LawKind::Honda { p, h },
        })
    }

    pub fn p_series(&self) -> TruncSeries1<FpElem> {
        self.multiplication_series(self.field().p())
    }

    pub fn height(&self) -> Result<Height, FglError> {
        let p = self.field().p();
        let series = self.p_series();
        let Some(v) = series.valuation() else {
            return Ok(Height::InfiniteAtPrecision(self.precision()));
        };
        let mut power = 1usize;
        let mut h = 0u32;
        while power < v {
            power *= p as usize;
            h += 1;
        }
        if power != v || h == 0 {
            return Err(FglError::MalformedPSeries { degree: v, p });
        }
        Ok(Height::Finite {
            h,
            unit: *series.coeff(v),
        })
    }

    /// F[m]: keep the monomials X^i Y^j with i, j < p^m.
    pub fn truncate(&self, m: u32) -> Result<TruncatedGroupLaw, FglError> {
        let p = self.field().p() as usize;
        let q = p.checked_pow(m).ok_or_else(|| FglError::InvalidParameters("p^m overflows".into()))?;
        let needed = 2 * q - 1;
        if self.precision() < needed {
            return Err(FglError::InsufficientPrecision {
                needed,
                have: self.precision(),
            });
        }
        let law = TruncatedGroupLaw::from_terms(
            self.field(),
            m,
            self.body.terms().filter(|(i, j, _)| *i < q && *j < q).map(|(i, j, c)| (i, j, *c)),
        );
        if let Some(failure) = law.axiom_failure() {
            return Err(FglError::TruncationAxiom(failure));
        }
        Ok(law)
    }
}

impl FormalGroupLaw<Rat> {
    /// ℓ⁻¹(ℓ(X) + ℓ(Y)) over ℚ, before reduction.
    pub fn honda_integral(p: u64, h: u32, n: usize) -> Result<Self, FglError> {
        validate_honda(p, h, n)?;
        Ok(FormalGroupLaw {
            body: Rat::honda_body(Rationals, p, h, n)?,
            kind: LawKind::Honda { p, h },
        })
    }

    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<FormalGroupLaw<FpElem>, FglError> {
        let body = self.body.reduce_mod_p(field)?;
        let kind = match self.kind {
            LawKind::Honda { p, h } if p == field.p() => LawKind::Honda { p, h },
            LawKind::Honda { .. } => LawKind::Custom,
            other => other,
        };
        Ok(FormalGroupLaw { body, kind })
    }
}

impl<K: Scalar> fmt::Display for FormalGroupLaw<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.body, f)
    }
}

impl<K: Scalar> fmt::Debug for FormalGroupLaw<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalGroupLaw[{}, {}]({})", self.kind, self.field(), self.body)
    }
}
