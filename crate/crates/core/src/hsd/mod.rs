//! Hasse-Schmidt derivations on k[t] and k[t, 1/t].
//!
//! An [`HSDerivation`] of order bound B is stored only through the image of
//! the generator, D_X(t) = Σ_{n<B} ∂_n(t) X^n. Everything else is recomputed
//! from the homomorphism property: D_X(q) = q(D_X(t)), with D_X(t)⁻¹ taken in
//! k[t, 1/t][[X]]/(X^B) since ∂_0(t) = t is a unit there.
//!
//! Every polynomial handed back is checked against a [`Window`] of allowed
//! t-exponents; leaving it is an error, never a silent truncation.

mod derivation;
#[cfg(test)]
mod tests;

pub use derivation::{compute_c_f, Derivation};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::exactnum::{FpElem, Scalar};
use crate::fgl::{FglError, FormalGroupLaw, LawKind, LawScalar, TruncatedGroupLaw};
use crate::series::{LaurentPoly, SeriesError, XSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HsdError {
    #[error("order {n} is outside the table (bound {bound})")]
    OrderOutOfRange { n: usize, bound: usize },
    #[error("t^{exponent} falls outside the window {window}")]
    WindowOverflow { exponent: i64, window: Window },
    #[error("coefficient of X^{order} in F(t, X) has not stabilized at precision {precision}")]
    InsufficientPrecision { order: usize, precision: usize },
    #[error("d^(p)(t) is not a constant multiple of d(t)")]
    NotProportional,
    #[error("d^(p) does not vanish")]
    NotNilpotent,
    #[error("d^(p) differs from d")]
    NotMultiplicativelyRestricted,
    #[error("order bound {bound} does not match the truncated law (p^m = {expected})")]
    BoundMismatch { bound: usize, expected: usize },
    #[error("invalid derivation table: {0}")]
    InvalidTable(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Fgl(#[from] FglError),
}

/// Allowed range of t-exponents, both ends inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self, HsdError> {
        if lo > hi {
            return Err(HsdError::InvalidWindow(format!("{lo} > {hi}")));
        }
        Ok(Window { lo, hi })
    }

    pub fn unbounded() -> Self {
        Window {
            lo: i64::MIN,
            hi: i64::MAX,
        }
    }

    /// Default window for the canonical derivation of a law at order bound B:
    /// lowest exponent −(B+1); highest B·p^h for Honda laws, B·N for custom
    /// laws of precision N, and B otherwise.
    pub fn for_law(kind: LawKind, bound: usize, precision: usize) -> Self {
        let b = bound as i64;
        let hi = match kind {
            LawKind::Honda { p, h } => b * (p as i64).pow(h),
            LawKind::Custom => b * precision as i64,
            LawKind::Additive | LawKind::Multiplicative => b,
        };
        Window { lo: -(b + 1), hi }
    }

    pub fn check<K: Scalar>(&self, q: &LaurentPoly<K>) -> Result<(), HsdError> {
        let bad = q
            .max_exp()
            .filter(|&e| e > self.hi)
            .or(q.min_exp().filter(|&e| e < self.lo));
        match bad {
            Some(exponent) => Err(HsdError::WindowOverflow {
                exponent,
                window: *self,
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for Window {
    type Err = HsdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HsdError::InvalidWindow(format!("expected LO:HI, got {s:?}"));
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Window::new(lo, hi)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct HSDerivation<K: Scalar> {
    image: XSeries<K>,
    window: Window,
}

impl<K: Scalar> HSDerivation<K> {
    /// Builds D from the images ∂_0(t), ..., ∂_{B-1}(t); B is `images.len()`.
    pub fn from_table(
        field: K::Field,
        images: Vec<LaurentPoly<K>>,
        window: Window,
    ) -> Result<Self, HsdError> {
        let bound = images.len();
        if bound == 0 {
            return Err(HsdError::InvalidTable("empty table".into()));
        }
        if images[0] != LaurentPoly::t(field) {
            return Err(HsdError::InvalidTable(format!("∂_0(t) = {} instead of t", images[0])));
        }
        for q in &images {
            if q.field() != field {
                return Err(SeriesError::FieldMismatch {
                    left: field.to_string(),
                    right: q.field().to_string(),
                }
                .into());
            }
            window.check(q)?;
        }
        Ok(HSDerivation {
            image: XSeries::new(field, images, bound),
            window,
        })
    }

    pub fn field(&self) -> K::Field {
        self.image.field()
    }

    pub fn bound(&self) -> usize {
        self.image.bound()
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// D_X(t).
    pub fn generator_image(&self) -> &XSeries<K> {
        &self.image
    }

    /// ∂_n(t).
    pub fn image(&self, n: usize) -> Result<&LaurentPoly<K>, HsdError> {
        self.check_order(n)?;
        Ok(self.image.coeff(n))
    }

    pub fn images(&self) -> &[LaurentPoly<K>] {
        self.image.coeffs()
    }

    pub fn with_window(&self, window: Window) -> Result<Self, HsdError> {
        Self::from_table(self.field(), self.images().to_vec(), window)
    }

    /// The same derivation with only ∂_0, ..., ∂_{bound-1}.
    pub fn truncate(&self, bound: usize) -> Result<Self, HsdError> {
        if bound == 0 || bound > self.bound() {
            return Err(HsdError::OrderOutOfRange {
                n: bound,
                bound: self.bound(),
            });
        }
        Ok(HSDerivation {
            image: self.image.truncate(bound),
            window: self.window,
        })
    }

    fn check_order(&self, n: usize) -> Result<(), HsdError> {
        if n < self.bound() {
            Ok(())
        } else {
            Err(HsdError::OrderOutOfRange {
                n,
                bound: self.bound(),
            })
        }
    }

    /// D_X(q) mod X^bound, i.e. ∂_0(q), ..., ∂_{bound-1}(q).
    pub fn apply_series(&self, q: &LaurentPoly<K>, bound: usize) -> Result<XSeries<K>, HsdError> {
        if bound == 0 {
            return Err(HsdError::OrderOutOfRange { n: 0, bound: self.bound() });
        }
        self.check_order(bound - 1)?;
        let gen = self.image.truncate(bound);
        let mut acc = XSeries::new(self.field(), Vec::new(), bound);
        for (e, a) in q.terms() {
            acc = acc.add(&gen.pow(e)?.scale(a));
        }
        for r in acc.coeffs() {
            self.window.check(r)?;
        }
        Ok(acc)
    }

    /// ∂_n(q).
    pub fn apply(&self, q: &LaurentPoly<K>, n: usize) -> Result<LaurentPoly<K>, HsdError> {
        self.check_order(n)?;
        Ok(self.apply_series(q, n + 1)?.coeff(n).clone())
    }

    /// ∂_n(t⁻¹) for n < bound from 0 = Σ_{j+k=n} ∂_j(t) ∂_k(t⁻¹).
    pub fn inverse_image(&self, bound: usize) -> Result<Vec<LaurentPoly<K>>, HsdError> {
        if bound > self.bound() {
            return Err(HsdError::OrderOutOfRange {
                n: bound,
                bound: self.bound(),
            });
        }
        let field = self.field();
        let t_inv = LaurentPoly::t_pow(field, -1);
        let mut out: Vec<LaurentPoly<K>> = Vec::with_capacity(bound);
        for n in 0..bound {
            let next = if n == 0 {
                t_inv.clone()
            } else {
                let mut acc = LaurentPoly::zero(field);
                for j in 1..=n {
                    acc = &acc + &(self.image.coeff(j) * &out[n - j]);
                }
                -&(&acc * &t_inv)
            };
            self.window.check(&next)?;
            out.push(next);
        }
        Ok(out)
    }

    /// ∂_n(qr) = Σ_{j+k=n} ∂_j(q) ∂_k(r).
    pub fn check_leibniz(
        &self,
        q: &LaurentPoly<K>,
        r: &LaurentPoly<K>,
        n: usize,
    ) -> Result<bool, HsdError> {
        self.check_order(n)?;
        let dq = self.apply_series(q, n + 1)?;
        let dr = self.apply_series(r, n + 1)?;
        let lhs = self.apply(&(q * r), n)?;
        let mut rhs = LaurentPoly::zero(self.field());
        for j in 0..=n {
            rhs = &rhs + &(dq.coeff(j) * dr.coeff(n - j));
        }
        Ok(lhs == rhs)
    }

    /// F-iterativity against a full law, for all (i, j) with i + j < B.
    pub fn check_iterativity(&self, law: &FormalGroupLaw<K>) -> Result<IterativityReport, HsdError> {
        let b = self.bound();
        if law.precision() < b {
            return Err(HsdError::InsufficientPrecision {
                order: b - 1,
                precision: law.precision(),
            });
        }
        let f = law.body().truncate(b);
        let mut rhs: BTreeMap<(usize, usize), LaurentPoly<K>> = BTreeMap::new();
        let mut power = crate::series::TruncSeries2::one(self.field(), b);
        for n in 0..b {
            let dn = self.image.coeff(n);
            if !dn.is_zero() {
                for (i, j, c) in power.terms() {
                    add_into(&mut rhs, (i, j), dn.scale(c));
                }
            }
            if n + 1 < b {
                power = power.mul(&f)?;
            }
        }
        self.compare_iterativity(rhs, |j| b - j, IterativityMode::Full)
    }

    fn compare_iterativity(
        &self,
        rhs: BTreeMap<(usize, usize), LaurentPoly<K>>,
        rows: impl Fn(usize) -> usize,
        mode: IterativityMode,
    ) -> Result<IterativityReport, HsdError> {
        let b = self.bound();
        let zero = LaurentPoly::zero(self.field());
        let mut lhs: BTreeMap<(usize, usize), LaurentPoly<K>> = BTreeMap::new();
        for j in 0..b {
            let series = self.apply_series(self.image.coeff(j), rows(j))?;
            for (i, q) in series.into_coeffs().into_iter().enumerate() {
                if !q.is_zero() {
                    lhs.insert((i, j), q);
                }
            }
        }
        for q in rhs.values() {
            self.window.check(q)?;
        }
        let mut keys: Vec<(usize, usize)> = lhs.keys().chain(rhs.keys()).copied().collect();
        keys.sort_by_key(|&(i, j)| (i + j, j));
        keys.dedup();
        for (i, j) in keys {
            let l = lhs.get(&(i, j)).unwrap_or(&zero);
            let r = rhs.get(&(i, j)).unwrap_or(&zero);
            if l != r {
                let diff = l - r;
                let exponent = diff.max_exp().expect("nonzero difference");
                return Ok(IterativityReport {
                    mode,
                    bound: b,
                    failure: Some(Mismatch {
                        i,
                        j,
                        monomial: t_power_text(exponent),
                        lhs: l.to_string(),
                        rhs: r.to_string(),
                    }),
                });
            }
        }
        Ok(IterativityReport {
            mode,
            bound: b,
            failure: None,
        })
    }

    /// Whether the extension to k(t) preserves k[1/t] up to order `bound`:
    /// each ∂_n(t⁻¹) must have no positive exponent.
    pub fn check_p1_extendable(&self, bound: usize) -> Result<P1Report, HsdError> {
        let images = self.inverse_image(bound)?;
        let failure = images
            .iter()
            .enumerate()
            .find(|(_, q)| !q.in_inverse_subring())
            .map(|(n, q)| P1Failure {
                n,
                offending: q.positive_exponents(),
            });
        Ok(P1Report { bound, failure })
    }
}

impl<K: LawScalar> HSDerivation<K> {
    /// ∂_n(t) = coefficient of X^n in F(t, X) for n < B. Each coefficient
    /// must be a stabilized polynomial: the law is rebuilt at precision 2N
    /// and the coefficient may not change or grow.
    pub fn canonical(law: &FormalGroupLaw<K>, bound: usize, window: Window) -> Result<Self, HsdError> {
        let n = law.precision();
        if bound == 0 || bound > n {
            return Err(HsdError::InsufficientPrecision {
                order: bound.saturating_sub(1),
                precision: n,
            });
        }
        let high = match law.at_precision(2 * n) {
            Ok(high) => Some(high),
            Err(FglError::CannotExtend(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let field = law.field();
        let mut images = Vec::with_capacity(bound);
        for k in 0..bound {
            if k == 0 {
                images.push(LaurentPoly::t(field));
                continue;
            }
            let stabilized = high
                .as_ref()
                .is_some_and(|h| law.probe_against(h, k).stabilized);
            if !stabilized {
                return Err(HsdError::InsufficientPrecision {
                    order: k,
                    precision: n,
                });
            }
            let c = law.y_coefficient(k);
            let poly = LaurentPoly::from_terms(
                field,
                c.coeffs().iter().enumerate().map(|(d, a)| (d as i64, a.clone())),
            );
            images.push(poly);
        }
        Self::from_table(field, images, window)
    }
}

impl HSDerivation<FpElem> {
    /// F[m]-iterativity: exponents of X and Y are cut at p^m, which must
    /// equal the order bound.
    pub fn check_truncated_iterativity(
        &self,
        law: &TruncatedGroupLaw,
    ) -> Result<IterativityReport, HsdError> {
        let b = self.bound();
        if law.order() != b {
            return Err(HsdError::BoundMismatch {
                bound: b,
                expected: law.order(),
            });
        }
        if law.field() != self.field() {
            return Err(SeriesError::FieldMismatch {
                left: self.field().to_string(),
                right: law.field().to_string(),
            }
            .into());
        }
        let mut rhs: BTreeMap<(usize, usize), LaurentPoly<FpElem>> = BTreeMap::new();
        for n in 0..b {
            let dn = self.image.coeff(n);
            if dn.is_zero() {
                continue;
            }
            for ((i, j), c) in law.power(n) {
                add_into(&mut rhs, (i, j), dn.scale(&c));
            }
        }
        self.compare_iterativity(rhs, |_| b, IterativityMode::Truncated { m: law.m() })
    }
}

fn t_power_text(e: i64) -> String {
    if e == 0 {
        "1".into()
    } else {
        crate::series::power_text("t", e)
    }
}

fn add_into<K: Scalar>(
    map: &mut BTreeMap<(usize, usize), LaurentPoly<K>>,
    key: (usize, usize),
    q: LaurentPoly<K>,
) {
    let field = q.field();
    let slot = map.entry(key).or_insert_with(|| LaurentPoly::zero(field));
    *slot = &*slot + &q;
    if slot.is_zero() {
        map.remove(&key);
    }
}

impl<K: Scalar> fmt::Display for HSDerivation<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, q) in self.images().iter().enumerate() {
            writeln!(f, "∂_{n}(t) = {q}")?;
        }
        Ok(())
    }
}

impl<K: Scalar> fmt::Debug for HSDerivation<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HSDerivation")
            .field("image", &self.image)
            .field("window", &self.window)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterativityMode {
    /// Total degree in X, Y below B.
    Full,
    /// Exponents of X and Y below p^m.
    Truncated { m: u32 },
}

/// First coefficient where Σ ∂_i(∂_j(t)) X^i Y^j and Σ ∂_n(t) F(X,Y)^n differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub i: usize,
    pub j: usize,
    /// Highest t-power at which the two sides differ.
    pub monomial: String,
    pub lhs: String,
    pub rhs: String,
}

/// Both sides are k-algebra maps, so comparing them on t decides equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterativityReport {
    pub mode: IterativityMode,
    pub bound: usize,
    pub failure: Option<Mismatch>,
}

impl IterativityReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for IterativityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope = match self.mode {
            IterativityMode::Full => format!("i + j < {}", self.bound),
            IterativityMode::Truncated { m } => format!("i, j < {} (m = {m})", self.bound),
        };
        match &self.failure {
            None => write!(f, "PASS ({scope})"),
            Some(m) => write!(
                f,
                "FAIL at (i, j) = ({}, {}), monomial {}: {} vs {}",
                m.i, m.j, m.monomial, m.lhs, m.rhs
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1Failure {
    pub n: usize,
    /// Positive exponents of ∂_n(t⁻¹), descending.
    pub offending: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1Report {
    pub bound: usize,
    pub failure: Option<P1Failure>,
}

impl P1Report {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for P1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS (n < {})", self.bound),
            Some(fail) => {
                let monos: Vec<String> = fail.offending.iter().map(|&e| t_power_text(e)).collect();
                write!(f, "FAIL at n={}; offending: {}", fail.n, monos.join(", "))
            }
        }
    }
}
