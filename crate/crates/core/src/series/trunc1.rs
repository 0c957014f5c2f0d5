use std::fmt;

use super::{check_fields, power_text, render_terms, SeriesError};
use crate::exactnum::{FpElem, PrimeField, Rat, Scalar};

/// f(X) = c_0 + c_1 X + … + c_{N-1} X^{N-1} + O(X^N).
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries1<K: Scalar> {
    field: K::Field,
    coeffs: Vec<K>,
}

impl<K: Scalar> TruncSeries1<K> {
    /// Pads with zeros or drops coefficients so that exactly `precision`
    /// remain.
    pub fn new(field: K::Field, mut coeffs: Vec<K>, precision: usize) -> Self {
        assert!(precision >= 1, "precision must be at least 1");
        coeffs.truncate(precision);
        coeffs.resize(precision, K::zero(field));
        debug_assert!(coeffs.iter().all(|c| c.field() == field));
        TruncSeries1 { field, coeffs }
    }

    pub fn zero(field: K::Field, precision: usize) -> Self {
        Self::new(field, Vec::new(), precision)
    }

    pub fn one(field: K::Field, precision: usize) -> Self {
        Self::new(field, vec![K::one(field)], precision)
    }

    /// The series X.
    pub fn x(field: K::Field, precision: usize) -> Self {
        Self::from_terms(field, [(1, K::one(field))], precision)
    }

    /// Sparse constructor; terms at degree ≥ precision are dropped.
    pub fn from_terms(
        field: K::Field,
        terms: impl IntoIterator<Item = (usize, K)>,
        precision: usize,
    ) -> Self {
        let mut s = Self::zero(field, precision);
        for (d, c) in terms {
            if d < precision {
                s.coeffs[d] += c;
            }
        }
        s
    }

    pub fn field(&self) -> K::Field {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, d: usize) -> &K {
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    /// Degree of the lowest nonzero term, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, precision: usize) -> Self {
        Self::new(self.field, self.coeffs.clone(), precision.min(self.precision()))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        check_fields::<K>(self.field, rhs.field)?;
        let n = self.precision().min(rhs.precision());
        let coeffs = (0..n)
            .map(|d| self.coeffs[d].clone() + rhs.coeffs[d].clone())
            .collect();
        Ok(Self::new(self.field, coeffs, n))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        TruncSeries1 {
            field: self.field,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        TruncSeries1 {
            field: self.field,
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, SeriesError> {
        check_fields::<K>(self.field, rhs.field)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn mul_unchecked(&self, rhs: &Self) -> Self {
        let n = self.precision().min(rhs.precision());
        let mut out = vec![K::zero(self.field); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                out[i + j].add_mul_assign(a, b);
            }
        }
        TruncSeries1 {
            field: self.field,
            coeffs: out,
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.field, self.precision());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// f(g(X)) by Horner's rule; g must have zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        check_fields::<K>(self.field, g.field)?;
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::PositiveValuationRequired);
        }
        let n = self.precision().min(g.precision());
        let g = g.truncate(n);
        let mut acc = Self::zero(self.field, n);
        for c in self.coeffs[..n].iter().rev() {
            acc = acc.mul_unchecked(&g);
            acc.coeffs[0] += c.clone();
        }
        Ok(acc)
    }

    /// Compositional inverse, solved one degree at a time.
    ///
    /// Keeps the table `powers[k][d] = [X^d] g^k`. Once g_1..g_{d-1} are known,
    /// every `powers[k][d]` with k ≥ 2 is determined, and the X^d coefficient
    /// of f(g) = X is linear in the single unknown g_d.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        let n = self.precision();
        if !self.coeffs[0].is_zero() || n < 2 || self.coeffs[1].is_zero() {
            return Err(SeriesError::NotReversible);
        }
        let zero = K::zero(self.field);
        let lead_inv = self.coeffs[1].inv()?;
        let mut g = vec![zero.clone(); n];
        // powers[k] for k in 1..n, each a vector of length n
        let mut powers: Vec<Vec<K>> = vec![vec![zero.clone(); n]; n];
        for d in 1..n {
            for k in (2..=d).rev() {
                let mut acc = zero.clone();
                for i in 1..=d - (k - 1) {
                    acc.add_mul_assign(&g[i], &powers[k - 1][d - i]);
                }
                powers[k][d] = acc;
            }
            let mut rhs = if d == 1 { K::one(self.field) } else { zero.clone() };
            for k in 2..=d {
                let prod = self.coeffs[k].mul_ref(&powers[k][d]);
                rhs -= prod;
            }
            g[d] = rhs.mul_ref(&lead_inv);
            powers[1][d] = g[d].clone();
        }
        Ok(TruncSeries1 {
            field: self.field,
            coeffs: g,
        })
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn unit_inverse(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].is_zero() {
            return Err(SeriesError::NotAUnit);
        }
        let n = self.precision();
        let c0_inv = self.coeffs[0].inv()?;
        let mut out: Vec<K> = Vec::with_capacity(n);
        out.push(c0_inv.clone());
        for d in 1..n {
            let mut acc = K::zero(self.field);
            for k in 1..=d {
                acc.add_mul_assign(&self.coeffs[k], &out[d - k]);
            }
            out.push(-acc.mul_ref(&c0_inv));
        }
        Ok(TruncSeries1 {
            field: self.field,
            coeffs: out,
        })
    }
}

impl TruncSeries1<Rat> {
    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<TruncSeries1<FpElem>, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(d, c)| {
                c.reduce_mod_p(field)
                    .map_err(|_| SeriesError::IntegralityViolation {
                        monomial: monomial_text(d),
                        value: c.to_string(),
                        p: field.p(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TruncSeries1 { field, coeffs })
    }
}

fn monomial_text(d: usize) -> String {
    match d {
        0 => "1".to_string(),
        _ => power_text("X", d as i64),
    }
}

impl<K: Scalar> fmt::Display for TruncSeries1<K> {
    /// "X - 1/2*X^4 + X^7 + O(X^8)".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = render_terms(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(d, c)| (c, power_text("X", d as i64))),
        );
        let tail = format!("O({})", power_text("X", self.precision() as i64));
        if body.is_empty() {
            f.write_str(&tail)
        } else {
            write!(f, "{body} + {tail}")
        }
    }
}

impl<K: Scalar> fmt::Debug for TruncSeries1<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries1[{}]({})", self.field, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rationals;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n, d).unwrap()
    }

    fn qs(terms: &[(usize, i64, i64)], n: usize) -> TruncSeries1<Rat> {
        TruncSeries1::from_terms(Rationals, terms.iter().map(|&(d, a, b)| (d, q(a, b))), n)
    }

    #[test]
    fn binomial_square_mod_two() {
        let f2 = PrimeField::new(2).unwrap();
        let a = TruncSeries1::from_terms(f2, [(0, f2.elem(1)), (1, f2.elem(1))], 3);
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, TruncSeries1::from_terms(f2, [(0, f2.elem(1)), (2, f2.elem(1))], 3));
    }

    #[test]
    fn product_precision_is_the_minimum() {
        let a = TruncSeries1::<Rat>::one(Rationals, 3);
        let b = TruncSeries1::<Rat>::one(Rationals, 5);
        assert_eq!(a.mul(&b).unwrap().precision(), 3);
        assert_eq!(b.add(&a).unwrap().precision(), 3);
    }

    #[test]
    fn field_mismatch_is_reported() {
        let a = TruncSeries1::<FpElem>::one(PrimeField::new(2).unwrap(), 3);
        let b = TruncSeries1::<FpElem>::one(PrimeField::new(3).unwrap(), 3);
        assert!(matches!(a.mul(&b), Err(SeriesError::FieldMismatch { .. })));
    }

    #[test]
    fn composition_examples() {
        let g = qs(&[(1, 1, 1), (3, 1, 1)], 5);
        assert_eq!(TruncSeries1::<Rat>::x(Rationals, 5).compose(&g).unwrap(), g);
        let f = qs(&[(2, 1, 1)], 5);
        assert_eq!(f.compose(&g).unwrap(), qs(&[(2, 1, 1), (4, 2, 1)], 5));
        let bad = qs(&[(0, 1, 1), (1, 1, 1)], 5);
        assert_eq!(f.compose(&bad), Err(SeriesError::PositiveValuationRequired));
    }

    #[test]
    fn reversion_examples() {
        let x = TruncSeries1::<Rat>::x(Rationals, 8);
        assert_eq!(x.reversion().unwrap(), x);
        let f = qs(&[(1, 1, 1), (4, 1, 2)], 8);
        assert_eq!(f.reversion().unwrap(), qs(&[(1, 1, 1), (4, -1, 2), (7, 1, 1)], 8));

        let f2 = PrimeField::new(2).unwrap();
        let g = TruncSeries1::from_terms(f2, [(1, f2.elem(1)), (2, f2.elem(1))], 4);
        assert_eq!(g.reversion().unwrap(), g);

        assert_eq!(qs(&[(2, 1, 1)], 4).reversion(), Err(SeriesError::NotReversible));
        assert_eq!(qs(&[(0, 1, 1), (1, 1, 1)], 4).reversion(), Err(SeriesError::NotReversible));
    }

    #[test]
    fn unit_inverse_examples() {
        let f = qs(&[(0, 1, 1), (1, 1, 1)], 4);
        assert_eq!(
            f.unit_inverse().unwrap(),
            qs(&[(0, 1, 1), (1, -1, 1), (2, 1, 1), (3, -1, 1)], 4)
        );
        let one = TruncSeries1::<Rat>::one(Rationals, 4);
        assert_eq!(one.unit_inverse().unwrap(), one);
        assert_eq!(qs(&[(1, 1, 1)], 4).unit_inverse(), Err(SeriesError::NotAUnit));
    }

    #[test]
    fn reduction_reports_offending_monomial() {
        let f2 = PrimeField::new(2).unwrap();
        let err = qs(&[(1, 1, 1), (4, 1, 2)], 8).reduce_mod_p(f2).unwrap_err();
        assert!(matches!(err, SeriesError::IntegralityViolation { ref monomial, .. } if monomial == "X^4"));
        let f3 = PrimeField::new(3).unwrap();
        let r = qs(&[(1, 1, 1), (2, 3, 2)], 8).reduce_mod_p(f3).unwrap();
        assert_eq!(r, TruncSeries1::x(f3, 8));
    }

    #[test]
    fn rendering() {
        let f = qs(&[(1, 1, 1), (4, -1, 2), (7, 1, 1)], 8);
        assert_eq!(f.to_string(), "X - 1/2*X^4 + X^7 + O(X^8)");
        assert_eq!(TruncSeries1::<Rat>::zero(Rationals, 3).to_string(), "O(X^3)");
    }

    fn arb_series(n: usize, zero_const: bool) -> impl Strategy<Value = TruncSeries1<Rat>> {
        proptest::collection::vec(-4i64..5, n).prop_map(move |v| {
            let mut s = TruncSeries1::new(Rationals, v.into_iter().map(Rat::from).collect(), n);
            if zero_const {
                s.coeffs[0] = Rat::from(0);
            }
            s
        })
    }

    fn arb_reversible(n: usize) -> impl Strategy<Value = TruncSeries1<Rat>> {
        (arb_series(n, true), prop_oneof![Just(1i64), Just(-1), Just(2), Just(3)]).prop_map(
            |(mut s, lead)| {
                s.coeffs[1] = Rat::from(lead);
                s
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_series(7, false), b in arb_series(7, false), c in arb_series(7, false)) {
            let lhs = a.add(&b).unwrap().mul(&c).unwrap();
            let rhs = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        }

        #[test]
        fn composition_is_associative(f in arb_series(7, false), g in arb_series(7, true), h in arb_series(7, true)) {
            let left = f.compose(&g.compose(&h).unwrap()).unwrap();
            let right = f.compose(&g).unwrap().compose(&h).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn reversion_round_trip(f in arb_reversible(8)) {
            let g = f.reversion().unwrap();
            let x = TruncSeries1::<Rat>::x(Rationals, 8);
            prop_assert_eq!(f.compose(&g).unwrap(), x.clone());
            prop_assert_eq!(g.compose(&f).unwrap(), x);
        }

        #[test]
        fn reduction_commutes_with_mul_and_compose(
            a in arb_series(6, false), b in arb_series(6, true), p in prop_oneof![Just(2u64), Just(3), Just(5)]
        ) {
            let field = PrimeField::new(p).unwrap();
            let (ra, rb) = (a.reduce_mod_p(field).unwrap(), b.reduce_mod_p(field).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().reduce_mod_p(field).unwrap(), ra.mul(&rb).unwrap());
            prop_assert_eq!(a.compose(&b).unwrap().reduce_mod_p(field).unwrap(), ra.compose(&rb).unwrap());
        }

        #[test]
        fn precision_never_grows(a in arb_series(4, false), b in arb_series(6, true)) {
            prop_assert_eq!(a.mul(&b).unwrap().precision(), 4);
            prop_assert_eq!(a.compose(&b).unwrap().precision(), 4);
            prop_assert_eq!(b.add(&a).unwrap().precision(), 4);
        }
    }
}
