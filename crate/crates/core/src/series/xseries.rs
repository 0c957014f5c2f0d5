use std::fmt;

use super::{LaurentPoly, SeriesError};
use crate::exactnum::{FpElem, PrimeField, Rat, Scalar};

/// Σ_{n<B} q_n(t) X^n + O(X^B) with q_n ∈ k[t, 1/t].
///
/// This is the shape of D_X(r) = Σ ∂_n(r) X^n for a derivation family.
#[derive(Clone, PartialEq, Eq)]
pub struct XSeries<K: Scalar> {
    field: K::Field,
    coeffs: Vec<LaurentPoly<K>>,
}

impl<K: Scalar> XSeries<K> {
    pub fn new(field: K::Field, mut coeffs: Vec<LaurentPoly<K>>, bound: usize) -> Self {
        assert!(bound >= 1, "order bound must be at least 1");
        coeffs.truncate(bound);
        coeffs.resize(bound, LaurentPoly::zero(field));
        XSeries { field, coeffs }
    }

    /// The constant series q (no X terms).
    pub fn constant(q: LaurentPoly<K>, bound: usize) -> Self {
        let field = q.field();
        Self::new(field, vec![q], bound)
    }

    pub fn field(&self) -> K::Field {
        self.field
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &LaurentPoly<K> {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[LaurentPoly<K>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<LaurentPoly<K>> {
        self.coeffs
    }

    pub fn truncate(&self, bound: usize) -> Self {
        Self::new(self.field, self.coeffs.clone(), bound.min(self.bound()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.bound().min(rhs.bound());
        let coeffs = (0..n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect();
        XSeries {
            field: self.field,
            coeffs,
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        XSeries {
            field: self.field,
            coeffs: self.coeffs.iter().map(|q| q.scale(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.bound().min(rhs.bound());
        let mut out = vec![LaurentPoly::zero(self.field); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        XSeries {
            field: self.field,
            coeffs: out,
        }
    }

    /// Inverse in k[t,1/t][[X]]/(X^B); q_0 must be a monomial.
    pub fn unit_inverse(&self) -> Result<Self, SeriesError> {
        let head_inv = self.coeffs[0].inv_unit()?;
        let n = self.bound();
        let mut out: Vec<LaurentPoly<K>> = Vec::with_capacity(n);
        out.push(head_inv.clone());
        for d in 1..n {
            let mut acc = LaurentPoly::zero(self.field);
            for k in 1..=d {
                if !self.coeffs[k].is_zero() && !out[d - k].is_zero() {
                    acc = &acc + &(&self.coeffs[k] * &out[d - k]);
                }
            }
            out.push(-&(&acc * &head_inv));
        }
        Ok(XSeries {
            field: self.field,
            coeffs: out,
        })
    }

    /// Integer powers; negative ones go through [`XSeries::unit_inverse`].
    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        let base = if e < 0 { self.unit_inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::constant(LaurentPoly::one(self.field), self.bound());
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }
}

impl XSeries<Rat> {
    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<XSeries<FpElem>, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|q| q.reduce_mod_p(field))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(XSeries { field, coeffs })
    }
}

impl<K: Scalar> fmt::Debug for XSeries<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for q in &self.coeffs {
            list.entry(&format_args!("{q}"));
        }
        list.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rationals;

    fn f2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    fn lp(s: &str) -> LaurentPoly<FpElem> {
        LaurentPoly::parse(f2(), s).unwrap()
    }

    #[test]
    fn inverse_of_multiplicative_generator_image() {
        // t + (1 + t) X, inverted mod X^2: t^-1 + (t^-1 + t^-2) X over F_2
        let s = XSeries::new(f2(), vec![lp("t"), lp("1 + t")], 2);
        let inv = s.unit_inverse().unwrap();
        assert_eq!(inv.coeff(0), &lp("t^-1"));
        assert_eq!(inv.coeff(1), &lp("t^-1 + t^-2"));
        assert_eq!(s.mul(&inv), XSeries::constant(lp("1"), 2));
    }

    #[test]
    fn non_monomial_head_is_not_a_unit() {
        let s = XSeries::new(f2(), vec![lp("t + 1"), lp("1")], 3);
        assert_eq!(s.unit_inverse(), Err(SeriesError::NotAUnit));
    }

    #[test]
    fn powers_of_t_plus_x() {
        // (t + X)^3 = t^3 + 3t^2 X + 3t X^2 + X^3
        let t_plus_x = XSeries::new(
            Rationals,
            vec![LaurentPoly::<Rat>::t(Rationals), LaurentPoly::one(Rationals)],
            4,
        );
        let cube = t_plus_x.pow(3).unwrap();
        assert_eq!(cube.coeff(2).to_string(), "3*t");
        // (t + X)^-1 = Σ (-1)^n t^(-n-1) X^n
        let inv = t_plus_x.pow(-1).unwrap();
        assert_eq!(inv.coeff(3).to_string(), "-t^-4");
    }
}
