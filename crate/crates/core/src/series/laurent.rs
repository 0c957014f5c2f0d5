use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{power_text, render_terms, SeriesError};
use crate::exactnum::{FpElem, PrimeField, Rat, Scalar};

/// A Laurent polynomial Σ a_e t^e with finitely many nonzero a_e.
///
/// Zero coefficients are never stored, so two polynomials are equal iff
/// their maps are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly<K: Scalar> {
    field: K::Field,
    terms: BTreeMap<i64, K>,
}

impl<K: Scalar> LaurentPoly<K> {
    pub fn zero(field: K::Field) -> Self {
        LaurentPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: K::Field) -> Self {
        Self::monomial(K::one(field), 0)
    }

    /// The generator t.
    pub fn t(field: K::Field) -> Self {
        Self::monomial(K::one(field), 1)
    }

    /// t^e.
    pub fn t_pow(field: K::Field, e: i64) -> Self {
        Self::monomial(K::one(field), e)
    }

    pub fn monomial(c: K, e: i64) -> Self {
        let mut p = Self::zero(c.field());
        p.add_term(e, c);
        p
    }

    pub fn from_terms(field: K::Field, terms: impl IntoIterator<Item = (i64, K)>) -> Self {
        let mut p = Self::zero(field);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn field(&self) -> K::Field {
        self.field
    }

    pub fn add_term(&mut self, e: i64, c: K) {
        assert_eq!(c.field(), self.field, "mixed fields in Laurent polynomial");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn coeff(&self, e: i64) -> K {
        self.terms.get(&e).cloned().unwrap_or_else(|| K::zero(self.field))
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &K)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Units of k[t, 1/t] are exactly the nonzero monomials.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn inv_unit(&self) -> Result<Self, SeriesError> {
        if !self.is_unit() {
            return Err(SeriesError::NotAUnit);
        }
        let (e, c) = self.terms().next().expect("one term");
        Ok(Self::monomial(c.inv()?, -e))
    }

    /// True iff every exponent is ≤ 0, i.e. the element lies in k[1/t].
    pub fn in_inverse_subring(&self) -> bool {
        self.max_exp().is_none_or(|e| e <= 0)
    }

    /// Exponents > 0, descending.
    pub fn positive_exponents(&self) -> Vec<i64> {
        self.terms.keys().rev().copied().filter(|&e| e > 0).collect()
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut out = Self::zero(self.field);
        if c.is_zero() {
            return out;
        }
        for (e, a) in &self.terms {
            out.add_term(*e, a.mul_ref(c));
        }
        out
    }

    /// Multiplication by t^k.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// d/dt.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.field);
        for (e, c) in &self.terms {
            out.add_term(e - 1, c.mul_ref(&K::from_i64(self.field, *e)));
        }
        out
    }

    /// Integer powers; negative exponents need a unit.
    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        let base = if e < 0 { self.inv_unit()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(self.field);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Parses the canonical rendering, e.g. "t^10 + t^4 + t + t^-2 + t^-5",
    /// "3*t^2 - 1/2*t^-1", "1", "0". Term order does not matter.
    pub fn parse(field: K::Field, text: &str) -> Result<Self, SeriesError> {
        let mut out = Self::zero(field);
        for (negative, term) in split_terms(text)? {
            let (c, e) = parse_term::<K>(field, &term)?;
            out.add_term(e, if negative { -c } else { c });
        }
        Ok(out)
    }
}

fn split_terms(text: &str) -> Result<Vec<(bool, String)>, SeriesError> {
    let mut out = Vec::new();
    let mut negative = false;
    let mut current = String::new();
    let mut prev = ' ';
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        if (ch == '+' || ch == '-') && prev != '^' && prev != '*' && prev != '/' {
            if !current.is_empty() {
                out.push((negative, std::mem::take(&mut current)));
            } else if prev != ' ' {
                return Err(SeriesError::Parse(text.to_string()));
            }
            negative = ch == '-';
        } else {
            current.push(ch);
        }
        prev = ch;
    }
    if current.is_empty() {
        return Err(SeriesError::Parse(text.to_string()));
    }
    out.push((negative, current));
    Ok(out)
}

fn parse_term<K: Scalar>(field: K::Field, term: &str) -> Result<(K, i64), SeriesError> {
    let bad = || SeriesError::Parse(term.to_string());
    let (coeff, mono) = match term.find('t') {
        None => (term, ""),
        Some(pos) => {
            let coeff = term[..pos].strip_suffix('*').unwrap_or(&term[..pos]);
            (coeff, &term[pos..])
        }
    };
    let c = if coeff.is_empty() {
        K::one(field)
    } else {
        K::parse_coeff(field, coeff).map_err(|_| bad())?
    };
    let e = match mono {
        "" => 0,
        "t" => 1,
        m => m
            .strip_prefix("t^")
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(bad)?,
    };
    Ok((c, e))
}

impl LaurentPoly<Rat> {
    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<LaurentPoly<FpElem>, SeriesError> {
        let mut out = LaurentPoly::zero(field);
        for (e, c) in &self.terms {
            let r = c.reduce_mod_p(field).map_err(|_| SeriesError::IntegralityViolation {
                monomial: power_text("t", *e),
                value: c.to_string(),
                p: field.p(),
            })?;
            out.add_term(*e, r);
        }
        Ok(out)
    }
}

impl<K: Scalar> fmt::Display for LaurentPoly<K> {
    /// Descending exponents: "t^10 + t^4 + t + t^-2 + t^-5".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let text = render_terms(self.terms.iter().rev().map(|(e, c)| (c, power_text("t", *e))));
        f.write_str(&text)
    }
}

impl<K: Scalar> fmt::Debug for LaurentPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({})", self.field, self)
    }
}

impl<K: Scalar> Add for &LaurentPoly<K> {
    type Output = LaurentPoly<K>;
    fn add(self, rhs: &LaurentPoly<K>) -> LaurentPoly<K> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<K: Scalar> Sub for &LaurentPoly<K> {
    type Output = LaurentPoly<K>;
    fn sub(self, rhs: &LaurentPoly<K>) -> LaurentPoly<K> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<K: Scalar> Neg for &LaurentPoly<K> {
    type Output = LaurentPoly<K>;
    fn neg(self) -> LaurentPoly<K> {
        LaurentPoly {
            field: self.field,
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl<K: Scalar> Mul for &LaurentPoly<K> {
    type Output = LaurentPoly<K>;
    fn mul(self, rhs: &LaurentPoly<K>) -> LaurentPoly<K> {
        assert_eq!(self.field, rhs.field, "mixed fields in Laurent polynomial");
        let mut acc: BTreeMap<i64, K> = BTreeMap::new();
        for (ea, a) in &self.terms {
            for (eb, b) in &rhs.terms {
                acc.entry(ea + eb)
                    .or_insert_with(|| K::zero(self.field))
                    .add_mul_assign(a, b);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly {
            field: self.field,
            terms: acc,
        }
    }
}

impl<K: Scalar> Add for LaurentPoly<K> {
    type Output = LaurentPoly<K>;
    fn add(self, rhs: LaurentPoly<K>) -> LaurentPoly<K> {
        &self + &rhs
    }
}

impl<K: Scalar> Sub for LaurentPoly<K> {
    type Output = LaurentPoly<K>;
    fn sub(self, rhs: LaurentPoly<K>) -> LaurentPoly<K> {
        &self - &rhs
    }
}

impl<K: Scalar> Mul for LaurentPoly<K> {
    type Output = LaurentPoly<K>;
    fn mul(self, rhs: LaurentPoly<K>) -> LaurentPoly<K> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rationals;

    fn f2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    #[test]
    fn canonical_rendering() {
        let p = LaurentPoly::<FpElem>::parse(f2(), "t^-5 + t + t^10 + t^4 + t^-2").unwrap();
        assert_eq!(p.to_string(), "t^10 + t^4 + t + t^-2 + t^-5");
        let q = LaurentPoly::<Rat>::parse(Rationals, "3*t^2 - 1/2*t^-1 + 1").unwrap();
        assert_eq!(q.to_string(), "3*t^2 + 1 - 1/2*t^-1");
        assert_eq!(LaurentPoly::<Rat>::zero(Rationals).to_string(), "0");
        let f5 = PrimeField::new(5).unwrap();
        let r = LaurentPoly::<FpElem>::parse(f5, "-t^2 + 2").unwrap();
        assert_eq!(r.to_string(), "4*t^2 + 2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(LaurentPoly::<Rat>::parse(Rationals, "t^").is_err());
        assert!(LaurentPoly::<Rat>::parse(Rationals, "").is_err());
        assert!(LaurentPoly::<Rat>::parse(Rationals, "t + + t").is_err());
        assert!(LaurentPoly::<Rat>::parse(Rationals, "x^2").is_err());
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = LaurentPoly::<FpElem>::parse(f2(), "t + 1").unwrap();
        let s = &a + &a;
        assert!(s.is_zero());
        assert_eq!(s.num_terms(), 0);
    }

    #[test]
    fn units_and_inverse_subring() {
        let t = LaurentPoly::<Rat>::t(Rationals);
        assert!(t.is_unit());
        assert_eq!(t.pow(-3).unwrap(), LaurentPoly::t_pow(Rationals, -3));
        let tp1 = LaurentPoly::<Rat>::parse(Rationals, "t + 1").unwrap();
        assert_eq!(tp1.inv_unit(), Err(SeriesError::NotAUnit));
        assert!(LaurentPoly::<Rat>::parse(Rationals, "1 + t^-4").unwrap().in_inverse_subring());
        assert!(!tp1.in_inverse_subring());
    }

    #[test]
    fn derivative_in_char_p() {
        let p = LaurentPoly::<FpElem>::parse(f2(), "t^3 + t^2 + t^-1").unwrap();
        assert_eq!(p.derivative().to_string(), "t^2 + t^-2");
    }
}
