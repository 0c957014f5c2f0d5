use std::fmt;

use super::{HSDerivation, HsdError, Window};
use crate::exactnum::{FpElem, PrimeField, Scalar};
use crate::fgl::FormalGroupLaw;
use crate::series::LaurentPoly;

/// A k-derivation d of k[t, 1/t] over 𝔽_p, given by d(t).
#[derive(Clone, PartialEq, Eq)]
pub struct Derivation {
    image: LaurentPoly<FpElem>,
}

impl Derivation {
    pub fn new(image: LaurentPoly<FpElem>) -> Self {
        Derivation { image }
    }

    pub fn field(&self) -> PrimeField {
        self.image.field()
    }

    /// d(t).
    pub fn image(&self) -> &LaurentPoly<FpElem> {
        &self.image
    }

    /// d(q) = q'(t) · d(t).
    pub fn apply(&self, q: &LaurentPoly<FpElem>) -> LaurentPoly<FpElem> {
        &q.derivative() * &self.image
    }

    /// d^(k)(q), the k-fold composite.
    pub fn iterate(&self, q: &LaurentPoly<FpElem>, k: u64) -> LaurentPoly<FpElem> {
        let mut out = q.clone();
        for _ in 0..k {
            out = self.apply(&out);
        }
        out
    }

    /// d^(p) = c·d, tested on t and on t².
    pub fn check_restricted(&self, c: FpElem) -> bool {
        let p = self.field().p();
        [1, 2].into_iter().all(|e| {
            let q = LaurentPoly::t_pow(self.field(), e);
            self.iterate(&q, p) == self.apply(&q).scale(&c)
        })
    }

    /// The 𝔾_a[1]-derivation ∂_n = d^(n)/n!, n < p. Needs d^(p) = 0.
    pub fn prolong_additive(&self) -> Result<HSDerivation<FpElem>, HsdError> {
        let field = self.field();
        if !self.check_restricted(field.elem(0)) {
            return Err(HsdError::NotNilpotent);
        }
        let t = LaurentPoly::t(field);
        let mut images = vec![t.clone()];
        let mut power = t;
        let mut factorial = field.elem(1);
        for n in 1..field.p() {
            power = self.apply(&power);
            factorial = factorial * field.elem(n as i64);
            images.push(power.scale(&factorial.inv().expect("n < p")));
        }
        HSDerivation::from_table(field, images, Window::unbounded())
    }

    /// The 𝔾_m[1]-derivation d_{n+1} = (d∘d_n − n·d_n)/(n+1), n + 1 < p.
    /// Needs d^(p) = d.
    pub fn prolong_multiplicative(&self) -> Result<HSDerivation<FpElem>, HsdError> {
        let field = self.field();
        if !self.check_restricted(field.elem(1)) {
            return Err(HsdError::NotMultiplicativelyRestricted);
        }
        let mut images = vec![LaurentPoly::t(field)];
        let mut current = self.image.clone();
        for n in 1..field.p() {
            images.push(current.clone());
            if n + 1 == field.p() {
                break;
            }
            let next = &self.apply(&current) - &current.scale(&field.elem(n as i64));
            current = next.scale(&field.elem(n as i64 + 1).inv().expect("n + 1 < p"));
        }
        HSDerivation::from_table(field, images, Window::unbounded())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d(t) = {}", self.image)
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation({})", self.image)
    }
}

/// The constant c_F with D_1^(p) = c_F · D_1, where D_1(t) = ∂_1(t) comes
/// from the canonical derivation of F.
pub fn compute_c_f(law: &FormalGroupLaw<FpElem>) -> Result<FpElem, HsdError> {
    let field = law.field();
    let p = field.p();
    if (law.precision() as u64) <= p {
        return Err(HsdError::InsufficientPrecision {
            order: p as usize,
            precision: law.precision(),
        });
    }
    let canonical = HSDerivation::canonical(law, 2, Window::unbounded())?;
    let d = Derivation::new(canonical.image(1)?.clone());
    let dt = d.image().clone();
    let Some(e) = dt.min_exp() else {
        return Err(HsdError::NotProportional);
    };
    let dpt = d.iterate(&LaurentPoly::t(field), p);
    let c = dpt.coeff(e) * dt.coeff(e).inv().expect("nonzero coefficient");
    if d.check_restricted(c) {
        Ok(c)
    } else {
        Err(HsdError::NotProportional)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(p: u64, s: &str) -> LaurentPoly<FpElem> {
        LaurentPoly::parse(PrimeField::new(p).unwrap(), s).unwrap()
    }

    #[test]
    fn restricted_examples() {
        let f2 = PrimeField::new(2).unwrap();
        assert!(Derivation::new(lp(2, "1")).check_restricted(f2.elem(0)));
        assert!(Derivation::new(lp(2, "1 + t")).check_restricted(f2.elem(1)));
        assert!(!Derivation::new(lp(2, "t^2")).check_restricted(f2.elem(1)));
    }

    #[test]
    fn iterate_applies_chain_rule() {
        // d = (1 + t) d/dt over F_3: d(t^2) = 2t + 2t^2
        let d = Derivation::new(lp(3, "1 + t"));
        assert_eq!(d.apply(&lp(3, "t^2")), lp(3, "2*t + 2*t^2"));
        assert_eq!(d.iterate(&lp(3, "t"), 3), lp(3, "1 + t"));
    }

    #[test]
    fn additive_prolongation_examples() {
        let d = Derivation::new(lp(3, "1"));
        let table = d.prolong_additive().unwrap();
        assert_eq!(table.bound(), 3);
        assert_eq!(table.images(), &[lp(3, "t"), lp(3, "1"), lp(3, "0")]);

        let d = Derivation::new(lp(2, "t^2"));
        let table = d.prolong_additive().unwrap();
        assert_eq!(table.images(), &[lp(2, "t"), lp(2, "t^2")]);

        let d = Derivation::new(lp(5, "1"));
        let table = d.prolong_additive().unwrap();
        assert!(matches!(
            table.apply(&lp(5, "t^5"), 5),
            Err(HsdError::OrderOutOfRange { n: 5, bound: 5 })
        ));
    }

    #[test]
    fn multiplicative_prolongation_examples() {
        let d = Derivation::new(lp(3, "1 + t"));
        let table = d.prolong_multiplicative().unwrap();
        assert_eq!(table.images(), &[lp(3, "t"), lp(3, "1 + t"), lp(3, "0")]);

        let d = Derivation::new(lp(2, "1 + t"));
        assert_eq!(d.prolong_multiplicative().unwrap().bound(), 2);

        let d = Derivation::new(lp(3, "1"));
        assert_eq!(
            d.prolong_multiplicative(),
            Err(HsdError::NotMultiplicativelyRestricted)
        );
        let d = Derivation::new(lp(3, "1 + t"));
        assert_eq!(d.prolong_additive(), Err(HsdError::NotNilpotent));
    }

    #[test]
    fn c_f_examples() {
        for p in [2, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            let add = FormalGroupLaw::<FpElem>::additive(f, p as usize + 1).unwrap();
            assert_eq!(compute_c_f(&add).unwrap(), f.elem(0));
            let mult = FormalGroupLaw::<FpElem>::multiplicative(f, p as usize + 1).unwrap();
            assert_eq!(compute_c_f(&mult).unwrap(), f.elem(1));
        }
        let honda = FormalGroupLaw::honda(2, 2, 8).unwrap();
        assert_eq!(compute_c_f(&honda).unwrap(), PrimeField::new(2).unwrap().elem(0));
        let short = FormalGroupLaw::<FpElem>::additive(PrimeField::new(3).unwrap(), 3).unwrap();
        assert!(matches!(compute_c_f(&short), Err(HsdError::InsufficientPrecision { .. })));
    }
}
