//! Sparse polynomials in three variables with a pluggable truncation rule.
//! Only used to compare F(F(X,Y),Z) with F(X,F(Y,Z)).

use std::collections::BTreeMap;

use crate::exactnum::Scalar;
use crate::series::TruncSeries2;

pub(crate) type Exps = [usize; 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Poly3<K: Scalar> {
    field: K::Field,
    terms: BTreeMap<Exps, K>,
}

/// Which monomials survive: total degree < N, or every exponent < q.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Truncation {
    TotalDegree(usize),
    Box(usize),
}

impl Truncation {
    fn keeps(self, e: Exps) -> bool {
        match self {
            Truncation::TotalDegree(n) => e[0] + e[1] + e[2] < n,
            Truncation::Box(q) => e.iter().all(|&x| x < q),
        }
    }
}

impl<K: Scalar> Poly3<K> {
    pub fn zero(field: K::Field) -> Self {
        Poly3 {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: K::Field) -> Self {
        let mut p = Self::zero(field);
        p.add_term([0, 0, 0], K::one(field));
        p
    }

    /// Places the bivariate terms c·X^i·Y^j on the variables `slots`.
    pub fn embed<'a>(
        field: K::Field,
        terms: impl IntoIterator<Item = (usize, usize, &'a K)>,
        slots: (usize, usize),
        trunc: Truncation,
    ) -> Self {
        let mut p = Self::zero(field);
        for (i, j, c) in terms {
            let mut e = [0; 3];
            e[slots.0] += i;
            e[slots.1] += j;
            if trunc.keeps(e) {
                p.add_term(e, c.clone());
            }
        }
        p
    }

    pub fn variable(field: K::Field, slot: usize) -> Self {
        let mut e = [0; 3];
        e[slot] = 1;
        let mut p = Self::zero(field);
        p.add_term(e, K::one(field));
        p
    }

    pub fn add_term(&mut self, e: Exps, c: K) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(|| K::zero(c.field()));
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn get(&self, e: &Exps) -> Option<&K> {
        self.terms.get(e)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &K)> {
        self.terms.iter()
    }

    pub fn mul(&self, rhs: &Self, trunc: Truncation) -> Self {
        let mut acc: BTreeMap<Exps, K> = BTreeMap::new();
        for (ea, a) in &self.terms {
            for (eb, b) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                if trunc.keeps(e) {
                    acc.entry(e)
                        .or_insert_with(|| K::zero(self.field))
                        .add_mul_assign(a, b);
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly3 {
            field: self.field,
            terms: acc,
        }
    }

    fn add_scaled(&mut self, other: &Self, c: &K) {
        for (e, b) in &other.terms {
            self.add_term(*e, c.mul_ref(b));
        }
    }

    /// Σ c_ij g^i h^j over the given coefficient list, Horner in g.
    pub fn substitute(
        field: K::Field,
        coeffs: &BTreeMap<(usize, usize), K>,
        g: &Self,
        h: &Self,
        max_exp: usize,
        trunc: Truncation,
    ) -> Self {
        let mut h_pows = vec![Self::one(field)];
        for _ in 1..max_exp {
            let next = h_pows.last().expect("nonempty").mul(h, trunc);
            h_pows.push(next);
        }
        let mut acc = Self::zero(field);
        for i in (0..max_exp).rev() {
            acc = acc.mul(g, trunc);
            for j in 0..max_exp {
                if let Some(c) = coeffs.get(&(i, j)) {
                    acc.add_scaled(&h_pows[j], c);
                }
            }
        }
        acc
    }
}

pub(crate) fn series_coeff_map<K: Scalar>(s: &TruncSeries2<K>) -> BTreeMap<(usize, usize), K> {
    s.terms().map(|(i, j, c)| ((i, j), c.clone())).collect()
}
