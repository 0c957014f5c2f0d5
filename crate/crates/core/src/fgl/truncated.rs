use std::collections::BTreeMap;
use std::fmt;

use super::poly3::{Poly3, Truncation};
use crate::exactnum::{FpElem, PrimeField, Scalar};
use crate::series::render_terms;

/// An m-truncated group law f(v, w) over 𝔽_p: a polynomial with all
/// exponents below p^m, read in k[v, w]/(v^(p^m), w^(p^m)).
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedGroupLaw {
    field: PrimeField,
    m: u32,
    q: usize,
    terms: BTreeMap<(usize, usize), FpElem>,
}

impl TruncatedGroupLaw {
    /// Terms with an exponent ≥ p^m are dropped. No axiom check.
    pub fn from_terms(
        field: PrimeField,
        m: u32,
        terms: impl IntoIterator<Item = (usize, usize, FpElem)>,
    ) -> Self {
        let q = (field.p() as usize).pow(m);
        let mut map = BTreeMap::new();
        for (i, j, c) in terms {
            if i < q && j < q && !c.is_zero() {
                let slot = map.entry((i, j)).or_insert_with(|| FpElem::zero(field));
                *slot += c;
            }
        }
        map.retain(|_, c: &mut FpElem| !c.is_zero());
        TruncatedGroupLaw { field, m, q, terms: map }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// p^m, the nilpotency order of v and w.
    pub fn order(&self) -> usize {
        self.q
    }

    pub fn coeff(&self, i: usize, j: usize) -> FpElem {
        self.terms.get(&(i, j)).copied().unwrap_or_else(|| FpElem::zero(self.field))
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, FpElem)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    /// The l-truncation, l ≤ m.
    pub fn truncate(&self, l: u32) -> TruncatedGroupLaw {
        assert!(l <= self.m, "cannot truncate to a larger level");
        Self::from_terms(self.field, l, self.terms())
    }

    /// f(v,0) = v, f(0,v) = v and associativity, all checked exactly.
    pub fn axiom_failure(&self) -> Option<String> {
        let field = self.field;
        for (i, j, c) in self.terms() {
            let on_axis = i == 0 || j == 0;
            let linear = (i, j) == (1, 0) || (i, j) == (0, 1);
            if on_axis && !linear {
                return Some(format!("unit axiom fails at v^{i}*w^{j}"));
            }
            if linear && !c.is_one() {
                return Some(format!("linear coefficient at v^{i}*w^{j} is {c}"));
            }
        }
        if self.coeff(1, 0).is_zero() || self.coeff(0, 1).is_zero() {
            return Some("missing linear term".into());
        }
        let trunc = Truncation::Box(self.q);
        let body = &self.terms;
        let as_ref = self.terms.iter().map(|(&(i, j), c)| (i, j, c));
        let f_vw = Poly3::embed(field, as_ref.clone(), (0, 1), trunc);
        let f_wu = Poly3::embed(field, as_ref, (1, 2), trunc);
        let v = Poly3::variable(field, 0);
        let u = Poly3::variable(field, 2);
        let lhs = Poly3::substitute(field, body, &f_vw, &u, self.q, trunc);
        let rhs = Poly3::substitute(field, body, &v, &f_wu, self.q, trunc);
        if lhs != rhs {
            return Some("associativity fails".into());
        }
        None
    }

    /// f(v, w)^n in k[v, w]/(v^(p^m), w^(p^m)).
    pub fn power(&self, n: usize) -> BTreeMap<(usize, usize), FpElem> {
        let trunc = Truncation::Box(self.q);
        let f = Poly3::embed(
            self.field,
            self.terms.iter().map(|(&(i, j), c)| (i, j, c)),
            (0, 1),
            trunc,
        );
        let mut acc = Poly3::one(self.field);
        for _ in 0..n {
            acc = acc.mul(&f, trunc);
        }
        acc.terms().map(|(e, c)| ((e[0], e[1]), *c)).collect()
    }
}

fn vw_text(i: usize, j: usize) -> String {
    let part = |v: &str, e: usize| match e {
        0 => None,
        1 => Some(v.to_string()),
        _ => Some(format!("{v}^{e}")),
    };
    [part("v", i), part("w", j)].into_iter().flatten().collect::<Vec<_>>().join("*")
}

impl fmt::Display for TruncatedGroupLaw {
    /// "v + w + v^2*w^2".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(&(i, j), _)| (i + j, j));
        let text = render_terms(terms.into_iter().map(|(&(i, j), c)| (c, vw_text(i, j))));
        if text.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&text)
        }
    }
}

impl fmt::Debug for TruncatedGroupLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedGroupLaw[{}, m={}]({})", self.field, self.m, self)
    }
}
