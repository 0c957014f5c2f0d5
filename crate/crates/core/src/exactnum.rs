//! Exact scalars: rationals over ℚ and elements of prime fields 𝔽_p.
//!
//! Both scalar types implement [`Scalar`], the small field interface the
//! series and derivation code is generic over. A scalar carries its field
//! tag ([`Rationals`] or [`PrimeField`]) so that containers can refuse to
//! mix, say, 𝔽_2 and 𝔽_3 data.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{value} is not {p}-integral")]
    IntegralityViolation { value: String, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse {0:?} as a scalar")]
    Parse(String),
}

/// The operations the rest of the crate needs from a coefficient field.
pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    type Field: Copy + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static;

    fn field(&self) -> Self::Field;
    fn zero(field: Self::Field) -> Self;
    fn one(field: Self::Field) -> Self;
    fn from_i64(field: Self::Field, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Result<Self, ArithError>;
    /// 0 for ℚ, p for 𝔽_p.
    fn characteristic(field: Self::Field) -> u64;

    /// `self += a * b` without cloning the operands.
    fn add_mul_assign(&mut self, a: &Self, b: &Self);

    fn mul_ref(&self, rhs: &Self) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one(self.field())
    }

    /// Sign used by text renderers; always false over 𝔽_p.
    fn is_negative(&self) -> bool {
        false
    }

    /// Coefficient text without the field annotation ("3/4", "5").
    fn coeff_text(&self) -> String;

    fn parse_coeff(field: Self::Field, text: &str) -> Result<Self, ArithError>;

    fn div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self.mul_ref(&rhs.inv()?))
    }
}

// ---------------------------------------------------------------------------
// ℚ

/// Field tag for ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl fmt::Display for Rationals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Q")
    }
}

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, ArithError> {
        let den = den.into();
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rat(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Rat, ArithError> {
        if rhs.0.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rat(&self.0 / &rhs.0))
    }

    /// True iff p does not divide the (reduced) denominator.
    pub fn is_p_integral(&self, p: u64) -> bool {
        !(self.0.denom() % BigInt::from(p)).is_zero()
    }

    /// Image under ℤ_(p) → 𝔽_p.
    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<FpElem, ArithError> {
        let p = field.p();
        if !self.is_p_integral(p) {
            return Err(ArithError::IntegralityViolation {
                value: self.to_string(),
                p,
            });
        }
        let modulus = BigInt::from(p);
        let num = residue(self.0.numer(), &modulus);
        let den = residue(self.0.denom(), &modulus);
        let den_inv = FpElem::new(field, den).inv()?;
        Ok(FpElem::new(field, num) * den_inv)
    }
}

fn residue(n: &BigInt, modulus: &BigInt) -> u64 {
    n.mod_floor(modulus).to_u64().expect("residue fits in u64")
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::Parse(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                Rat::new(n, d)
            }
            None => Ok(Rat::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_integer(n)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        Rat(self.0 - rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl Scalar for Rat {
    type Field = Rationals;

    fn field(&self) -> Rationals {
        Rationals
    }
    fn zero(_: Rationals) -> Self {
        Rat(BigRational::zero())
    }
    fn one(_: Rationals) -> Self {
        Rat(BigRational::one())
    }
    fn from_i64(_: Rationals, n: i64) -> Self {
        Rat::from_integer(n)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn inv(&self) -> Result<Self, ArithError> {
        if self.0.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rat(self.0.recip()))
    }
    fn characteristic(_: Rationals) -> u64 {
        0
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.0.is_zero() || b.0.is_zero() {
            return;
        }
        self.0 += &a.0 * &b.0;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        Rat(&self.0 * &rhs.0)
    }
    fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
    fn coeff_text(&self) -> String {
        self.to_string()
    }
    fn parse_coeff(_: Rationals, text: &str) -> Result<Self, ArithError> {
        text.parse()
    }
}

// ---------------------------------------------------------------------------
// 𝔽_p

/// Field tag for 𝔽_p. Construction checks that p is prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Moduli are expected to be small (they index Frobenius powers), so
    /// trial division is enough.
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if p > u32::MAX as u64 {
            // products must fit in u64
            return Err(ArithError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn elem(self, value: i64) -> FpElem {
        FpElem::new(self, value.rem_euclid(self.p as i64) as u64)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of 𝔽_p, stored as its least non-negative residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElem {
    p: u64,
    value: u64,
}

impl FpElem {
    pub fn new(field: PrimeField, value: u64) -> Self {
        FpElem {
            p: field.p,
            value: value % field.p,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn prime_field(self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn pow(self, mut e: u64) -> FpElem {
        let mut base = self;
        let mut acc = FpElem { p: self.p, value: 1 % self.p };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    #[inline]
    fn check(self, rhs: FpElem) {
        assert_eq!(self.p, rhs.p, "mixed moduli in F_p arithmetic");
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.p)
    }
}

impl fmt::Debug for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for FpElem {
    type Output = FpElem;
    #[inline]
    fn add(self, rhs: FpElem) -> FpElem {
        self.check(rhs);
        let s = self.value + rhs.value;
        FpElem {
            p: self.p,
            value: if s >= self.p { s - self.p } else { s },
        }
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    #[inline]
    fn sub(self, rhs: FpElem) -> FpElem {
        self.check(rhs);
        FpElem {
            p: self.p,
            value: if self.value >= rhs.value {
                self.value - rhs.value
            } else {
                self.value + self.p - rhs.value
            },
        }
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    #[inline]
    fn mul(self, rhs: FpElem) -> FpElem {
        self.check(rhs);
        FpElem {
            p: self.p,
            value: self.value * rhs.value % self.p,
        }
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    fn neg(self) -> FpElem {
        FpElem {
            p: self.p,
            value: if self.value == 0 { 0 } else { self.p - self.value },
        }
    }
}

impl AddAssign for FpElem {
    fn add_assign(&mut self, rhs: FpElem) {
        *self = *self + rhs;
    }
}

impl SubAssign for FpElem {
    fn sub_assign(&mut self, rhs: FpElem) {
        *self = *self - rhs;
    }
}

impl Scalar for FpElem {
    type Field = PrimeField;

    fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }
    fn zero(field: PrimeField) -> Self {
        FpElem { p: field.p, value: 0 }
    }
    fn one(field: PrimeField) -> Self {
        FpElem { p: field.p, value: 1 }
    }
    fn from_i64(field: PrimeField, n: i64) -> Self {
        field.elem(n)
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    /// Extended Euclid on (value, p).
    fn inv(&self) -> Result<Self, ArithError> {
        if self.value == 0 {
            return Err(ArithError::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i128, self.value as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(FpElem {
            p: self.p,
            value: s0.rem_euclid(self.p as i128) as u64,
        })
    }
    fn characteristic(field: PrimeField) -> u64 {
        field.p
    }
    #[inline]
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        *self += *a * *b;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn coeff_text(&self) -> String {
        self.value.to_string()
    }
    fn parse_coeff(field: PrimeField, text: &str) -> Result<Self, ArithError> {
        let text = text.trim();
        if let Ok(n) = text.parse::<i64>() {
            return Ok(field.elem(n));
        }
        // a rational literal is read through reduction mod p
        let r: Rat = text.parse()?;
        r.reduce_mod_p(field)
    }
}
