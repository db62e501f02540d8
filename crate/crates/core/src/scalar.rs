//! Scalar types used throughout the crate.
//!
//! Exact work is done in [`Rational`]. The Schrödinger factorization needs
//! square roots, so [`Surd`] provides exact sums of square roots of
//! rationals. `f64` is available for float-mode checks.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `p/q`.
pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Rational::new(p, q))
    } else {
        BigInt::from_str(s).ok().map(Rational::from_integer)
    }
}

/// Print a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serialize a rational as its `p/q` string.
pub fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

pub fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_rational))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Ring operations needed by the operator algebra.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Approximate value, for reports.
    fn approx(&self) -> f64;
}

impl Scalar for Rational {
    fn approx(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Scalar for f64 {
    fn approx(&self) -> f64 {
        *self
    }
}

/// Ordered fields with a square-root extension.
pub trait Field: Scalar + Div<Output = Self> + PartialOrd {
    type Root: Scalar;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
    fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
    /// Positive square root of a positive element.
    fn sqrt_root(&self) -> Option<Self::Root>;
    fn embed(&self) -> Self::Root;
    /// `exp` of a log-parameter; only meaningful for floats.
    fn from_f64(x: f64) -> Option<Self>;
}

impl Field for Rational {
    type Root = Surd;

    fn sqrt_root(&self) -> Option<Surd> {
        Surd::sqrt(self)
    }
    fn embed(&self) -> Surd {
        Surd::from(self.clone())
    }
    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }
}

impl Field for f64 {
    type Root = f64;

    fn recip(&self) -> Self {
        1.0 / self
    }
    fn powi(&self, e: i64) -> Self {
        f64::powi(*self, e as i32)
    }
    fn sqrt_root(&self) -> Option<f64> {
        (*self > 0.0).then(|| self.sqrt())
    }
    fn embed(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
}

/// Split `n = a² s` with `s` squarefree.
pub fn square_split(n: &BigUint) -> (BigUint, BigUint) {
    let one = BigUint::one();
    let mut a = one.clone();
    let mut s = one.clone();
    let mut m = n.clone();
    if m.is_zero() {
        return (BigUint::zero(), one);
    }
    let mut d = BigUint::from(2u32);
    while &d * &d * &d <= m {
        let mut e = 0u32;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            a *= d.pow(e / 2);
            if e % 2 == 1 {
                s *= &d;
            }
        }
        d += 1u32;
    }
    // What is left has at most two prime factors.
    let r = m.sqrt();
    if &r * &r == m {
        a *= r;
    } else {
        s *= m;
    }
    (a, s)
}

/// Exact element of `Q(√s₁, √s₂, …)`: a finite sum `Σ cᵢ √sᵢ`
/// with distinct squarefree `sᵢ ≥ 1` and nonzero rational `cᵢ`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Surd {
    terms: BTreeMap<BigUint, Rational>,
}

impl Surd {
    /// `√r` for `r ≥ 0`.
    pub fn sqrt(r: &Rational) -> Option<Surd> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(Surd::zero());
        }
        let p = r.numer().magnitude();
        let q = r.denom().magnitude();
        // √(p/q) = √(pq) / q
        let (a, s) = square_split(&(p * q));
        let coeff = Rational::new(
            BigInt::from_biguint(Sign::Plus, a),
            BigInt::from_biguint(Sign::Plus, q.clone()),
        );
        let mut terms = BTreeMap::new();
        terms.insert(s, coeff);
        Some(Surd { terms })
    }

    /// The rational part when the surd is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, c)| rational_to_f64(c) * s.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }

    fn insert(&mut self, s: BigUint, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(s.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&s);
        }
    }
}

impl From<Rational> for Surd {
    fn from(r: Rational) -> Self {
        let mut out = Surd::default();
        out.insert(BigUint::one(), r);
        out
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if s.is_one() {
                write!(f, "{}", fmt_rational(c))?;
            } else {
                write!(f, "{}*sqrt({})", fmt_rational(c), s)?;
            }
        }
        Ok(())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        for (s, c) in rhs.terms {
            self.insert(s, c);
        }
        self
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(mut self) -> Surd {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::default();
        for (s1, c1) in &self.terms {
            for (s2, c2) in &rhs.terms {
                let g = s1.gcd(s2);
                let s = (s1 / &g) * (s2 / &g);
                let c = c1 * c2 * Rational::from_integer(BigInt::from_biguint(Sign::Plus, g));
                out.insert(s, c);
            }
        }
        out
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::from(Rational::one())
    }
}

impl Scalar for Surd {
    fn approx(&self) -> f64 {
        self.to_f64()
    }
}
