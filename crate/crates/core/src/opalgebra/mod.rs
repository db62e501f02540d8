//! Difference operators `Σ_α c_α(n) t^α` on windows of `ℤ²`, with
//! `(t^α ψ)_n = ψ_{n+α}`.

mod factor;
mod qcd;

use std::collections::BTreeMap;

use thiserror::Error;

pub use factor::{factorize, Factorization, SchrodingerOperator, SCHRODINGER_SHIFTS};
pub use qcd::{
    build_exponential_q, build_exponential_q_float, exponential_pair, f_criterion, verify_qcd_identity,
    verify_qcd_identity_float, ExpParams, QcdReport,
};

use crate::lattice::{Rect, Site};
use crate::scalar::Scalar;

pub type Shift = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("operator windows do not overlap")]
    WindowMismatch,
    #[error("operator is not self-adjoint at {site}")]
    NotSelfAdjoint { site: Site },
    #[error("coefficient at {site} is not positive")]
    NotFactorizable { site: Site },
    #[error("expected the seven-point shifts, found {shift:?}")]
    UnexpectedShift { shift: Shift },
    #[error("l_ij + l_ji is not constant")]
    ConditionViolated,
}

/// A finite sum of shifts with coefficient functions on a common window.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceOperator<S> {
    rect: Rect,
    terms: BTreeMap<Shift, Vec<S>>,
}

fn shifted(r: &Rect, a: Shift) -> Rect {
    Rect { x0: r.x0 + a.0, x1: r.x1 + a.0, y0: r.y0 + a.1, y1: r.y1 + a.1 }
}

impl<S: Scalar> DifferenceOperator<S> {
    pub fn zero(rect: Rect) -> Self {
        DifferenceOperator { rect, terms: BTreeMap::new() }
    }

    pub fn identity(rect: Rect) -> Self {
        Self::monomial(rect, (0, 0))
    }

    /// `t^α` with unit coefficient.
    pub fn monomial(rect: Rect, alpha: Shift) -> Self {
        Self::zero(rect).with_term(alpha, |_| S::one())
    }

    /// Add `c(n)·t^α`.
    pub fn with_term(mut self, alpha: Shift, c: impl Fn(Site) -> S) -> Self {
        let vals: Vec<S> = self.rect.sites().map(c).collect();
        match self.terms.get_mut(&alpha) {
            Some(old) => {
                for (o, v) in old.iter_mut().zip(vals) {
                    *o = o.clone() + v;
                }
            }
            None => {
                self.terms.insert(alpha, vals);
            }
        }
        self
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn shifts(&self) -> impl Iterator<Item = Shift> + '_ {
        self.terms.keys().copied()
    }

    pub fn coeff(&self, alpha: Shift, n: Site) -> Option<S> {
        if !self.rect.contains(n) {
            return None;
        }
        Some(self.terms.get(&alpha).map_or_else(S::zero, |v| v[self.rect.index(n)].clone()))
    }

    /// `(Aψ)_n`.
    pub fn apply_at(&self, n: Site, psi: impl Fn(Site) -> S) -> Option<S> {
        if !self.rect.contains(n) {
            return None;
        }
        let i = self.rect.index(n);
        Some(
            self.terms
                .iter()
                .fold(S::zero(), |acc, (&(a1, a2), c)| acc + c[i].clone() * psi(n + Site::new(a1, a2))),
        )
    }

    /// Same operator viewed on a sub-window.
    pub fn restrict(&self, rect: Rect) -> Result<Self, OpError> {
        let r = self.rect.intersect(&rect);
        if r.is_empty() {
            return Err(OpError::WindowMismatch);
        }
        let terms = self
            .terms
            .iter()
            .map(|(&a, c)| (a, r.sites().map(|n| c[self.rect.index(n)].clone()).collect()))
            .collect();
        Ok(DifferenceOperator { rect: r, terms })
    }

    fn from_fn(rect: Rect, shifts: impl IntoIterator<Item = Shift>, c: impl Fn(Shift, Site) -> S) -> Self {
        let terms = shifts.into_iter().map(|a| (a, rect.sites().map(|n| c(a, n)).collect())).collect();
        DifferenceOperator { rect, terms }
    }

    fn drop_zero_terms(mut self) -> Self {
        self.terms.retain(|_, v| v.iter().any(|c| !c.is_zero()));
        self
    }

    /// `A + B` on the common window.
    pub fn add(&self, other: &Self) -> Result<Self, OpError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OpError> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, f: impl Fn(S, S) -> S) -> Result<Self, OpError> {
        let r = self.rect.intersect(&other.rect);
        if r.is_empty() {
            return Err(OpError::WindowMismatch);
        }
        let shifts: std::collections::BTreeSet<Shift> = self.shifts().chain(other.shifts()).collect();
        Ok(Self::from_fn(r, shifts, |a, n| f(self.coeff(a, n).expect("in rect"), other.coeff(a, n).expect("in rect")))
            .drop_zero_terms())
    }

    /// `f·A`: multiply every coefficient by a function.
    pub fn left_mul(&self, f: impl Fn(Site) -> S) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&a, c)| (a, self.rect.sites().zip(c).map(|(n, v)| f(n) * v.clone()).collect()))
            .collect();
        DifferenceOperator { rect: self.rect, terms }
    }

    /// `A∘B = Σ a_α(n) b_β(n+α) t^{α+β}`, on the sites where every
    /// coefficient is known.
    pub fn compose(&self, other: &Self) -> Result<Self, OpError> {
        let mut r = self.rect;
        for (a1, a2) in self.shifts() {
            r = r.intersect(&shifted(&other.rect, (-a1, -a2)));
        }
        if r.is_empty() {
            return Err(OpError::WindowMismatch);
        }
        let mut out = Self::zero(r);
        for (&(a1, a2), ca) in &self.terms {
            for (&(b1, b2), cb) in &other.terms {
                let sum = (a1 + b1, a2 + b2);
                let vals: Vec<S> = r
                    .sites()
                    .map(|n| {
                        ca[self.rect.index(n)].clone() * cb[other.rect.index(n + Site::new(a1, a2))].clone()
                    })
                    .collect();
                match out.terms.get_mut(&sum) {
                    Some(old) => {
                        for (o, v) in old.iter_mut().zip(vals) {
                            *o = o.clone() + v;
                        }
                    }
                    None => {
                        out.terms.insert(sum, vals);
                    }
                }
            }
        }
        Ok(out.drop_zero_terms())
    }

    /// `A⁺ = Σ (c_α ∘ t^{−α}) t^{−α}`.
    pub fn adjoint(&self) -> Result<Self, OpError> {
        let mut r = self.rect;
        for a in self.shifts() {
            r = r.intersect(&shifted(&self.rect, a));
        }
        if r.is_empty() {
            return Err(OpError::WindowMismatch);
        }
        let terms = self
            .terms
            .iter()
            .map(|(&(a1, a2), c)| ((-a1, -a2), r.sites().map(|n| c[self.rect.index(n - Site::new(a1, a2))].clone()).collect()))
            .collect();
        Ok(DifferenceOperator { rect: r, terms })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DifferenceOperator<T> {
        DifferenceOperator {
            rect: self.rect,
            terms: self.terms.iter().map(|(&a, c)| (a, c.iter().map(&f).collect())).collect(),
        }
    }

    fn delta_responses(&self, other: &Self, window: Rect) -> Result<Vec<(S, S)>, OpError> {
        if self.rect.intersect(&window) != window || other.rect.intersect(&window) != window {
            return Err(OpError::WindowMismatch);
        }
        let reach: Vec<Shift> = self.shifts().chain(other.shifts()).collect();
        let (lo1, hi1) = reach.iter().fold((0, 0), |(l, h), a| (l.min(a.0), h.max(a.0)));
        let (lo2, hi2) = reach.iter().fold((0, 0), |(l, h), a| (l.min(a.1), h.max(a.1)));
        let support = Rect { x0: window.x0 + lo1, x1: window.x1 + hi1, y0: window.y0 + lo2, y1: window.y1 + hi2 };
        let mut out = Vec::new();
        for m in support.sites() {
            let delta = |p: Site| if p == m { S::one() } else { S::zero() };
            for n in window.sites() {
                out.push((self.apply_at(n, delta).expect("in window"), other.apply_at(n, delta).expect("in window")));
            }
        }
        Ok(out)
    }

    /// `A = B` on `window`, tested by applying both to every delta
    /// function their stencils reach.
    pub fn equal_on_window(&self, other: &Self, window: Rect) -> Result<bool, OpError> {
        Ok(self.delta_responses(other, window)?.into_iter().all(|(a, b)| a == b))
    }

    /// Largest relative difference of the delta responses on `window`.
    pub fn max_relative_difference(&self, other: &Self, window: Rect) -> Result<f64, OpError> {
        Ok(self
            .delta_responses(other, window)?
            .into_iter()
            .map(|(a, b)| {
                let (a, b) = (a.approx(), b.approx());
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            })
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn q(rect: Rect) -> DifferenceOperator<Rational> {
        DifferenceOperator::identity(rect).with_term((1, 0), |_| rat(1)).with_term((0, 1), |_| rat(1))
    }

    #[test]
    fn adjoint_of_q() {
        let r = Rect::square(-4, 4);
        let qp = q(r).adjoint().unwrap();
        let expect = DifferenceOperator::identity(qp.rect())
            .with_term((-1, 0), |_| rat(1))
            .with_term((0, -1), |_| rat(1));
        assert_eq!(qp, expect);
    }

    #[test]
    fn shift_inverse() {
        let r = Rect::square(-3, 3);
        let p = DifferenceOperator::<Rational>::monomial(r, (1, 0))
            .compose(&DifferenceOperator::monomial(r, (-1, 0)))
            .unwrap();
        assert_eq!(p, DifferenceOperator::identity(p.rect()));
    }

    #[test]
    fn delta_equality_sees_coefficients() {
        let r = Rect::square(0, 5);
        let a = q(r);
        let b = q(r).with_term((1, 0), |n| rat((n == Site::new(2, 2)) as i64));
        let w = Rect::square(1, 3);
        assert!(a.equal_on_window(&a, w).unwrap());
        assert!(!a.equal_on_window(&b, w).unwrap());
    }
}
