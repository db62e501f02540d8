//! Exponential-coefficient operators `Q(c,d) = 1 + c e^{l₁(n)} t₁ + d e^{l₂(n)} t₂`
//! and the zero-curvature criterion for a pair `(Q_w, Q_b)`.

use std::collections::{BTreeMap, BTreeSet};

use super::{DifferenceOperator, OpError};
use crate::lattice::{Rect, Site};
use crate::scalar::Field;

/// `c`, `d` and `E = (e^{l_ij})`, so that `e^{l_j(n)} = E_j1^{n₁} E_j2^{n₂}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpParams<F> {
    pub c: F,
    pub d: F,
    pub e: [[F; 2]; 2],
}

impl<F: Field> ExpParams<F> {
    /// `q = e^{l₁₁}`, provided `l_ij + l_ji` is constant, i.e.
    /// `E₁₁ = E₂₂` and `E₁₂E₂₁ = E₁₁²`.
    pub fn q(&self) -> Result<F, OpError> {
        let [[e11, e12], [e21, e22]] = &self.e;
        if e11 != e22 || e12.clone() * e21.clone() != e11.clone() * e11.clone() {
            return Err(OpError::ConditionViolated);
        }
        Ok(e11.clone())
    }

    pub fn scaled(&self, s: &F) -> Self {
        ExpParams { c: self.c.clone() * s.clone(), d: self.d.clone() * s.clone(), e: self.e.clone() }
    }
}

fn exp_form<F: Field>(row: &[F; 2], n: Site) -> F {
    row[0].powi(n.x) * row[1].powi(n.y)
}

/// `Q(c,d)` on `rect`.
pub fn build_exponential_q<F: Field>(p: &ExpParams<F>, rect: Rect) -> DifferenceOperator<F> {
    DifferenceOperator::identity(rect)
        .with_term((1, 0), |n| p.c.clone() * exp_form(&p.e[0], n))
        .with_term((0, 1), |n| p.d.clone() * exp_form(&p.e[1], n))
}

/// `Q(c,d)` with real exponentials `e^{l_j(n)}` evaluated by `exp`.
pub fn build_exponential_q_float(c: f64, d: f64, l: [[f64; 2]; 2], rect: Rect) -> DifferenceOperator<f64> {
    let form = |row: [f64; 2], n: Site| (row[0] * n.x as f64 + row[1] * n.y as f64).exp();
    DifferenceOperator::identity(rect)
        .with_term((1, 0), |n| c * form(l[0], n))
        .with_term((0, 1), |n| d * form(l[1], n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QcdReport {
    pub window: Rect,
    pub holds: bool,
    pub max_relative_error: f64,
}

fn qcd_sides<F: Field>(
    qf: impl Fn(F, F) -> DifferenceOperator<F>,
    c: &F,
    d: &F,
    q: &F,
    window: Rect,
) -> Result<(DifferenceOperator<F>, DifferenceOperator<F>), OpError> {
    let q2 = q.clone() * q.clone();
    let big = window.inset(-2, -2, -2, -2);
    let one = DifferenceOperator::identity(big);
    let qq = qf(c.clone(), d.clone());
    let lhs = qq.adjoint()?.compose(&qq)?.sub(&one)?;
    let qs = qf(c.clone() / q2.clone(), d.clone() / q2.clone());
    let rhs = qs.compose(&qs.adjoint()?)?.sub(&one)?.left_mul(|_| q2.clone());
    Ok((lhs, rhs))
}

/// `Q(c,d)⁺Q(c,d) − 1 = q²(Q(c/q²,d/q²)Q(c/q²,d/q²)⁺ − 1)`, exactly on
/// `window`.
pub fn verify_qcd_identity<F: Field>(p: &ExpParams<F>, window: Rect) -> Result<QcdReport, OpError> {
    let q = p.q()?;
    let big = window.inset(-2, -2, -2, -2);
    let (lhs, rhs) = qcd_sides(
        |c, d| build_exponential_q(&ExpParams { c, d, e: p.e.clone() }, big),
        &p.c,
        &p.d,
        &q,
        window,
    )?;
    Ok(QcdReport {
        window,
        holds: lhs.equal_on_window(&rhs, window)?,
        max_relative_error: lhs.max_relative_difference(&rhs, window)?,
    })
}

/// Float version with real `l_ij`; passes when the relative error is at
/// most `tol`.
pub fn verify_qcd_identity_float(c: f64, d: f64, l: [[f64; 2]; 2], window: Rect, tol: f64) -> Result<QcdReport, OpError> {
    let h = l[0][1] + l[1][0];
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
    if !(close(2.0 * l[0][0], h) && close(2.0 * l[1][1], h)) {
        return Err(OpError::ConditionViolated);
    }
    let q = l[0][0].exp();
    let big = window.inset(-2, -2, -2, -2);
    let (lhs, rhs) = qcd_sides(|c, d| build_exponential_q_float(c, d, l, big), &c, &d, &q, window)?;
    let err = lhs.max_relative_difference(&rhs, window)?;
    Ok(QcdReport { window, holds: err <= tol, max_relative_error: err })
}

/// `(Q_w, Q_b) = (Q(c,d), Q(c,d)⁺)`.
pub fn exponential_pair<F: Field>(
    p: &ExpParams<F>,
    rect: Rect,
) -> Result<(DifferenceOperator<F>, DifferenceOperator<F>), OpError> {
    let qw = build_exponential_q(p, rect);
    let qb = qw.adjoint()?;
    Ok((qw, qb))
}

/// Find `f` with `(Q_w−1)(Q_b−1) − 1 = f·((Q_b−1)(Q_w−1) − 1)` on
/// `window`; `None` when no everywhere nonzero `f` exists.
pub fn f_criterion<F: Field>(
    qw: &DifferenceOperator<F>,
    qb: &DifferenceOperator<F>,
    window: Rect,
) -> Result<Option<BTreeMap<Site, F>>, OpError> {
    let r = qw.rect().intersect(&qb.rect());
    let one = DifferenceOperator::identity(r);
    let (w1, b1) = (qw.sub(&one)?, qb.sub(&one)?);
    let a = w1.compose(&b1)?.sub(&one)?;
    let b = b1.compose(&w1)?.sub(&one)?;
    let common = a.rect().intersect(&b.rect());
    if common.intersect(&window) != window {
        return Err(OpError::WindowMismatch);
    }
    let shifts: BTreeSet<_> = a.shifts().chain(b.shifts()).collect();
    let mut f = BTreeMap::new();
    for n in window.sites() {
        let mut ratio: Option<F> = None;
        for &s in &shifts {
            let (x, y) = (a.coeff(s, n).expect("in window"), b.coeff(s, n).expect("in window"));
            if y.is_zero() {
                if !x.is_zero() {
                    return Ok(None);
                }
                continue;
            }
            let r = x / y;
            match &ratio {
                Some(prev) if *prev != r => return Ok(None),
                Some(_) => {}
                None => ratio = Some(r),
            }
        }
        let v = ratio.unwrap_or_else(F::one);
        if v.is_zero() {
            return Ok(None);
        }
        f.insert(n, v);
    }
    Ok(Some(f))
}
