//! Positive factorizations `L = Q_b⁺Q_b + U = Q_w⁺Q_w + V` of seven-point
//! self-adjoint operators.

use std::collections::BTreeMap;

use super::{DifferenceOperator, OpError, Shift};
use crate::lattice::{Rect, Site};
use crate::mesh::FaceColor;
use num_traits::Zero;

use crate::scalar::Field;

/// `a + b t₁ + c t₂ + d t₁⁻¹t₂ + e t₁⁻¹ + f t₂⁻¹ + g t₁t₂⁻¹`.
pub const SCHRODINGER_SHIFTS: [Shift; 7] = [(0, 0), (1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// A real self-adjoint seven-point operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerOperator<F> {
    op: DifferenceOperator<F>,
}

impl<F: Field> SchrodingerOperator<F> {
    pub fn new(op: DifferenceOperator<F>) -> Result<Self, OpError> {
        if let Some(shift) = op.shifts().find(|s| !SCHRODINGER_SHIFTS.contains(s)) {
            return Err(OpError::UnexpectedShift { shift });
        }
        let r = op.rect();
        for n in r.sites() {
            for &(a1, a2) in &SCHRODINGER_SHIFTS[1..] {
                let m = n + Site::new(a1, a2);
                if r.contains(m) && op.coeff((a1, a2), n) != op.coeff((-a1, -a2), m) {
                    return Err(OpError::NotSelfAdjoint { site: n });
                }
            }
        }
        Ok(SchrodingerOperator { op })
    }

    /// Build from a diagonal and a symmetric edge weight; `edge` is called
    /// with the lexicographically smaller site first.
    pub fn from_weights(rect: Rect, diag: impl Fn(Site) -> F, edge: impl Fn(Site, Site) -> F) -> Self {
        let mut op = DifferenceOperator::zero(rect).with_term((0, 0), diag);
        for &(a1, a2) in &SCHRODINGER_SHIFTS[1..] {
            op = op.with_term((a1, a2), |n| {
                let m = n + Site::new(a1, a2);
                if n < m {
                    edge(n, m)
                } else {
                    edge(m, n)
                }
            });
        }
        SchrodingerOperator { op }
    }

    pub fn operator(&self) -> &DifferenceOperator<F> {
        &self.op
    }

    /// `b_{P,P′}` for adjacent or equal sites, when `P` is in the window.
    pub fn weight(&self, p: Site, q: Site) -> Option<F> {
        let d = q - p;
        self.op.coeff((d.x, d.y), p)
    }
}

/// `Q` with positive coefficients and the potential left over.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<F: Field> {
    pub color: FaceColor,
    /// `Q_b = u + v t₁⁻¹ + w t₂⁻¹` or `Q_w = x + y t₁ + z t₂`.
    pub q: DifferenceOperator<F::Root>,
    /// Squared coefficients, exact in the base field, keyed by shift.
    pub squares: BTreeMap<Shift, BTreeMap<Site, F>>,
    /// `U_P` or `V_P`, on the sites where it is determined.
    pub potential: BTreeMap<Site, F>,
    /// Window interior on which the factorization is asserted.
    pub interior: Rect,
}

impl<F: Field> Factorization<F> {
    /// `Q⁺Q + potential`, on the interior.
    pub fn recompose(&self) -> Result<DifferenceOperator<F::Root>, OpError> {
        let qq = self.q.adjoint()?.compose(&self.q)?.restrict(self.interior)?;
        let pot = DifferenceOperator::zero(self.interior)
            .with_term((0, 0), |n| self.potential.get(&n).map_or_else(F::Root::zero, |u| u.embed()));
        qq.add(&pot)
    }

    /// Exact round trip against the original operator on the interior.
    pub fn round_trip(&self, l: &SchrodingerOperator<F>) -> Result<bool, OpError> {
        let lhs = self.recompose()?;
        let rhs = l.op.map(|c| c.embed());
        lhs.equal_on_window(&rhs, self.interior)
    }
}

/// Factor `L` through black (`Q_b`) or white (`Q_w`) triangles. On each
/// triangle `⟨A,B,C⟩` of that colour the coefficient at `A` is
/// `√(b_AB b_AC / b_BC)`; every edge lies in exactly one such triangle.
pub fn factorize<F: Field>(l: &SchrodingerOperator<F>, color: FaceColor) -> Result<Factorization<F>, OpError> {
    let r = l.op.rect();
    // Triangle ⟨m, m+s₁, m+s₂⟩ and the shifts of Q.
    let (s1, s2, q_shifts, rect_q) = match color {
        FaceColor::Black => (
            Site::new(-1, 0),
            Site::new(0, -1),
            [(0, 0), (-1, 0), (0, -1)],
            Rect { x0: r.x0 + 1, ..r },
        ),
        FaceColor::White => (Site::new(1, 0), Site::new(0, 1), [(0, 0), (1, 0), (0, 1)], Rect { x1: r.x1 - 1, ..r }),
    };
    if rect_q.is_empty() {
        return Err(OpError::WindowMismatch);
    }
    let mut sq: [BTreeMap<Site, F>; 3] = Default::default();
    for m in rect_q.sites() {
        let (a, b, c) = (m, m + s1, m + s2);
        let w_ab = l.weight(a, b).expect("in window");
        let w_ac = l.weight(a, c).expect("in window");
        let w_bc = l.weight(b, c).expect("in window");
        if !(w_ab.is_positive() && w_ac.is_positive() && w_bc.is_positive()) {
            return Err(OpError::NotFactorizable { site: m });
        }
        sq[0].insert(m, w_ab.clone() * w_ac.clone() / w_bc.clone());
        sq[1].insert(m, w_ab.clone() * w_bc.clone() / w_ac.clone());
        sq[2].insert(m, w_ac * w_bc / w_ab);
    }
    let mut q = DifferenceOperator::zero(rect_q);
    for (k, &shift) in q_shifts.iter().enumerate() {
        q = q.with_term(shift, |m| sq[k][&m].sqrt_root().expect("positive"));
    }
    // Q⁺Q has diagonal Σ_k c_k(n − shift_k)².
    let mut potential = BTreeMap::new();
    let interior = Rect {
        x0: rect_q.x0 + q_shifts.iter().map(|s| s.0).max().unwrap_or(0).max(0),
        x1: rect_q.x1 + q_shifts.iter().map(|s| s.0).min().unwrap_or(0).min(0),
        y0: rect_q.y0 + q_shifts.iter().map(|s| s.1).max().unwrap_or(0).max(0),
        y1: rect_q.y1 + q_shifts.iter().map(|s| s.1).min().unwrap_or(0).min(0),
    };
    for n in interior.sites() {
        let a = l.op.coeff((0, 0), n).expect("in window");
        let diag = q_shifts
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (k, &(s1, s2))| acc + sq[k][&(n - Site::new(s1, s2))].clone());
        potential.insert(n, a - diag);
    }
    let squares = q_shifts.iter().copied().zip(sq).collect();
    Ok(Factorization { color, q, squares, potential, interior })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn constant_round_trip() {
        // L = Q⁺Q for Q = 1 + t₁ + t₂: diagonal 3, edges 1.
        let l = SchrodingerOperator::from_weights(Rect::square(-4, 4), |_| rat(3), |_, _| rat(1));
        for color in [FaceColor::Black, FaceColor::White] {
            let f = factorize(&l, color).unwrap();
            assert!(f.potential.values().all(|u| *u == rat(0)));
            assert!(f.squares.values().flat_map(|m| m.values()).all(|c| *c == rat(1)));
            assert!(f.round_trip(&l).unwrap());
        }
    }

    #[test]
    fn rejects_asymmetry_and_nonpositive() {
        let r = Rect::square(0, 3);
        let op = DifferenceOperator::<Rational>::identity(r).with_term((1, 0), |_| rat(1));
        assert!(matches!(SchrodingerOperator::new(op), Err(OpError::NotSelfAdjoint { .. })));
        let l = SchrodingerOperator::from_weights(r, |_| rat(3), |p, _| if p == Site::new(1, 1) { rat(-1) } else { rat(1) });
        assert!(matches!(factorize(&l, FaceColor::Black), Err(OpError::NotFactorizable { .. })));
    }
}
