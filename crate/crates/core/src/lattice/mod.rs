//! Discrete holomorphic calculus on the equilateral triangular lattice.
//!
//! Sites are `n = n₁e₁ + n₂e₂` with `e₂` at 60° to `e₁`. Shifts act by
//! `(t_jψ)_n = ψ_{n+e_j}`, so `Q = 1 + t₁ + t₂` sums over the white
//! triangle `⟨n, n+e₁, n+e₂⟩` and `Q⁺ = 1 + t₁⁻¹ + t₂⁻¹` over the black
//! triangle `⟨n, n−e₁, n−e₂⟩`. Holomorphic means `Q⁺ψ = 0`.

mod cauchy;
mod green;
mod patch;
mod poly;
mod trefoil;

pub use cauchy::{cauchy_reconstruct, cauchy_reconstruct_with, convolution_vanishing, LatticeDomain};
pub use green::{build_green, build_green_by_expansion, build_green_with, green, green_function};
pub use patch::LatticePatch;
pub use poly::{
    holomorphic_antiderivative, holomorphic_antiderivative_seeded, interpolate_polynomial,
    poly_side_function, poly_space_basis, taylor_coefficients, taylor_coefficients_by_residual,
    taylor_partial_sum, AdmissibleSequence,
    BigBlackTriangle, ExtensionType, PolyBasis, TaylorExpansion,
};
pub use trefoil::{extend_holomorphic, extend_holomorphic_with, TrefoilData};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::mesh::FaceColor;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("value at {site} is outside the window")]
    OutOfWindow { site: Site },
    #[error("recursion needs trefoil data at {site}")]
    WindowNotSectorClosed { site: Site },
    #[error("admissible sequence has {available} steps, {needed} needed")]
    SequenceTooShort { needed: usize, available: usize },
    #[error("function is not holomorphic at {site}")]
    NotHolomorphic { site: Site },
    #[error("window does not contain {site}")]
    InsufficientWindow { site: Site },
    #[error("order {k} exceeds the window")]
    WindowExhausted { k: usize },
    #[error("domain is empty")]
    EmptyDomain,
    #[error("no boundary value at {site}")]
    MissingBoundaryValue { site: Site },
    #[error("covariant constant values must sum to zero")]
    NotACovariantConstant,
    #[error("seed values are degenerate")]
    DegenerateSeed,
}

/// A lattice site `(n₁, n₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };
    pub const E1: Site = Site { x: 1, y: 0 };
    pub const E2: Site = Site { x: 0, y: 1 };

    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    /// Hexagonal (graph) distance to the origin.
    pub fn hex_norm(&self) -> i64 {
        self.x.abs().max(self.y.abs()).max((self.x + self.y).abs())
    }

    /// `(n₁ − n₂) mod 3`, the vertex class of the lattice 3-coloring.
    pub fn color_class(&self) -> usize {
        (self.x - self.y).rem_euclid(3) as usize
    }

    /// Position in the plane, for plotting.
    pub fn embed(&self) -> (f64, f64) {
        (self.x as f64 + 0.5 * self.y as f64, self.y as f64 * 3f64.sqrt() / 2.0)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site::new(-self.x, -self.y)
    }
}

/// Inclusive rectangle `[x0, x1] × [y0, y1]` of sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Rect {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl Rect {
    pub const fn new(x0: i64, x1: i64, y0: i64, y1: i64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn square(lo: i64, hi: i64) -> Self {
        Rect::new(lo, hi, lo, hi)
    }

    pub fn is_empty(&self) -> bool {
        self.x0 > self.x1 || self.y0 > self.y1
    }

    pub fn contains(&self, s: Site) -> bool {
        (self.x0..=self.x1).contains(&s.x) && (self.y0..=self.y1).contains(&s.y)
    }

    pub fn width(&self) -> usize {
        (self.x1 - self.x0 + 1).max(0) as usize
    }

    pub fn height(&self) -> usize {
        (self.y1 - self.y0 + 1).max(0) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    /// Row-major index of a contained site.
    pub fn index(&self, s: Site) -> usize {
        (s.y - self.y0) as usize * self.width() + (s.x - self.x0) as usize
    }

    /// Sites in row-major order (`n₂` outer).
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let r = *self;
        (r.y0..=r.y1).flat_map(move |y| (r.x0..=r.x1).map(move |x| Site::new(x, y)))
    }

    pub fn intersect(&self, o: &Rect) -> Rect {
        Rect::new(self.x0.max(o.x0), self.x1.min(o.x1), self.y0.max(o.y0), self.y1.min(o.y1))
    }

    /// Shrink by the given margins on each side.
    pub fn inset(&self, left: i64, right: i64, bottom: i64, top: i64) -> Rect {
        Rect::new(self.x0 + left, self.x1 - right, self.y0 + bottom, self.y1 - top)
    }

    pub fn center(&self) -> Site {
        Site::new((self.x0 + self.x1).div_euclid(2), (self.y0 + self.y1).div_euclid(2))
    }

    pub fn bounding(sites: impl IntoIterator<Item = Site>) -> Option<Rect> {
        let mut it = sites.into_iter();
        let s = it.next()?;
        Some(it.fold(Rect::new(s.x, s.x, s.y, s.y), |r, s| {
            Rect::new(r.x0.min(s.x), r.x1.max(s.x), r.y0.min(s.y), r.y1.max(s.y))
        }))
    }
}

/// An elementary lattice triangle: white `⟨m, m+e₁, m+e₂⟩` or black
/// `⟨m, m−e₁, m−e₂⟩`, both counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeTriangle {
    pub color: FaceColor,
    pub anchor: Site,
}

impl LatticeTriangle {
    pub fn black(anchor: Site) -> Self {
        LatticeTriangle { color: FaceColor::Black, anchor }
    }

    pub fn white(anchor: Site) -> Self {
        LatticeTriangle { color: FaceColor::White, anchor }
    }

    pub fn vertices(&self) -> [Site; 3] {
        let m = self.anchor;
        match self.color {
            FaceColor::White => [m, m + Site::E1, m + Site::E2],
            FaceColor::Black => [m, m - Site::E1, m - Site::E2],
        }
    }

    /// The three edge-adjacent triangles (all of the other color).
    pub fn neighbors(&self) -> [LatticeTriangle; 3] {
        let m = self.anchor;
        match self.color {
            FaceColor::White => [
                LatticeTriangle::black(m + Site::E1),
                LatticeTriangle::black(m + Site::E2),
                LatticeTriangle::black(m + Site::E1 + Site::E2),
            ],
            FaceColor::Black => [
                LatticeTriangle::white(m - Site::E1),
                LatticeTriangle::white(m - Site::E2),
                LatticeTriangle::white(m - Site::E1 - Site::E2),
            ],
        }
    }
}

/// An exact function on a finite set of sites.
///
/// Reads outside the stored sites are `0` for finite-support functions and
/// an [`LatticeError::OutOfWindow`] error otherwise.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LatticeFunction {
    values: BTreeMap<Site, Rational>,
    finite_support: bool,
}

impl fmt::Debug for LatticeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeFunction")
            .field("sites", &self.values.len())
            .field("finite_support", &self.finite_support)
            .finish()
    }
}

impl LatticeFunction {
    /// Empty windowed function.
    pub fn windowed() -> Self {
        LatticeFunction { values: BTreeMap::new(), finite_support: false }
    }

    /// Finite-support function with the given nonzero values.
    pub fn finite(values: BTreeMap<Site, Rational>) -> Self {
        LatticeFunction { values, finite_support: true }
    }

    pub fn from_map(values: BTreeMap<Site, Rational>) -> Self {
        LatticeFunction { values, finite_support: false }
    }

    pub fn from_fn(sites: impl IntoIterator<Item = Site>, f: impl Fn(Site) -> Rational) -> Self {
        LatticeFunction { values: sites.into_iter().map(|s| (s, f(s))).collect(), finite_support: false }
    }

    /// The delta function at a site.
    pub fn delta(at: Site) -> Self {
        LatticeFunction::finite(BTreeMap::from([(at, Rational::from_integer(1.into()))]))
    }

    pub fn is_finite_support(&self) -> bool {
        self.finite_support
    }

    pub fn set_finite_support(mut self, flag: bool) -> Self {
        self.finite_support = flag;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, s: Site) -> bool {
        self.values.contains_key(&s)
    }

    pub fn value(&self, s: Site) -> Option<&Rational> {
        self.values.get(&s)
    }

    pub fn get(&self, s: Site) -> Result<Rational, LatticeError> {
        match self.values.get(&s) {
            Some(v) => Ok(v.clone()),
            None if self.finite_support => Ok(Rational::zero()),
            None => Err(LatticeError::OutOfWindow { site: s }),
        }
    }

    pub fn insert(&mut self, s: Site, v: Rational) {
        self.values.insert(s, v);
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, &Rational)> {
        self.values.iter()
    }

    pub fn into_map(self) -> BTreeMap<Site, Rational> {
        self.values
    }

    pub fn bounding_rect(&self) -> Option<Rect> {
        Rect::bounding(self.values.keys().copied())
    }

    pub fn restrict(&self, sites: impl IntoIterator<Item = Site>) -> Result<LatticeFunction, LatticeError> {
        let mut out = LatticeFunction { values: BTreeMap::new(), finite_support: false };
        for s in sites {
            out.values.insert(s, self.get(s)?);
        }
        Ok(out)
    }

    /// Whether both functions agree at every given site.
    pub fn agrees_on(&self, other: &LatticeFunction, sites: impl IntoIterator<Item = Site>) -> bool {
        sites.into_iter().all(|s| matches!((self.get(s), other.get(s)), (Ok(a), Ok(b)) if a == b))
    }

    pub fn is_zero_on(&self, sites: impl IntoIterator<Item = Site>) -> bool {
        sites.into_iter().all(|s| matches!(self.get(s), Ok(v) if v.is_zero()))
    }

    /// Pointwise combination on the common sites.
    pub fn zip_with(&self, other: &LatticeFunction, f: impl Fn(&Rational, &Rational) -> Rational) -> LatticeFunction {
        let values = self
            .values
            .iter()
            .filter_map(|(s, a)| other.get(*s).ok().map(|b| (*s, f(a, &b))))
            .collect();
        LatticeFunction { values, finite_support: false }
    }

    pub fn sub(&self, other: &LatticeFunction) -> LatticeFunction {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &LatticeFunction) -> LatticeFunction {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: &Rational) -> LatticeFunction {
        LatticeFunction {
            values: self.values.iter().map(|(s, v)| (*s, v * c)).collect(),
            finite_support: self.finite_support,
        }
    }
}

fn stencil_sum(psi: &LatticeFunction, n: Site, shifts: [Site; 3]) -> Result<Rational, LatticeError> {
    let mut acc = Rational::zero();
    for d in shifts {
        acc += psi.get(n + d)?;
    }
    Ok(acc)
}

const Q_SHIFTS: [Site; 3] = [Site::ORIGIN, Site::E1, Site::E2];
const QPLUS_SHIFTS: [Site; 3] = [Site::ORIGIN, Site::new(-1, 0), Site::new(0, -1)];

/// `(Qψ)_n = ψ_n + ψ_{n+e₁} + ψ_{n+e₂}`.
pub fn q_at(psi: &LatticeFunction, n: Site) -> Result<Rational, LatticeError> {
    stencil_sum(psi, n, Q_SHIFTS)
}

/// `(Q⁺ψ)_n = ψ_n + ψ_{n−e₁} + ψ_{n−e₂}`.
pub fn qplus_at(psi: &LatticeFunction, n: Site) -> Result<Rational, LatticeError> {
    stencil_sum(psi, n, QPLUS_SHIFTS)
}

fn apply_stencil(psi: &LatticeFunction, shifts: [Site; 3]) -> LatticeFunction {
    if psi.finite_support {
        let mut out = BTreeMap::new();
        for s in psi.sites() {
            for d in shifts {
                let n = s - d;
                if out.contains_key(&n) {
                    continue;
                }
                let v = stencil_sum(psi, n, shifts).expect("finite support");
                out.insert(n, v);
            }
        }
        out.retain(|_, v: &mut Rational| !v.is_zero());
        LatticeFunction::finite(out)
    } else {
        let values = psi
            .sites()
            .filter_map(|n| stencil_sum(psi, n, shifts).ok().map(|v| (n, v)))
            .collect();
        LatticeFunction::from_map(values)
    }
}

/// `Qψ` wherever the stencil is available.
pub fn apply_q(psi: &LatticeFunction) -> LatticeFunction {
    apply_stencil(psi, Q_SHIFTS)
}

/// `Q⁺ψ` wherever the stencil is available.
pub fn apply_qplus(psi: &LatticeFunction) -> LatticeFunction {
    apply_stencil(psi, QPLUS_SHIFTS)
}

/// `Qψ` on the given sites.
pub fn apply_q_on(psi: &LatticeFunction, sites: impl IntoIterator<Item = Site>) -> Result<LatticeFunction, LatticeError> {
    let mut out = LatticeFunction::windowed();
    for n in sites {
        out.insert(n, q_at(psi, n)?);
    }
    Ok(out)
}

/// `Q⁺ψ` on the given sites.
pub fn apply_qplus_on(
    psi: &LatticeFunction,
    sites: impl IntoIterator<Item = Site>,
) -> Result<LatticeFunction, LatticeError> {
    let mut out = LatticeFunction::windowed();
    for n in sites {
        out.insert(n, qplus_at(psi, n)?);
    }
    Ok(out)
}

/// `Qᵏψ` wherever available.
pub fn q_power(psi: &LatticeFunction, k: usize) -> LatticeFunction {
    (0..k).fold(psi.clone(), |f, _| apply_q(&f))
}

/// First site of `sites` where `Q⁺ψ` is available and nonzero.
pub fn first_non_holomorphic(psi: &LatticeFunction) -> Option<Site> {
    psi.sites().find(|&n| matches!(qplus_at(psi, n), Ok(v) if !v.is_zero()))
}

/// The covariant constant taking `values[c]` on sites of class `c`
/// (see [`Site::color_class`]).
pub fn covariant_constant(
    values: &[Rational; 3],
    sites: impl IntoIterator<Item = Site>,
) -> Result<LatticeFunction, LatticeError> {
    if !(&values[0] + &values[1] + &values[2]).is_zero() {
        return Err(LatticeError::NotACovariantConstant);
    }
    Ok(LatticeFunction::from_fn(sites, |s| values[s.color_class()].clone()))
}

/// Class values of the covariant constant matching `ψ` on the black
/// triangle `T^b_m` (whose three vertices have distinct classes).
pub fn covariant_values_on(psi: &LatticeFunction, m: Site) -> Result<[Rational; 3], LatticeError> {
    let mut out = [Rational::zero(), Rational::zero(), Rational::zero()];
    for v in LatticeTriangle::black(m).vertices() {
        out[v.color_class()] = psi.get(v)?;
    }
    Ok(out)
}
