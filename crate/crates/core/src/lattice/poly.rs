use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    covariant_constant, covariant_values_on, q_at, q_power, qplus_at, LatticeError, LatticeFunction,
    LatticeTriangle, Site,
};
use crate::linalg::Matrix;
use crate::mesh::FaceColor;
use crate::scalar::Rational;

/// `T_n^{(k)}`: the black triangle with corners `n`, `n − (2k+1)e₁`,
/// `n − (2k+1)e₂` and `2k + 2` sites per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BigBlackTriangle {
    pub apex: Site,
    pub k: usize,
}

/// Two-side extension types; `(12)` adds sides 1 and 2, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExtensionType {
    #[serde(rename = "12")]
    S12,
    #[serde(rename = "23")]
    S23,
    #[serde(rename = "31")]
    S31,
}

impl ExtensionType {
    /// The two sides, 1-based.
    pub fn sides(self) -> (usize, usize) {
        match self {
            ExtensionType::S12 => (1, 2),
            ExtensionType::S23 => (2, 3),
            ExtensionType::S31 => (3, 1),
        }
    }

    fn next(self) -> Self {
        match self {
            ExtensionType::S12 => ExtensionType::S23,
            ExtensionType::S23 => ExtensionType::S31,
            ExtensionType::S31 => ExtensionType::S12,
        }
    }
}

impl BigBlackTriangle {
    pub fn new(apex: Site, k: usize) -> Self {
        BigBlackTriangle { apex, k }
    }

    fn span(&self) -> i64 {
        2 * self.k as i64 + 1
    }

    pub fn contains(&self, p: Site) -> bool {
        let d = p - self.apex;
        d.x <= 0 && d.y <= 0 && d.x + d.y >= -self.span()
    }

    pub fn sites(&self) -> Vec<Site> {
        let s = self.span();
        let mut out = Vec::new();
        for b in -s..=0 {
            for a in (-s - b)..=0 {
                out.push(self.apex + Site::new(a, b));
            }
        }
        out
    }

    pub fn site_count(&self) -> usize {
        let m = self.span() as usize + 1;
        m * (m + 1) / 2
    }

    /// Sites of side `i ∈ {1,2,3}` in order `j = 0, …, 2k+1`.
    pub fn side(&self, i: usize) -> Vec<Site> {
        let s = self.span();
        let n = self.apex;
        (0..=s)
            .map(|j| match i {
                1 => Site::new(n.x - s + j, n.y),
                2 => Site::new(n.x, n.y - j),
                3 => Site::new(n.x - j, n.y - s + j),
                _ => panic!("side index {i}"),
            })
            .collect()
    }

    /// `T^b(k) = T^b_{n − (k,k)}`, where `Qᵏψ` is read off.
    pub fn derivative_triangle(&self) -> LatticeTriangle {
        let k = self.k as i64;
        LatticeTriangle::black(self.apex - Site::new(k, k))
    }

    /// `T^{(k−1)}_{n−(1,1)}`, on which `Qψ` determines an order-`k`
    /// interpolant.
    pub fn inner(&self) -> Option<BigBlackTriangle> {
        (self.k > 0).then(|| BigBlackTriangle::new(self.apex - Site::new(1, 1), self.k - 1))
    }

    pub fn extend(&self, ty: ExtensionType) -> BigBlackTriangle {
        let shift = match ty {
            ExtensionType::S12 => Site::new(1, 1),
            ExtensionType::S23 => Site::new(1, 0),
            ExtensionType::S31 => Site::new(0, 1),
        };
        BigBlackTriangle::new(self.apex + shift, self.k + 1)
    }
}

/// `p_{k,i}` on the sites of `T_n^{(k)}`: `(−1)^{j+k}` along side `i`,
/// zero elsewhere in the triangle.
pub fn poly_side_function(tri: &BigBlackTriangle, i: usize) -> LatticeFunction {
    let mut f = LatticeFunction::from_fn(tri.sites(), |_| Rational::zero());
    for (j, p) in tri.side(i).into_iter().enumerate() {
        let v = if (j + tri.k) % 2 == 0 { Rational::one() } else { -Rational::one() };
        f.insert(p, v);
    }
    f
}

/// Nested big triangles `T(0) ⊂ T(1) ⊂ …`, each a two-side extension of
/// the previous one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleSequence {
    start: Site,
    /// `types[k-1]` is the extension type taking `T(k−1)` to `T(k)`.
    types: Vec<ExtensionType>,
}

impl AdmissibleSequence {
    pub fn new(start: Site, types: Vec<ExtensionType>) -> Self {
        AdmissibleSequence { start, types }
    }

    /// Start at the black triangle `T^b_center` and cycle `(12), (23), (31)`.
    pub fn cycling(center: Site, len: usize) -> Self {
        let mut types = Vec::with_capacity(len.saturating_sub(1));
        let mut t = ExtensionType::S12;
        for _ in 1..len {
            types.push(t);
            t = t.next();
        }
        AdmissibleSequence { start: center, types }
    }

    /// Number of triangles `T(0), …` in the sequence.
    pub fn len(&self) -> usize {
        self.types.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn triangle(&self, k: usize) -> Result<BigBlackTriangle, LatticeError> {
        if k >= self.len() {
            return Err(LatticeError::SequenceTooShort { needed: k + 1, available: self.len() });
        }
        Ok(self.types[..k].iter().fold(BigBlackTriangle::new(self.start, 0), |t, &ty| t.extend(ty)))
    }

    /// The sides whose side polynomials form the order-`k` basis pair.
    /// Order 0 has no extension and uses sides 1 and 2.
    pub fn basis_sides(&self, k: usize) -> (usize, usize) {
        if k == 0 {
            (1, 2)
        } else {
            self.types[k - 1].sides()
        }
    }

    pub fn types(&self) -> &[ExtensionType] {
        &self.types
    }
}

/// One function `ψ` with `Qψ = φ` and `Q⁺ψ = 0`.
///
/// `φ` is given on a set `S`; `ψ` is produced on the vertices of the
/// white triangles anchored in `S`. The additive covariant constant is
/// fixed by `ψ = 0` at `(0,0)` and `(−1,0)` when the black triangle at
/// the origin is available, otherwise on the first available black
/// triangle.
pub fn holomorphic_antiderivative(phi: &LatticeFunction) -> Result<LatticeFunction, LatticeError> {
    antiderivative(phi, None)
}

/// As [`holomorphic_antiderivative`], pinning `ψ = 0` on `T^b_seed`.
pub fn holomorphic_antiderivative_seeded(phi: &LatticeFunction, seed: Site) -> Result<LatticeFunction, LatticeError> {
    antiderivative(phi, Some(seed))
}

fn antiderivative(phi: &LatticeFunction, seed: Option<Site>) -> Result<LatticeFunction, LatticeError> {
    for n in phi.sites() {
        if let Ok(v) = qplus_at(phi, n) {
            if !v.is_zero() {
                return Err(LatticeError::NotHolomorphic { site: n });
            }
        }
    }
    let mut tris: BTreeSet<LatticeTriangle> = phi.sites().map(LatticeTriangle::white).collect();
    let verts: BTreeSet<Site> = tris.iter().flat_map(|t| t.vertices()).collect();
    for &v in &verts {
        let b = LatticeTriangle::black(v);
        if b.vertices().iter().all(|p| verts.contains(p)) {
            tris.insert(b);
        }
    }
    let rhs = |t: &LatticeTriangle| match t.color {
        FaceColor::White => phi.get(t.anchor).expect("white anchored in S"),
        FaceColor::Black => Rational::zero(),
    };

    let mut psi: BTreeMap<Site, Rational> = BTreeMap::new();
    let start = match seed {
        Some(s) => {
            let t = LatticeTriangle::black(s);
            if !tris.contains(&t) {
                return Err(LatticeError::InsufficientWindow { site: s });
            }
            t
        }
        None => {
            let origin = LatticeTriangle::black(Site::ORIGIN);
            if tris.contains(&origin) {
                origin
            } else if let Some(t) = tris.iter().find(|t| t.color == FaceColor::Black) {
                *t
            } else {
                *tris.iter().next().ok_or(LatticeError::EmptyDomain)?
            }
        }
    };
    let [a, b, c] = start.vertices();
    psi.insert(a, Rational::zero());
    psi.insert(b, Rational::zero());
    psi.insert(c, rhs(&start));

    let mut seen: BTreeSet<LatticeTriangle> = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for nb in t.neighbors() {
            if !tris.contains(&nb) || seen.contains(&nb) {
                continue;
            }
            let vs = nb.vertices();
            let unknown: Vec<Site> = vs.iter().copied().filter(|v| !psi.contains_key(v)).collect();
            if let [x] = unknown[..] {
                let known: Rational = vs.iter().filter(|&&v| v != x).map(|v| psi[v].clone()).sum();
                psi.insert(x, rhs(&nb) - known);
            }
            seen.insert(nb);
            queue.push_back(nb);
        }
    }
    if let Some(v) = verts.iter().find(|v| !psi.contains_key(v)) {
        return Err(LatticeError::InsufficientWindow { site: *v });
    }
    for t in &tris {
        let s: Rational = t.vertices().iter().map(|v| psi[v].clone()).sum();
        if s != rhs(t) {
            return Err(LatticeError::NotHolomorphic { site: t.anchor });
        }
    }
    Ok(LatticeFunction::from_map(psi))
}

/// The unique `p_k ∈ 𝒫_k` agreeing with `ψ` on `tri`, evaluated on
/// `window`.
///
/// Only the values of `ψ` on `tri` are read.
pub fn interpolate_polynomial(
    psi: &LatticeFunction,
    tri: &BigBlackTriangle,
    window: impl IntoIterator<Item = Site>,
) -> Result<LatticeFunction, LatticeError> {
    let window: BTreeSet<Site> = window.into_iter().collect();
    for s in tri.sites() {
        psi.get(s).map_err(|_| LatticeError::InsufficientWindow { site: s })?;
    }
    let p = interpolate_rec(psi, tri, &window)?;
    for s in tri.sites() {
        if p.get(s)? != psi.get(s)? {
            return Err(LatticeError::NotHolomorphic { site: s });
        }
    }
    p.restrict(window)
}

fn interpolate_rec(
    psi: &LatticeFunction,
    tri: &BigBlackTriangle,
    window: &BTreeSet<Site>,
) -> Result<LatticeFunction, LatticeError> {
    let mut w: BTreeSet<Site> = window.clone();
    w.extend(tri.sites());
    let apex_tri = LatticeTriangle::black(tri.apex);
    let Some(inner) = tri.inner() else {
        let vals = covariant_values_on(psi, tri.apex)?;
        return covariant_constant(&vals, w).map_err(|_| LatticeError::NotHolomorphic { site: tri.apex });
    };
    let mut dpsi = LatticeFunction::windowed();
    for s in inner.sites() {
        dpsi.insert(s, q_at(psi, s)?);
    }
    let lower = interpolate_rec(&dpsi, &inner, &w)?;
    let anti = holomorphic_antiderivative(&lower)?;
    let mut diff = [Rational::zero(), Rational::zero(), Rational::zero()];
    for v in apex_tri.vertices() {
        diff[v.color_class()] = psi.get(v)? - anti.get(v)?;
    }
    let corr = covariant_constant(&diff, w.iter().copied()).map_err(|_| LatticeError::NotHolomorphic { site: tri.apex })?;
    let mut out = LatticeFunction::windowed();
    for s in w {
        out.insert(s, anti.get(s)? + corr.get(s)?);
    }
    Ok(out)
}

/// Basis `ψ¹_j, ψ²_j` (`j ≤ k`) of `𝒫_k` attached to an admissible
/// sequence, evaluated on a set of sites.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    pub seq: AdmissibleSequence,
    pub functions: Vec<[LatticeFunction; 2]>,
}

impl PolyBasis {
    pub fn order(&self) -> usize {
        self.functions.len() - 1
    }

    /// The `2k + 2` functions in order `ψ¹₀, ψ²₀, ψ¹₁, …`.
    pub fn flat(&self) -> Vec<&LatticeFunction> {
        self.functions.iter().flatten().collect()
    }
}

pub fn poly_space_basis(
    k: usize,
    seq: &AdmissibleSequence,
    window: impl IntoIterator<Item = Site>,
) -> Result<PolyBasis, LatticeError> {
    let window: Vec<Site> = window.into_iter().collect();
    seq.triangle(k)?;
    let mut functions = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let tri = seq.triangle(j)?;
        let (i1, i2) = seq.basis_sides(j);
        let a = interpolate_polynomial(&poly_side_function(&tri, i1), &tri, window.iter().copied())?;
        let b = interpolate_polynomial(&poly_side_function(&tri, i2), &tri, window.iter().copied())?;
        functions.push([a, b]);
    }
    Ok(PolyBasis { seq: seq.clone(), functions })
}

/// Taylor coefficients `α¹_k, α²_k` of `ψ` with respect to an admissible
/// sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorExpansion {
    pub alpha: Vec<[Rational; 2]>,
    /// Whether `ψ − S_k` vanishes on `T(k)`, per order.
    pub residual_vanishes: Vec<bool>,
}

/// Solve `x = a·u + b·v` for a triple `x` in the span of `u, v`.
fn decompose(x: &[Rational; 3], u: &[Rational; 3], v: &[Rational; 3]) -> Option<[Rational; 2]> {
    let m = Matrix::from_rows((0..3).map(|i| vec![u[i].clone(), v[i].clone()]).collect());
    let s = m.solve(x)?;
    s.is_unique().then(|| [s.particular[0].clone(), s.particular[1].clone()])
}

fn derivative_triple(f: &LatticeFunction, tri: &BigBlackTriangle) -> Result<[Rational; 3], LatticeError> {
    let dt = tri.derivative_triangle();
    let restricted = f.restrict(tri.sites()).map_err(|e| match e {
        LatticeError::OutOfWindow { .. } => LatticeError::WindowExhausted { k: tri.k },
        e => e,
    })?;
    let qk = q_power(&restricted, tri.k);
    let [a, b, c] = dt.vertices();
    Ok([qk.get(a)?, qk.get(b)?, qk.get(c)?])
}

/// Coefficients through order `order`, each read off from `Qᵏψ` on
/// `T^b(k)`, together with the residual check of the partial sums.
pub fn taylor_coefficients(
    psi: &LatticeFunction,
    basis: &PolyBasis,
    order: usize,
) -> Result<TaylorExpansion, LatticeError> {
    if order > basis.order() {
        return Err(LatticeError::SequenceTooShort { needed: order + 1, available: basis.order() + 1 });
    }
    let top = basis.seq.triangle(order)?;
    for s in top.sites() {
        if !psi.contains(s) {
            return Err(LatticeError::WindowExhausted { k: order });
        }
    }
    let mut alpha = Vec::with_capacity(order + 1);
    let mut residual_vanishes = Vec::with_capacity(order + 1);
    let mut residual = psi.restrict(top.sites())?;
    for k in 0..=order {
        let tri = basis.seq.triangle(k)?;
        let x = derivative_triple(psi, &tri)?;
        let u = derivative_triple(&basis.functions[k][0], &tri)?;
        let v = derivative_triple(&basis.functions[k][1], &tri)?;
        let a = decompose(&x, &u, &v).ok_or(LatticeError::NotHolomorphic { site: tri.apex })?;
        residual = residual
            .sub(&basis.functions[k][0].scale(&a[0]))
            .sub(&basis.functions[k][1].scale(&a[1]));
        residual_vanishes.push(residual.is_zero_on(tri.sites()));
        alpha.push(a);
    }
    Ok(TaylorExpansion { alpha, residual_vanishes })
}

/// Coefficients computed order by order from the residual
/// `ψ − S_{k−1}` instead of `ψ` itself.
pub fn taylor_coefficients_by_residual(
    psi: &LatticeFunction,
    basis: &PolyBasis,
    order: usize,
) -> Result<Vec<[Rational; 2]>, LatticeError> {
    let top = basis.seq.triangle(order)?;
    let mut residual = psi.restrict(top.sites()).map_err(|_| LatticeError::WindowExhausted { k: order })?;
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let tri = basis.seq.triangle(k)?;
        let x = derivative_triple(&residual, &tri)?;
        let u = derivative_triple(&basis.functions[k][0], &tri)?;
        let v = derivative_triple(&basis.functions[k][1], &tri)?;
        let a = decompose(&x, &u, &v).ok_or(LatticeError::NotHolomorphic { site: tri.apex })?;
        residual = residual
            .sub(&basis.functions[k][0].scale(&a[0]))
            .sub(&basis.functions[k][1].scale(&a[1]));
        out.push(a);
    }
    Ok(out)
}

/// `S_k = Σ_{j≤k} α¹_j ψ¹_j + α²_j ψ²_j` on the basis sites.
pub fn taylor_partial_sum(expansion: &TaylorExpansion, basis: &PolyBasis, k: usize) -> LatticeFunction {
    let mut sum = basis.functions[0][0].scale(&Rational::zero());
    for j in 0..=k {
        sum = sum
            .add(&basis.functions[j][0].scale(&expansion.alpha[j][0]))
            .add(&basis.functions[j][1].scale(&expansion.alpha[j][1]));
    }
    sum
}
