use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::{apply_qplus, LatticeError, LatticeFunction, LatticePatch, LatticeTriangle, Site};
use crate::mesh::{FaceColor, MeshError};
use crate::par::{self, Exec};
use crate::scalar::Rational;

/// A finite domain `D` on the lattice: a set of elementary triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeDomain {
    triangles: BTreeSet<LatticeTriangle>,
}

impl LatticeDomain {
    pub fn new(triangles: impl IntoIterator<Item = LatticeTriangle>) -> Result<Self, LatticeError> {
        let triangles: BTreeSet<LatticeTriangle> = triangles.into_iter().collect();
        if triangles.is_empty() {
            return Err(LatticeError::EmptyDomain);
        }
        Ok(LatticeDomain { triangles })
    }

    pub fn triangles(&self) -> &BTreeSet<LatticeTriangle> {
        &self.triangles
    }

    pub fn contains(&self, t: &LatticeTriangle) -> bool {
        self.triangles.contains(t)
    }

    pub fn vertices(&self) -> BTreeSet<Site> {
        self.triangles.iter().flat_map(|t| t.vertices()).collect()
    }

    /// Vertices of `∂D`: endpoints of edges with one domain triangle.
    pub fn boundary_vertices(&self) -> BTreeSet<Site> {
        let mut count: BTreeMap<(Site, Site), usize> = BTreeMap::new();
        for t in &self.triangles {
            let v = t.vertices();
            for i in 0..3 {
                let (a, b) = (v[i], v[(i + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        count.into_iter().filter(|&(_, c)| c == 1).flat_map(|((a, b), _)| [a, b]).collect()
    }

    pub fn interior_vertices(&self) -> BTreeSet<Site> {
        let b = self.boundary_vertices();
        self.vertices().into_iter().filter(|v| !b.contains(v)).collect()
    }

    /// Black triangles of `∂₊D`: outside `D`, touching `∂D`.
    pub fn outer_black_boundary(&self) -> Vec<LatticeTriangle> {
        let b = self.boundary_vertices();
        let mut out: BTreeSet<LatticeTriangle> = BTreeSet::new();
        for &v in &b {
            for m in [v, v + Site::E1, v + Site::E2] {
                let t = LatticeTriangle::black(m);
                if !self.triangles.contains(&t) {
                    out.insert(t);
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn to_patch(&self) -> Result<LatticePatch, MeshError> {
        LatticePatch::from_triangles(self.triangles.iter().copied())
    }

    pub fn black_count(&self) -> usize {
        self.triangles.iter().filter(|t| t.color == FaceColor::Black).count()
    }
}

/// Reconstruct `ψ` at every vertex of `D` from its values on `∂D`:
/// `ψ_n = Σ_{T^b_m ∈ ∂₊D} (Q⁺ψ)_m K_{n−m}` with `ψ` extended by zero
/// outside `D`. Any kernel with `Q⁺K = δ` may be used.
pub fn cauchy_reconstruct<K>(
    domain: &LatticeDomain,
    boundary: &LatticeFunction,
    kernel: K,
) -> Result<LatticeFunction, LatticeError>
where
    K: Fn(Site) -> Rational + Sync,
{
    cauchy_reconstruct_with(Exec::default(), domain, boundary, kernel)
}

pub fn cauchy_reconstruct_with<K>(
    exec: Exec,
    domain: &LatticeDomain,
    boundary: &LatticeFunction,
    kernel: K,
) -> Result<LatticeFunction, LatticeError>
where
    K: Fn(Site) -> Rational + Sync,
{
    let verts = domain.vertices();
    let bverts = domain.boundary_vertices();
    if let Some(&s) = bverts.iter().find(|&&s| !boundary.contains(s)) {
        return Err(LatticeError::MissingBoundaryValue { site: s });
    }
    let sources: Vec<(Site, Rational)> = domain
        .outer_black_boundary()
        .into_iter()
        .filter_map(|t| {
            let q: Rational = t
                .vertices()
                .iter()
                .filter(|v| verts.contains(v))
                .map(|v| boundary.value(*v).cloned().expect("boundary vertex"))
                .sum();
            (!q.is_zero()).then_some((t.anchor, q))
        })
        .collect();
    let targets: Vec<Site> = verts.into_iter().collect();
    let values = par::map(exec, &targets, |&n| {
        sources.iter().fold(Rational::zero(), |acc, (m, q)| {
            let k = kernel(n - *m);
            if k.is_zero() {
                acc
            } else {
                acc + q * k
            }
        })
    });
    Ok(LatticeFunction::from_map(targets.into_iter().zip(values).collect()))
}

/// `Σ_m (Q⁺ψ)_m φ_{n−m}` for finite-support `ψ`; vanishes when `φ` is
/// holomorphic on the sites read.
pub fn convolution_vanishing(psi: &LatticeFunction, phi: &LatticeFunction, n: Site) -> Result<Rational, LatticeError> {
    let f = apply_qplus(&psi.clone().set_finite_support(true));
    let mut acc = Rational::zero();
    for (m, v) in f.iter() {
        acc += v * phi.get(n - *m)?;
    }
    Ok(acc)
}
