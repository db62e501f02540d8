//! Discrete connections `b_{T,P}`: curvature, transport along thick paths,
//! holonomy groups, and connections synthesized from a flat `GL(2)`
//! representation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{Mat2, Matrix};
use crate::mesh::{loop_color_permutation, MeshError, Perm3, ThickPath, TriangleId, TriangulatedSurface, VertexId};
use crate::par::{self, Exec};
use crate::scalar::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("coefficient of vertex {local} in triangle {triangle} is zero")]
    ZeroCoefficient { triangle: TriangleId, local: usize },
    #[error("vertex {vertex} is on the boundary")]
    BoundaryVertex { vertex: VertexId },
    #[error("seed does not satisfy the first triangle equation")]
    SeedViolation,
    #[error("triangle {triangle} is not in the family")]
    ZeroDivisor { triangle: TriangleId },
    #[error("path needs at least two triangles")]
    PathTooShort,
    #[error("curvature at vertex {vertex} is not the identity")]
    NonzeroCurvature { vertex: VertexId },
    #[error("surface is not connected")]
    Disconnected,
    #[error("no matrix given for edge ({a}, {b})")]
    MissingEdgeMatrix { a: VertexId, b: VertexId },
    #[error("matrix on edge ({a}, {b}) is singular")]
    SingularEdgeMatrix { a: VertexId, b: VertexId },
    #[error("matrices on ({a}, {b}) and ({b}, {a}) are not inverse")]
    InconsistentInverse { a: VertexId, b: VertexId },
    #[error("representation is not flat on triangle {triangle}")]
    FlatnessViolation { triangle: TriangleId },
    #[error("no gauge with nonzero coefficients found in {attempts} attempts")]
    UnremovableZeroCoefficient { attempts: usize },
    #[error("vertex {vertex} is not covered by the family")]
    UncoveredVertex { vertex: VertexId },
    #[error("frame vertices are not two distinct vertices of triangle {triangle}")]
    BadFrame { triangle: TriangleId },
}

/// Nonzero coefficients `b_{T,P}` on a family `𝒦` of triangles.
#[derive(Debug, Clone)]
pub struct DiscreteConnection<'a> {
    surface: &'a TriangulatedSurface,
    coeffs: Vec<[Rational; 3]>,
    family: BTreeSet<TriangleId>,
}

impl<'a> DiscreteConnection<'a> {
    /// `b ≡ 1` on every triangle.
    pub fn canonical(surface: &'a TriangulatedSurface) -> Self {
        let one = Rational::one();
        DiscreteConnection {
            surface,
            coeffs: vec![[one.clone(), one.clone(), one]; surface.triangle_count()],
            family: (0..surface.triangle_count()).collect(),
        }
    }

    /// Coefficients indexed by the local position in each stored triple.
    pub fn new(surface: &'a TriangulatedSurface, coeffs: Vec<[Rational; 3]>) -> Result<Self, ConnectionError> {
        assert_eq!(coeffs.len(), surface.triangle_count(), "one coefficient triple per triangle");
        for (t, c) in coeffs.iter().enumerate() {
            if let Some(local) = c.iter().position(Zero::is_zero) {
                return Err(ConnectionError::ZeroCoefficient { triangle: t, local });
            }
        }
        Ok(DiscreteConnection { surface, coeffs, family: (0..surface.triangle_count()).collect() })
    }

    /// Restrict the operator to a sub-family of triangles.
    pub fn with_family(mut self, family: impl IntoIterator<Item = TriangleId>) -> Result<Self, ConnectionError> {
        self.family = family.into_iter().filter(|&t| t < self.surface.triangle_count()).collect();
        let mut covered = vec![false; self.surface.vertex_count()];
        for &t in &self.family {
            for v in self.surface.triangle(t) {
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(ConnectionError::UncoveredVertex { vertex: v });
        }
        Ok(self)
    }

    pub fn surface(&self) -> &'a TriangulatedSurface {
        self.surface
    }

    pub fn family(&self) -> &BTreeSet<TriangleId> {
        &self.family
    }

    pub fn is_full_family(&self) -> bool {
        self.family.len() == self.surface.triangle_count()
    }

    pub fn is_canonical(&self) -> bool {
        self.coeffs.iter().flatten().all(One::is_one)
    }

    pub fn coefficients(&self, t: TriangleId) -> &[Rational; 3] {
        &self.coeffs[t]
    }

    /// `b_{T,P}`.
    pub fn b(&self, t: TriangleId, p: VertexId) -> &Rational {
        let i = self.surface.local_index(t, p).expect("vertex of triangle");
        &self.coeffs[t][i]
    }

    /// `Q^𝒦` as a dense matrix: one row per family triangle (in index
    /// order), one column per vertex.
    pub fn operator_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.family.len(), self.surface.vertex_count());
        for (r, &t) in self.family.iter().enumerate() {
            for (i, &v) in self.surface.triangle(t).iter().enumerate() {
                m[(r, v)] = self.coeffs[t][i].clone();
            }
        }
        m
    }

    /// `(Qψ)_T` for every family triangle.
    pub fn apply(&self, psi: &[Rational]) -> Vec<Rational> {
        self.family
            .iter()
            .map(|&t| {
                let tri = self.surface.triangle(t);
                (0..3).map(|i| &self.coeffs[t][i] * &psi[tri[i]]).sum()
            })
            .collect()
    }
}

/// `(k′_P, k″_P)` with `K_P = [[1, k′], [0, k″]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalHolonomy {
    #[serde(serialize_with = "crate::scalar::ser_rational")]
    pub k1: Rational,
    #[serde(serialize_with = "crate::scalar::ser_rational")]
    pub k2: Rational,
}

impl LocalHolonomy {
    pub fn is_trivial(&self) -> bool {
        self.k1.is_zero() && self.k2.is_one()
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(Rational::one(), self.k1.clone(), Rational::zero(), self.k2.clone())
    }
}

fn interior_star<'s>(surface: &'s TriangulatedSurface, p: VertexId) -> Result<&'s crate::mesh::Star, ConnectionError> {
    let star = surface.star(p);
    if !star.closed {
        return Err(ConnectionError::BoundaryVertex { vertex: p });
    }
    Ok(star)
}

/// Closed-form curvature at an interior vertex with star `T₁,…,T_n`,
/// `T_i = ⟨P, P_i, P_{i+1}⟩`:
///
/// `k″ = (−1)ⁿ Π b_{T_i,P_i} / Π b_{T_i,P_{i+1}}`,
/// `k′ = Σ_{k<n} (−1)^{k+1} b_{T_{n−k},P} Π_{j>n−k} b_{T_j,P_j} / Π_{j≥n−k} b_{T_j,P_{j+1}}`.
pub fn local_holonomy(conn: &DiscreteConnection<'_>, p: VertexId) -> Result<LocalHolonomy, ConnectionError> {
    let surface = conn.surface;
    let star = interior_star(surface, p)?;
    let n = star.valence();
    let b_p = |i: usize| conn.b(star.triangle_at(i), p);
    let b_in = |i: usize| conn.b(star.triangle_at(i), star.rim_at(i));
    let b_out = |i: usize| conn.b(star.triangle_at(i), star.rim_at(i + 1));

    let mut k2 = Rational::one();
    for i in 1..=n {
        k2 = k2 * b_in(i) / b_out(i);
    }
    if n % 2 == 1 {
        k2 = -k2;
    }

    let mut k1 = Rational::zero();
    // Running ratio Π_{j>n−k} b_{T_j,P_j} / b_{T_j,P_{j+1}}.
    let mut tail = Rational::one();
    for k in 0..n {
        let i = n - k;
        let term = b_p(i) / b_out(i) * &tail;
        if k % 2 == 0 {
            k1 -= term;
        } else {
            k1 += term;
        }
        tail = tail * b_in(i) / b_out(i);
    }
    Ok(LocalHolonomy { k1, k2 })
}

/// `M_i = [[1, −b_{T_i,P}/b_{T_i,P_{i+1}}], [0, −b_{T_i,P_i}/b_{T_i,P_{i+1}}]]`.
pub fn star_step_matrix(conn: &DiscreteConnection<'_>, p: VertexId, i: usize) -> Result<Mat2, ConnectionError> {
    let star = interior_star(conn.surface, p)?;
    let t = star.triangle_at(i);
    let out = conn.b(t, star.rim_at(i + 1));
    Ok(Mat2::new(
        Rational::one(),
        -(conn.b(t, p) / out),
        Rational::zero(),
        -(conn.b(t, star.rim_at(i)) / out),
    ))
}

/// `K_P = M₁ ⋯ M_n`.
pub fn local_holonomy_matrix(conn: &DiscreteConnection<'_>, p: VertexId) -> Result<Mat2, ConnectionError> {
    let n = interior_star(conn.surface, p)?.valence();
    let mut k = Mat2::identity();
    for i in 1..=n {
        k = &k * &star_step_matrix(conn, p, i)?;
    }
    Ok(k)
}

/// First interior vertex with nontrivial curvature.
pub fn check_curvature(conn: &DiscreteConnection<'_>) -> Result<(), ConnectionError> {
    check_curvature_with(Exec::default(), conn)
}

pub fn check_curvature_with(exec: Exec, conn: &DiscreteConnection<'_>) -> Result<(), ConnectionError> {
    let interior = conn.surface.interior_vertices();
    let bad = par::find_map_first(exec, &interior, |&v| match local_holonomy(conn, v) {
        Ok(h) if h.is_trivial() => None,
        _ => Some(v),
    });
    match bad {
        Some(vertex) => Err(ConnectionError::NonzeroCurvature { vertex }),
        None => Ok(()),
    }
}

/// Values of a solution on each triangle of a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transport {
    pub values: Vec<[(VertexId, Rational); 3]>,
    /// `R_γ` in the frame `(P, P′₁)` when the path is a loop.
    pub holonomy: Option<Mat2>,
}

fn propagate(
    conn: &DiscreteConnection<'_>,
    path: &ThickPath,
    start: [(VertexId, Rational); 3],
) -> Result<Vec<[(VertexId, Rational); 3]>, ConnectionError> {
    let s = conn.surface;
    let mut out = Vec::with_capacity(path.triangles().len());
    let mut state = start;
    out.push(state.clone());
    for w in path.triangles().windows(2) {
        let next = w[1];
        if !conn.family.contains(&next) {
            return Err(ConnectionError::ZeroDivisor { triangle: next });
        }
        let e = s.shared_edge(w[0], next).ok_or(MeshError::NotAdjacent { first: w[0], second: next })?;
        let x = s.third_vertex(next, e);
        let kept: Vec<(VertexId, Rational)> = state.iter().filter(|(v, _)| e.contains(*v)).cloned().collect();
        let sum: Rational = kept.iter().map(|(v, val)| conn.b(next, *v) * val).sum();
        let vx = -(sum / conn.b(next, x));
        state = [kept[0].clone(), kept[1].clone(), (x, vx)];
        out.push(state.clone());
    }
    Ok(out)
}

fn frame_of(conn: &DiscreteConnection<'_>, path: &ThickPath) -> Result<(VertexId, VertexId, VertexId), ConnectionError> {
    let edges = path.shared_edges(conn.surface)?;
    let first = edges.first().ok_or(ConnectionError::PathTooShort)?;
    Ok((first.opposite, first.first, first.second))
}

/// Extend a solution given on `T₁` at `(P, P′₁, P″₁)` along the path.
pub fn transport(
    conn: &DiscreteConnection<'_>,
    path: &ThickPath,
    seed: [Rational; 3],
) -> Result<Transport, ConnectionError> {
    path.validate(conn.surface)?;
    let (p, p1, p2) = frame_of(conn, path)?;
    let t1 = path.first();
    if !conn.family.contains(&t1) {
        return Err(ConnectionError::ZeroDivisor { triangle: t1 });
    }
    let check = conn.b(t1, p) * &seed[0] + conn.b(t1, p1) * &seed[1] + conn.b(t1, p2) * &seed[2];
    if !check.is_zero() {
        return Err(ConnectionError::SeedViolation);
    }
    let [a, b, c] = seed;
    let values = propagate(conn, path, [(p, a), (p1, b), (p2, c)])?;
    let holonomy = if path.is_loop() { Some(holonomy_in_frame(conn, path, (p, p1))?) } else { None };
    Ok(Transport { values, holonomy })
}

/// `R_γ` in the frame `(P, P′₁)` of the loop's first shared edge.
pub fn holonomy_matrix(conn: &DiscreteConnection<'_>, path: &ThickPath) -> Result<Mat2, ConnectionError> {
    let (p, p1, _) = frame_of(conn, path)?;
    holonomy_in_frame(conn, path, (p, p1))
}

/// `R_γ` acting on `(ψ_x, ψ_y)` for two vertices `x, y` of `T₁`:
/// `(ψ̃_x, ψ̃_y) = (ψ_x, ψ_y)·R_γ`.
pub fn holonomy_in_frame(
    conn: &DiscreteConnection<'_>,
    path: &ThickPath,
    frame: (VertexId, VertexId),
) -> Result<Mat2, ConnectionError> {
    if !path.is_loop() {
        return Err(MeshError::NotALoop.into());
    }
    path.validate(conn.surface)?;
    let t1 = path.first();
    let tri = conn.surface.triangle(t1);
    let (x, y) = frame;
    if x == y || !tri.contains(&x) || !tri.contains(&y) {
        return Err(ConnectionError::BadFrame { triangle: t1 });
    }
    let z = *tri.iter().find(|&&v| v != x && v != y).expect("third vertex");
    let mut rows = Vec::with_capacity(2);
    for (vx, vy) in [(Rational::one(), Rational::zero()), (Rational::zero(), Rational::one())] {
        let vz = -((conn.b(t1, x) * &vx + conn.b(t1, y) * &vy) / conn.b(t1, z));
        let values = propagate(conn, path, [(x, vx), (y, vy), (z, vz)])?;
        let last = values.last().expect("nonempty");
        let read = |v: VertexId| last.iter().find(|(u, _)| *u == v).expect("back on T1").1.clone();
        rows.push([read(x), read(y)]);
    }
    let [r0, r1] = [rows[0].clone(), rows[1].clone()];
    Ok(Mat2([r0, r1]))
}

/// Isomorphism type of a finite holonomy group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    Trivial,
    Z2,
    Z3,
    S3,
    /// Any other group, including infinite ones.
    Other,
}

impl GroupTag {
    pub fn name(self) -> &'static str {
        match self {
            GroupTag::Trivial => "trivial",
            GroupTag::Z2 => "Z2",
            GroupTag::Z3 => "Z3",
            GroupTag::S3 => "S3",
            GroupTag::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyClassification {
    pub group: GroupTag,
    /// Group order, when at most [`GROUP_CLOSURE_CAP`].
    pub order: Option<usize>,
    pub base_triangle: TriangleId,
    /// Frame `(v₀, v₁)` of the base triangle in which matrices act.
    pub frame: (VertexId, VertexId),
    #[serde(skip)]
    pub generators: Vec<ThickPath>,
    pub matrices: Vec<Mat2>,
    /// `ρ₁(γ) = sign det R_γ` per generator.
    pub parity: Vec<i8>,
    /// Color permutations of the generators, for the canonical connection.
    pub permutations: Option<Vec<Perm3>>,
    /// Dimension of the vectors fixed by every generator.
    pub invariant_dimension: usize,
    /// A basis of those vectors, in the frame.
    #[serde(skip)]
    pub invariant_basis: Vec<[Rational; 2]>,
}

pub const GROUP_CLOSURE_CAP: usize = 64;

/// Close a finite set of generators under multiplication, giving up past
/// `cap` elements.
pub fn group_closure(generators: &[Mat2], cap: usize) -> Option<BTreeSet<Mat2>> {
    let mut set: BTreeSet<Mat2> = BTreeSet::from([Mat2::identity()]);
    let mut queue: VecDeque<Mat2> = VecDeque::from([Mat2::identity()]);
    while let Some(g) = queue.pop_front() {
        for h in generators {
            let gh = &g * h;
            if set.insert(gh.clone()) {
                if set.len() > cap {
                    return None;
                }
                queue.push_back(gh);
            }
        }
    }
    Some(set)
}

pub fn tag_group(elements: Option<&BTreeSet<Mat2>>) -> GroupTag {
    let Some(g) = elements else { return GroupTag::Other };
    let abelian = g.iter().all(|a| g.iter().all(|b| a * b == b * a));
    match (g.len(), abelian) {
        (1, _) => GroupTag::Trivial,
        (2, _) => GroupTag::Z2,
        (3, _) => GroupTag::Z3,
        (6, false) => GroupTag::S3,
        _ => GroupTag::Other,
    }
}

/// Vectors `v` (row, in the frame) with `v·R = v` for every matrix.
pub fn invariant_vectors(matrices: &[Mat2]) -> Vec<[Rational; 2]> {
    if matrices.is_empty() {
        return vec![[Rational::one(), Rational::zero()], [Rational::zero(), Rational::one()]];
    }
    // v (R − I) = 0  ⇔  (R − I)ᵀ vᵀ = 0
    let rows: Vec<Vec<Rational>> = matrices
        .iter()
        .flat_map(|r| {
            let m = &r.0;
            [
                vec![&m[0][0] - rat(1), m[1][0].clone()],
                vec![m[0][1].clone(), &m[1][1] - rat(1)],
            ]
        })
        .collect();
    Matrix::from_rows(rows).null_space().into_iter().map(|v| [v[0].clone(), v[1].clone()]).collect()
}

/// Holonomy group of a flat connection from generators of `π₁` based at
/// triangle 0 (one per dual edge outside a BFS spanning tree).
pub fn classify_holonomy(conn: &DiscreteConnection<'_>) -> Result<HolonomyClassification, ConnectionError> {
    classify_holonomy_with(Exec::default(), conn)
}

pub fn classify_holonomy_with(exec: Exec, conn: &DiscreteConnection<'_>) -> Result<HolonomyClassification, ConnectionError> {
    let s = conn.surface;
    if !s.is_connected() {
        return Err(ConnectionError::Disconnected);
    }
    check_curvature_with(exec, conn)?;
    let tri = s.triangle(0);
    let frame = (tri[0], tri[1]);
    let generators = s.fundamental_loops();
    let matrices: Vec<Mat2> = par::map(exec, &generators, |g| holonomy_in_frame(conn, g, frame))
        .into_iter()
        .collect::<Result<_, _>>()?;
    let closure = group_closure(&matrices, GROUP_CLOSURE_CAP);
    let group = tag_group(closure.as_ref());
    let parity = matrices.iter().map(|m| if m.det().is_positive() { 1 } else { -1 }).collect();
    let permutations = if conn.is_canonical() {
        Some(generators.iter().map(|g| loop_color_permutation(s, g)).collect::<Result<_, _>>()?)
    } else {
        None
    };
    let invariant_basis = invariant_vectors(&matrices);
    Ok(HolonomyClassification {
        group,
        order: closure.map(|c| c.len()),
        base_triangle: 0,
        frame,
        generators,
        matrices,
        parity,
        permutations,
        invariant_dimension: invariant_basis.len(),
        invariant_basis,
    })
}

/// Extend `(ψ_{v₀}, ψ_{v₁})` on triangle 0 to every vertex by propagating
/// over a BFS spanning tree of the dual graph. Returns `None` if some
/// triangle equation then fails.
pub fn propagate_global(conn: &DiscreteConnection<'_>, seed: &[Rational; 2]) -> Option<Vec<Rational>> {
    let s = conn.surface;
    let mut psi: Vec<Option<Rational>> = vec![None; s.vertex_count()];
    let t0 = s.triangle(0);
    psi[t0[0]] = Some(seed[0].clone());
    psi[t0[1]] = Some(seed[1].clone());
    let c = conn.coefficients(0);
    psi[t0[2]] = Some(-((&c[0] * &seed[0] + &c[1] * &seed[1]) / &c[2]));
    let (_, order) = s.dual_spanning_tree();
    for &t in &order[1..] {
        let tri = s.triangle(t);
        let unknown: Vec<usize> = (0..3).filter(|&i| psi[tri[i]].is_none()).collect();
        if let [i] = unknown[..] {
            let c = conn.coefficients(t);
            let sum: Rational = (0..3).filter(|&j| j != i).map(|j| &c[j] * psi[tri[j]].as_ref().expect("known")).sum();
            psi[tri[i]] = Some(-(sum / &c[i]));
        }
    }
    let psi: Vec<Rational> = psi.into_iter().collect::<Option<_>>()?;
    conn.apply(&psi).iter().all(Zero::is_zero).then_some(psi)
}

/// Coefficients `(b_{P₁}, b_{P₂}, b_{P₃})` of the triangle `⟨P₁,P₂,P₃⟩` for
/// a flat representation, with `c_ij = (R_{PᵢPⱼ})₂₁`, `d_ij = det R_{PᵢPⱼ}`:
/// `b_{P₁} = c₂₃`, `b_{P₂} = c₃₁d₂₃`, `b_{P₃} = c₁₂d₂₁`.
///
/// Sections are row vectors with `v_{P′} = v_P R_{PP′}`; `ψ_P` is the first
/// coordinate of `v_P`.
pub fn coefficients_from_matrices(r12: &Mat2, r23: &Mat2, r31: &Mat2) -> Option<[Rational; 3]> {
    let r21 = r12.inverse()?;
    let c = |m: &Mat2| m.0[1][0].clone();
    Some([c(r23), c(r31) * r23.det(), c(r12) * r21.det()])
}

/// A connection built from edge matrices, with the gauge that was used.
#[derive(Debug, Clone)]
pub struct RepresentationConnection<'a> {
    pub connection: DiscreteConnection<'a>,
    /// `C_P` per vertex; `R′_{PP′} = C_P⁻¹ R_{PP′} C_{P′}`.
    pub gauge: Vec<Mat2>,
    /// Attempt index (0-based) that produced nonzero coefficients.
    pub attempt: usize,
    /// `(P₀, P₀′)`, the first edge of triangle 0, on which `R′ = [[0,1],[1,0]]`.
    pub frame: (VertexId, VertexId),
}

pub const GAUGE_ATTEMPTS: usize = 32;

/// Entries of the random gauge matrices lie in `−B..=B`. A coefficient
/// vanishes with probability of order `1/B` per attempt, so `B` must be
/// large against the triangle count.
pub const GAUGE_ENTRY_BOUND: i64 = 10_000;

fn edge_matrix(
    given: &BTreeMap<(VertexId, VertexId), Mat2>,
    a: VertexId,
    b: VertexId,
) -> Result<Mat2, ConnectionError> {
    match (given.get(&(a, b)), given.get(&(b, a))) {
        (Some(m), Some(n)) => {
            if !(m * n).is_identity() {
                return Err(ConnectionError::InconsistentInverse { a: a.min(b), b: a.max(b) });
            }
            Ok(m.clone())
        }
        (Some(m), None) => {
            m.inverse().ok_or(ConnectionError::SingularEdgeMatrix { a, b })?;
            Ok(m.clone())
        }
        (None, Some(n)) => n.inverse().ok_or(ConnectionError::SingularEdgeMatrix { a: b, b: a }),
        (None, None) => Err(ConnectionError::MissingEdgeMatrix { a: a.min(b), b: a.max(b) }),
    }
}

fn random_invertible(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let mut e = || rat(rng.random_range(-GAUGE_ENTRY_BOUND..=GAUGE_ENTRY_BOUND));
        let m = Mat2::new(e(), e(), e(), e());
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Synthesize a flat discrete connection whose holonomy reproduces the
/// given representation. Matrices are keyed by oriented edge; a missing
/// direction is the inverse of the given one.
pub fn connection_from_representation<'a>(
    surface: &'a TriangulatedSurface,
    edges: &BTreeMap<(VertexId, VertexId), Mat2>,
    seed: u64,
) -> Result<RepresentationConnection<'a>, ConnectionError> {
    let mut r: BTreeMap<(VertexId, VertexId), Mat2> = BTreeMap::new();
    for (e, _) in surface.edges() {
        let m = edge_matrix(edges, e.a, e.b)?;
        let inv = m.inverse().expect("checked invertible");
        r.insert((e.a, e.b), m);
        r.insert((e.b, e.a), inv);
    }
    for (t, tri) in surface.triangles().iter().enumerate() {
        let [p1, p2, p3] = *tri;
        if &r[&(p1, p2)] * &r[&(p2, p3)] != r[&(p1, p3)] {
            return Err(ConnectionError::FlatnessViolation { triangle: t });
        }
    }
    let t0 = surface.triangle(0);
    let (p0, p0p) = (t0[0], t0[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..GAUGE_ATTEMPTS {
        let mut gauge: Vec<Mat2> = (0..surface.vertex_count())
            .map(|_| if attempt == 0 { Mat2::identity() } else { random_invertible(&mut rng) })
            .collect();
        gauge[p0] = Mat2::identity();
        gauge[p0p] = &r[&(p0, p0p)].inverse().expect("invertible") * &Mat2::swap();
        let inv: Vec<Mat2> = gauge.iter().map(|c| c.inverse().expect("invertible gauge")).collect();
        let rr = |a: VertexId, b: VertexId| &(&inv[a] * &r[&(a, b)]) * &gauge[b];
        let mut coeffs = Vec::with_capacity(surface.triangle_count());
        let mut ok = true;
        for tri in surface.triangles() {
            let [p1, p2, p3] = *tri;
            let b = coefficients_from_matrices(&rr(p1, p2), &rr(p2, p3), &rr(p3, p1)).expect("invertible");
            if b.iter().any(Zero::is_zero) {
                ok = false;
                break;
            }
            coeffs.push(b);
        }
        if ok {
            let connection = DiscreteConnection::new(surface, coeffs)?;
            return Ok(RepresentationConnection { connection, gauge, attempt, frame: (p0, p0p) });
        }
    }
    Err(ConnectionError::UnremovableZeroCoefficient { attempts: GAUGE_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::frac;

    #[test]
    fn canonical_even_valence_is_flat() {
        let s = fixtures::octahedron();
        let c = DiscreteConnection::canonical(&s);
        for v in 0..6 {
            assert_eq!(local_holonomy(&c, v).unwrap(), LocalHolonomy { k1: rat(0), k2: rat(1) });
        }
    }

    #[test]
    fn canonical_valence_three() {
        // Tetrahedron boundary: every vertex has valence 3.
        let s = TriangulatedSurface::new(&[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]).unwrap();
        let c = DiscreteConnection::canonical(&s);
        let h = local_holonomy(&c, 0).unwrap();
        assert_eq!(h, LocalHolonomy { k1: rat(-1), k2: rat(-1) });
        assert_eq!(local_holonomy_matrix(&c, 0).unwrap(), Mat2::from_ints(1, -1, 0, -1));
    }

    #[test]
    fn k_prime_needs_rim_numerators() {
        // Taking b_{T_j,P} throughout the numerator of k′ breaks agreement
        // with the step matrices once the coefficients are generic.
        let s = fixtures::octahedron();
        let coeffs = (0..s.triangle_count() as i64).map(|t| [frac(t + 2, 1), frac(3, t + 1), frac(t + 5, 2)]).collect();
        let c = DiscreteConnection::new(&s, coeffs).unwrap();
        let star = interior_star(&s, 0).unwrap();
        let n = star.valence();
        let b = |i: usize, v: VertexId| c.b(star.triangle_at(i), v).clone();
        let mut naive = Rational::zero();
        for k in 0..n {
            let (mut num, mut den) = (Rational::one(), Rational::one());
            for j in n - k..=n {
                num *= b(j, 0);
                den *= b(j, star.rim_at(j + 1));
            }
            let term = num / den;
            if k % 2 == 0 {
                naive -= term;
            } else {
                naive += term;
            }
        }
        let m = local_holonomy_matrix(&c, 0).unwrap();
        assert_eq!(local_holonomy(&c, 0).unwrap().k1, m.0[0][1]);
        assert_ne!(naive, m.0[0][1]);
    }

    #[test]
    fn boundary_vertex_rejected() {
        let s = fixtures::hexagon_patch(1);
        let c = DiscreteConnection::canonical(s.surface());
        let b = s.vertex_at(crate::lattice::Site::new(1, 0)).unwrap();
        assert_eq!(local_holonomy(&c, b), Err(ConnectionError::BoundaryVertex { vertex: b }));
    }

    #[test]
    fn backtrack_is_identity() {
        let s = fixtures::octahedron();
        let c = DiscreteConnection::new(
            &s,
            (0..8).map(|t| [rat(t + 1), frac(2, 3), rat(-3 - t)]).collect(),
        )
        .unwrap();
        let nb = s.adjacent_triangles(0)[1];
        let l = ThickPath::new(&s, vec![0, nb, 0]).unwrap();
        assert!(holonomy_matrix(&c, &l).unwrap().is_identity());
    }

    #[test]
    fn seed_checked() {
        let s = fixtures::octahedron();
        let c = DiscreteConnection::canonical(&s);
        let l = ThickPath::star_loop(&s, 0).unwrap();
        assert_eq!(transport(&c, &l, [rat(1), rat(1), rat(1)]).unwrap_err(), ConnectionError::SeedViolation);
        let t = transport(&c, &l, [rat(1), rat(1), rat(-2)]).unwrap();
        assert!(t.holonomy.unwrap().is_identity());
        assert_eq!(t.values.len(), 5);
    }

    #[test]
    fn torus_strip_is_order_three() {
        let s = fixtures::torus(4);
        let c = DiscreteConnection::canonical(&s);
        let l = fixtures::torus_strip_from_white(4);
        let r = holonomy_matrix(&c, &l).unwrap();
        assert_eq!(r, &Mat2::from_ints(-1, 0, -1, 1) * &Mat2::swap());
        assert!(r.pow(3).is_identity() && !r.is_identity());
    }

    #[test]
    fn classification_of_fixtures() {
        let oct = fixtures::octahedron();
        let h = classify_holonomy(&DiscreteConnection::canonical(&oct)).unwrap();
        assert_eq!((h.group, h.invariant_dimension), (GroupTag::Trivial, 2));
        let t3 = fixtures::torus(3);
        let h = classify_holonomy(&DiscreteConnection::canonical(&t3)).unwrap();
        assert_eq!((h.group, h.invariant_dimension), (GroupTag::Trivial, 2));
        let t4 = fixtures::torus(4);
        let h = classify_holonomy(&DiscreteConnection::canonical(&t4)).unwrap();
        assert_eq!((h.group, h.invariant_dimension), (GroupTag::Z3, 0));
        let ico = fixtures::icosahedron();
        assert!(matches!(
            classify_holonomy(&DiscreteConnection::canonical(&ico)),
            Err(ConnectionError::NonzeroCurvature { .. })
        ));
    }

    #[test]
    fn single_triangle_coefficients() {
        let r12 = Mat2::from_ints(1, 2, 3, 4);
        let r23 = Mat2::from_ints(2, 1, 1, 1);
        let r31 = (&r12 * &r23).inverse().unwrap();
        let b = coefficients_from_matrices(&r12, &r23, &r31).unwrap();
        assert_eq!(b[0], r23.0[1][0]);
        // Every flat section gives a solution.
        for v in [[rat(1), rat(0)], [rat(0), rat(1)]] {
            let v2 = r12.apply_row(&v);
            let v3 = r23.apply_row(&v2);
            let s = &b[0] * &v[0] + &b[1] * &v2[0] + &b[2] * &v3[0];
            assert!(s.is_zero());
        }
    }

    #[test]
    fn identity_representation_is_trivial() {
        let s = fixtures::octahedron();
        let edges: BTreeMap<(VertexId, VertexId), Mat2> =
            s.edges().map(|(e, _)| ((e.a, e.b), Mat2::identity())).collect();
        let rc = connection_from_representation(&s, &edges, 0).unwrap();
        let h = classify_holonomy(&rc.connection).unwrap();
        assert_eq!(h.group, GroupTag::Trivial);
        assert_eq!(h.invariant_dimension, 2);
    }

    #[test]
    fn non_flat_representation_rejected() {
        let s = fixtures::octahedron();
        let mut edges: BTreeMap<(VertexId, VertexId), Mat2> =
            s.edges().map(|(e, _)| ((e.a, e.b), Mat2::identity())).collect();
        edges.insert((0, 1), Mat2::from_ints(2, 0, 0, 1));
        assert!(matches!(
            connection_from_representation(&s, &edges, 0),
            Err(ConnectionError::FlatnessViolation { .. })
        ));
    }
}
