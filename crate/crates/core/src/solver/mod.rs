//! Global solutions of triangle equations: covariant constants, the
//! operator `L = Q⁺Q`, zero modes, the black-triangle boundary problem and
//! the maximum principle.

mod hull;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

pub use hull::{convex_hull, hull_contains, on_segment, orient, point_cmp, Point};

use crate::connection::{classify_holonomy, ConnectionError, DiscreteConnection, GroupTag, propagate_global};
use crate::linalg::{same_span, Matrix};
use crate::mesh::{
    bw_face_coloring, three_vertex_coloring, FaceColor, FaceColoring, MeshError, SubComplexDomain, TriangleId,
    TriangulatedSurface, VertexColoring, VertexId,
};
use crate::scalar::{frac, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("vertex {vertex} has odd valence")]
    OddValence { vertex: VertexId },
    #[error("holonomy of the domain is not trivial")]
    NonTrivialHolonomy,
    #[error("boundary values are inconsistent with the black triangle equations")]
    InconsistentBoundary,
    #[error("black triangle {triangle} does not sum to zero")]
    NotASolution { triangle: TriangleId },
    #[error("vertex {vertex} is not in the domain")]
    VertexNotInDomain { vertex: VertexId },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("propagated seed does not close up")]
    PropagationFailed,
}

/// Global solutions of `Qψ = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovariantConstantSpace {
    pub basis: Vec<Vec<Rational>>,
    pub group: GroupTag,
}

impl CovariantConstantSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Propagate every holonomy-invariant seed over the surface.
pub fn covariant_constants(conn: &DiscreteConnection<'_>) -> Result<CovariantConstantSpace, SolverError> {
    let class = classify_holonomy(conn)?;
    let basis = class
        .invariant_basis
        .iter()
        .map(|seed| propagate_global(conn, seed).ok_or(SolverError::PropagationFailed))
        .collect::<Result<_, _>>()?;
    Ok(CovariantConstantSpace { basis, group: class.group })
}

/// Null space of the full triangle system.
pub fn covariant_constants_by_nullspace(conn: &DiscreteConnection<'_>) -> Vec<Vec<Rational>> {
    conn.operator_matrix().null_space()
}

/// Symmetric sparse operator on vertex functions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseOperator {
    pub n: usize,
    pub entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseOperator {
    pub fn new(n: usize) -> Self {
        SparseOperator { n, entries: BTreeMap::new() }
    }

    pub fn add(&mut self, i: usize, j: usize, v: Rational) {
        let e = self.entries.entry((i, j)).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.range((i, 0)..(i + 1, 0)).map(|(&(_, j), v)| (j, v))
    }

    pub fn apply(&self, psi: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n];
        for (&(i, j), v) in &self.entries {
            out[i] += v * &psi[j];
        }
        out
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for (&(i, j), v) in &self.entries {
            m[(i, j)] = v.clone();
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|(&(i, j), v)| self.entries.get(&(j, i)) == Some(v))
    }

    /// Rows where `self` and `other` differ.
    pub fn mismatched_rows(&self, other: &SparseOperator, rows: impl IntoIterator<Item = usize>) -> Vec<usize> {
        rows.into_iter()
            .filter(|&i| {
                let a: Vec<(usize, &Rational)> = self.row(i).collect();
                let b: Vec<(usize, &Rational)> = other.row(i).collect();
                a != b
            })
            .collect()
    }
}

/// `L = Q⁺Q` over the connection's family.
pub fn assemble_l(conn: &DiscreteConnection<'_>) -> SparseOperator {
    let s = conn.surface();
    let mut l = SparseOperator::new(s.vertex_count());
    for &t in conn.family() {
        let tri = s.triangle(t);
        let b = conn.coefficients(t);
        for i in 0..3 {
            for j in 0..3 {
                l.add(tri[i], tri[j], &b[i] * &b[j]);
            }
        }
    }
    l
}

/// The graph Laplacian `Δ = δd = D − A` on the 1-skeleton.
pub fn graph_laplacian(surface: &TriangulatedSurface) -> SparseOperator {
    let mut d = SparseOperator::new(surface.vertex_count());
    for (e, _) in surface.edges() {
        d.add(e.a, e.a, rat(1));
        d.add(e.b, e.b, rat(1));
        d.add(e.a, e.b, rat(-1));
        d.add(e.b, e.a, rat(-1));
    }
    d
}

/// `n_P`: the number of triangles at each vertex.
pub fn potential(surface: &TriangulatedSurface) -> Vec<Rational> {
    let mut n = vec![Rational::zero(); surface.vertex_count()];
    for tri in surface.triangles() {
        for &v in tri {
            n[v] += rat(1);
        }
    }
    n
}

/// `α Δ + β n_P`.
pub fn laplacian_combination(surface: &TriangulatedSurface, alpha: &Rational, beta: &Rational) -> SparseOperator {
    let lap = graph_laplacian(surface);
    let mut out = SparseOperator::new(surface.vertex_count());
    for (&(i, j), v) in &lap.entries {
        out.add(i, j, alpha * v);
    }
    for (i, n) in potential(surface).into_iter().enumerate() {
        out.add(i, i, beta * n);
    }
    out
}

pub const SIGN_CONVENTION: &str = "Delta = delta d = D - A (positive semidefinite graph Laplacian); L = -2 Delta + 3 n_P";

/// Result of comparing `Q⁺Q` with its Laplacian forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LIdentityReport {
    pub sign_convention: &'static str,
    /// Rows compared: every vertex on a closed surface, interior vertices
    /// otherwise.
    pub rows_checked: Vec<VertexId>,
    pub l_mismatches: Vec<VertexId>,
    /// `Q_b⁺Q_b = −Δ + (3/2)n_P` and the same for white, when a b/w
    /// coloring exists.
    pub black_mismatches: Option<Vec<VertexId>>,
    pub white_mismatches: Option<Vec<VertexId>>,
    /// `Δ_Γ² = Q_wbQ_wb⁺ ⊕ Q_wb⁺Q_wb` on the dual graph.
    pub dual_block_identity: Option<bool>,
}

impl LIdentityReport {
    pub fn holds(&self) -> bool {
        self.l_mismatches.is_empty()
            && self.black_mismatches.as_ref().is_none_or(Vec::is_empty)
            && self.white_mismatches.as_ref().is_none_or(Vec::is_empty)
            && self.dual_block_identity != Some(false)
    }
}

pub fn check_l_identity(surface: &TriangulatedSurface) -> Result<LIdentityReport, SolverError> {
    let rows = surface.interior_vertices();
    if let Some(&v) = rows.iter().find(|&&v| surface.valence(v) % 2 == 1) {
        return Err(SolverError::OddValence { vertex: v });
    }
    let conn = DiscreteConnection::canonical(surface);
    let l = assemble_l(&conn);
    let rhs = laplacian_combination(surface, &rat(-2), &rat(3));
    let l_mismatches = l.mismatched_rows(&rhs, rows.iter().copied());

    let coloring = bw_face_coloring(surface);
    let (black_mismatches, white_mismatches, dual_block_identity) = match &coloring {
        Some(c) => {
            let half = laplacian_combination(surface, &rat(-1), &frac(3, 2));
            let side = |color: FaceColor| -> Result<Vec<VertexId>, SolverError> {
                let q = DiscreteConnection::canonical(surface).with_family(c.of_color(color))?;
                Ok(assemble_l(&q).mismatched_rows(&half, rows.iter().copied()))
            };
            let b = side(FaceColor::Black)?;
            let w = side(FaceColor::White)?;
            (Some(b), Some(w), Some(dual_block_identity(surface, c)))
        }
        None => (None, None, None),
    };
    Ok(LIdentityReport {
        sign_convention: SIGN_CONVENTION,
        rows_checked: rows,
        l_mismatches,
        black_mismatches,
        white_mismatches,
        dual_block_identity,
    })
}

/// The `W×B` incidence block `Q_wb`: `1` where a white and a black
/// triangle share an edge.
pub fn q_wb(surface: &TriangulatedSurface, coloring: &FaceColoring) -> Matrix {
    let white = coloring.white();
    let black = coloring.black();
    let bi: BTreeMap<TriangleId, usize> = black.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut m = Matrix::zeros(white.len(), black.len());
    for (r, &w) in white.iter().enumerate() {
        for nb in surface.adjacent_triangles(w) {
            if let Some(&c) = bi.get(&nb) {
                m[(r, c)] = &m[(r, c)] + rat(1);
            }
        }
    }
    m
}

/// Adjacency of the dual graph `Γ`, white triangles first.
pub fn dual_adjacency(surface: &TriangulatedSurface, coloring: &FaceColoring) -> Matrix {
    let order: Vec<TriangleId> = coloring.white().into_iter().chain(coloring.black()).collect();
    let pos: BTreeMap<TriangleId, usize> = order.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut m = Matrix::zeros(order.len(), order.len());
    for (_, ts) in surface.edges() {
        if let [a, b] = ts[..] {
            let (i, j) = (pos[&a], pos[&b]);
            m[(i, j)] = &m[(i, j)] + rat(1);
            m[(j, i)] = &m[(j, i)] + rat(1);
        }
    }
    m
}

fn dual_block_identity(surface: &TriangulatedSurface, coloring: &FaceColoring) -> bool {
    let adj = dual_adjacency(surface, coloring);
    let sq = &adj * &adj;
    let q = q_wb(surface, coloring);
    let qt = q.transpose();
    let top = &q * &qt;
    let bottom = &qt * &q;
    let w = q.rows();
    let n = adj.rows();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let expect = match (i < w, j < w) {
                (true, true) => top[(i, j)].clone(),
                (false, false) => bottom[(i - w, j - w)].clone(),
                _ => Rational::zero(),
            };
            sq[(i, j)] == expect
        })
    })
}

/// Null space of `L`.
pub fn zero_modes(conn: &DiscreteConnection<'_>) -> Vec<Vec<Rational>> {
    assemble_l(conn).to_dense().null_space()
}

/// Solutions of the black triangle equations on a domain with some
/// vertex values fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwSolution {
    /// Domain vertices, ascending; the index for the vectors below.
    pub vertices: Vec<VertexId>,
    pub particular: Vec<Rational>,
    pub directions: Vec<Vec<Rational>>,
}

impl BwSolution {
    pub fn is_unique(&self) -> bool {
        self.directions.is_empty()
    }

    /// The particular solution as a full vertex vector (zero off the domain).
    pub fn to_vertex_function(&self, vertex_count: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); vertex_count];
        for (i, &v) in self.vertices.iter().enumerate() {
            out[v] = self.particular[i].clone();
        }
        out
    }
}

fn domain_vertex_coloring(domain: &SubComplexDomain<'_>) -> Result<VertexColoring, SolverError> {
    let (sub, _, _) = domain.sub_surface()?;
    if !sub.is_orientable() {
        return Err(SolverError::NonTrivialHolonomy);
    }
    three_vertex_coloring(domain).ok_or(SolverError::NonTrivialHolonomy)
}

fn black_system(domain: &SubComplexDomain<'_>, coloring: &FaceColoring, vertices: &[VertexId]) -> Matrix {
    let s = domain.surface();
    let index: BTreeMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let black: Vec<TriangleId> =
        domain.triangles().iter().copied().filter(|&t| coloring.color(t) == FaceColor::Black).collect();
    let mut m = Matrix::zeros(black.len(), vertices.len());
    for (r, &t) in black.iter().enumerate() {
        for v in s.triangle(t) {
            m[(r, index[&v])] = rat(1);
        }
    }
    m
}

/// A vertex set whose values determine a black-equation solution,
/// chosen by eliminating interior vertices first so that the free
/// vertices lie on the boundary where possible.
pub fn determining_set(domain: &SubComplexDomain<'_>, coloring: &FaceColoring) -> Vec<VertexId> {
    let vertices: Vec<VertexId> = domain.vertices().into_iter().collect();
    let m = black_system(domain, coloring, &vertices);
    let boundary = domain.boundary_vertices();
    let order: Vec<usize> = (0..vertices.len())
        .filter(|&i| !boundary.contains(&vertices[i]))
        .chain((0..vertices.len()).filter(|&i| boundary.contains(&vertices[i])))
        .collect();
    let pivots = m.clone().rref_with_order(&order);
    let mut free: Vec<VertexId> = order.iter().filter(|c| !pivots.contains(c)).map(|&c| vertices[c]).collect();
    free.sort_unstable();
    free
}

/// Solve `Σ_{P∈T} ψ_P = 0` over the black triangles of the domain with
/// the given vertex values fixed.
pub fn solve_bw(
    domain: &SubComplexDomain<'_>,
    coloring: &FaceColoring,
    boundary: &BTreeMap<VertexId, Rational>,
) -> Result<BwSolution, SolverError> {
    domain_vertex_coloring(domain)?;
    let vertices: Vec<VertexId> = domain.vertices().into_iter().collect();
    let index: BTreeMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if let Some(&v) = boundary.keys().find(|v| !index.contains_key(v)) {
        return Err(SolverError::VertexNotInDomain { vertex: v });
    }
    let full = black_system(domain, coloring, &vertices);
    let unknown: Vec<usize> = (0..vertices.len()).filter(|i| !boundary.contains_key(&vertices[*i])).collect();
    let mut a = Matrix::zeros(full.rows(), unknown.len());
    let mut rhs = vec![Rational::zero(); full.rows()];
    for r in 0..full.rows() {
        for (c, &u) in unknown.iter().enumerate() {
            a[(r, c)] = full[(r, u)].clone();
        }
        for (v, val) in boundary {
            rhs[r] -= &full[(r, index[v])] * val;
        }
    }
    let sol = a.solve(&rhs).ok_or(SolverError::InconsistentBoundary)?;
    let mut particular = vec![Rational::zero(); vertices.len()];
    for (v, val) in boundary {
        particular[index[v]] = val.clone();
    }
    for (c, &u) in unknown.iter().enumerate() {
        particular[u] = sol.particular[c].clone();
    }
    let directions = sol
        .directions
        .iter()
        .map(|d| {
            let mut full_d = vec![Rational::zero(); vertices.len()];
            for (c, &u) in unknown.iter().enumerate() {
                full_d[u] = d[c].clone();
            }
            full_d
        })
        .collect();
    Ok(BwSolution { vertices, particular, directions })
}

/// `ψ̂` and hull data for one solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxPrincipleReport {
    /// `(T, ψ̂(T) = (ψ_a, ψ_b))` for every black domain triangle.
    pub images: Vec<(TriangleId, Point)>,
    /// Black triangles of `∂₋M′`.
    pub boundary_triangles: Vec<TriangleId>,
    /// Corners of the hull of the boundary images.
    pub boundary_hull: Vec<Point>,
    /// Corners of the hull of all images.
    pub hull: Vec<Point>,
    /// Corners of `hull` that no boundary triangle maps to.
    pub interior_corners: Vec<Point>,
    /// Black triangles whose image leaves the boundary hull.
    pub violations: Vec<TriangleId>,
    /// Internal black triangles not between any of their three
    /// distance-2 neighbour pairs.
    pub betweenness_failures: Vec<TriangleId>,
    /// Internal black triangles whose neighbour pair coincides at some
    /// vertex (valence 4).
    pub coincident_pairs: Vec<TriangleId>,
}

impl MaxPrincipleReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.interior_corners.is_empty() && self.betweenness_failures.is_empty()
    }

    pub fn is_point_hull(&self) -> bool {
        self.hull.len() <= 1
    }
}

/// Check `ψ̂(𝒦) ⊂ conv ψ̂(∂₋M′ ∩ 𝒦)` for a solution `ψ` (one value per
/// surface vertex) of the black equations.
pub fn max_principle_check(
    domain: &SubComplexDomain<'_>,
    coloring: &FaceColoring,
    psi: &[Rational],
) -> Result<MaxPrincipleReport, SolverError> {
    let s = domain.surface();
    if psi.len() != s.vertex_count() {
        return Err(SolverError::LengthMismatch { expected: s.vertex_count(), got: psi.len() });
    }
    let colors = domain_vertex_coloring(domain)?;
    let black: Vec<TriangleId> =
        domain.triangles().iter().copied().filter(|&t| coloring.color(t) == FaceColor::Black).collect();
    for &t in &black {
        let sum: Rational = s.triangle(t).iter().map(|&v| &psi[v]).sum();
        if !sum.is_zero() {
            return Err(SolverError::NotASolution { triangle: t });
        }
    }
    let image = |t: TriangleId| -> Point {
        let a = colors.vertex_of_color(s, t, 0);
        let b = colors.vertex_of_color(s, t, 1);
        [psi[a].clone(), psi[b].clone()]
    };
    let images: Vec<(TriangleId, Point)> = black.iter().map(|&t| (t, image(t))).collect();
    let img: BTreeMap<TriangleId, Point> = images.iter().cloned().collect();
    let inner = domain.inner_boundary();
    let boundary_triangles: Vec<TriangleId> = black.iter().copied().filter(|t| inner.contains(t)).collect();
    let bpts: Vec<Point> = boundary_triangles.iter().map(|t| img[t].clone()).collect();
    let boundary_hull = convex_hull(&bpts);
    let all: Vec<Point> = images.iter().map(|(_, p)| p.clone()).collect();
    let hull = convex_hull(&all);
    let bset: BTreeSet<&Point> = bpts.iter().collect();
    let interior_corners = hull.iter().filter(|c| !bset.contains(c)).cloned().collect();
    let violations = images.iter().filter(|(_, p)| !hull_contains(&boundary_hull, p)).map(|(t, _)| *t).collect();

    let mut betweenness_failures = Vec::new();
    let mut coincident_pairs = Vec::new();
    for &t in black.iter().filter(|t| !inner.contains(t)) {
        let mut between = false;
        let mut coincident = false;
        for v in s.triangle(t) {
            let star = s.star(v);
            let n = star.valence();
            let pos = (1..=n).find(|&i| star.triangle_at(i) == t).expect("t in star");
            let prev = star.triangle_at((pos + n - 3) % n + 1);
            let next = star.triangle_at((pos + 1) % n + 1);
            coincident |= prev == next;
            if let (Some(p), Some(q)) = (img.get(&prev), img.get(&next)) {
                between |= on_segment(p, q, &img[&t]);
            }
        }
        if !between {
            betweenness_failures.push(t);
        }
        if coincident {
            coincident_pairs.push(t);
        }
    }
    Ok(MaxPrincipleReport {
        images,
        boundary_triangles,
        boundary_hull,
        hull,
        interior_corners,
        violations,
        betweenness_failures,
        coincident_pairs,
    })
}

/// Check that two bases span the same subspace.
pub fn same_subspace(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    same_span(a, b)
}

/// Whether every vector in `basis` satisfies `Δψ = λψ`.
pub fn laplacian_eigen(surface: &TriangulatedSurface, basis: &[Vec<Rational>], lambda: &Rational) -> bool {
    let lap = graph_laplacian(surface);
    basis.iter().all(|v| lap.apply(v).iter().zip(v).all(|(a, b)| a == &(lambda * b)))
}
