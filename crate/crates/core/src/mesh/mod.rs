//! Triangulated surfaces: adjacency, vertex stars, thick paths, domains and
//! colorings.

mod coloring;
mod domain;
mod path;

pub use coloring::{
    bw_face_coloring, homomorphism_signs, loop_color_permutation, three_vertex_coloring,
    three_vertex_coloring_of, FaceColor, FaceColoring, Perm3, VertexColoring,
};
pub use domain::SubComplexDomain;
pub use path::{SharedEdge, ThickPath};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

pub type VertexId = usize;
pub type TriangleId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("no triangles given")]
    Empty,
    #[error("triangle {triangle} references vertex {vertex} but only {count} vertices exist")]
    VertexOutOfRange { triangle: TriangleId, vertex: VertexId, count: usize },
    #[error("triangle {triangle} has a repeated vertex")]
    DegenerateTriangle { triangle: TriangleId },
    #[error("triangles {first} and {second} have the same vertices")]
    DuplicateTriangle { first: TriangleId, second: TriangleId },
    #[error("edge ({a}, {b}) lies in {count} triangles")]
    NonManifoldEdge { a: VertexId, b: VertexId, count: usize },
    #[error("star of vertex {vertex} is not a single cycle or path")]
    BrokenStar { vertex: VertexId },
    #[error("vertex {vertex} lies in no triangle")]
    IsolatedVertex { vertex: VertexId },
    #[error("triangles {first} and {second} do not share an edge")]
    NotAdjacent { first: TriangleId, second: TriangleId },
    #[error("path is not closed")]
    NotALoop,
    #[error("path is empty")]
    EmptyPath,
    #[error("vertex {vertex} is not in triangle {triangle}")]
    NotInTriangle { vertex: VertexId, triangle: TriangleId },
    #[error("vertex {vertex} is on the boundary")]
    BoundaryVertex { vertex: VertexId },
    #[error("surface is not connected")]
    Disconnected,
}

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId) -> Self {
        if u < v {
            Edge { a: u, b: v }
        } else {
            Edge { a: v, b: u }
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.a == v || self.b == v
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// Cyclically ordered star of a vertex `P`.
///
/// `triangles[i] = ⟨P, rim[i], rim[i+1]⟩`. For an interior vertex the rim
/// closes up (`rim.len() == triangles.len()`, indices mod n); for a boundary
/// vertex `rim` has one more entry than `triangles`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub triangles: Vec<TriangleId>,
    pub rim: Vec<VertexId>,
    pub closed: bool,
}

impl Star {
    pub fn valence(&self) -> usize {
        self.triangles.len()
    }

    /// `P_i` with 1-based, cyclic indexing as in the holonomy formulas.
    pub fn rim_at(&self, i: usize) -> VertexId {
        self.rim[(i - 1) % self.rim.len()]
    }

    /// `T_i`, 1-based and cyclic.
    pub fn triangle_at(&self, i: usize) -> TriangleId {
        self.triangles[(i - 1) % self.triangles.len()]
    }
}

/// A finite two-dimensional simplicial manifold, possibly with boundary.
#[derive(Debug, Clone)]
pub struct TriangulatedSurface {
    vertex_count: usize,
    triangles: Vec<[VertexId; 3]>,
    edges: BTreeMap<Edge, Vec<TriangleId>>,
    stars: Vec<Star>,
}

impl TriangulatedSurface {
    /// Build from vertex triples. The vertex count is one more than the
    /// largest index used.
    pub fn new(triples: &[[VertexId; 3]]) -> Result<Self, MeshError> {
        let n = triples.iter().flatten().max().map_or(0, |m| m + 1);
        Self::with_vertex_count(n, triples)
    }

    pub fn with_vertex_count(
        vertex_count: usize,
        triples: &[[VertexId; 3]],
    ) -> Result<Self, MeshError> {
        if triples.is_empty() {
            return Err(MeshError::Empty);
        }
        let mut seen: BTreeMap<[VertexId; 3], TriangleId> = BTreeMap::new();
        for (t, tri) in triples.iter().enumerate() {
            for &v in tri {
                if v >= vertex_count {
                    return Err(MeshError::VertexOutOfRange { triangle: t, vertex: v, count: vertex_count });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            let mut key = *tri;
            key.sort_unstable();
            if let Some(&first) = seen.get(&key) {
                return Err(MeshError::DuplicateTriangle { first, second: t });
            }
            seen.insert(key, t);
        }

        let mut edges: BTreeMap<Edge, Vec<TriangleId>> = BTreeMap::new();
        for (t, tri) in triples.iter().enumerate() {
            for i in 0..3 {
                edges.entry(Edge::new(tri[i], tri[(i + 1) % 3])).or_default().push(t);
            }
        }
        if let Some((e, ts)) = edges.iter().find(|(_, ts)| ts.len() > 2) {
            return Err(MeshError::NonManifoldEdge { a: e.a, b: e.b, count: ts.len() });
        }

        let mut incident: Vec<Vec<TriangleId>> = vec![Vec::new(); vertex_count];
        for (t, tri) in triples.iter().enumerate() {
            for &v in tri {
                incident[v].push(t);
            }
        }
        if let Some(v) = incident.iter().position(Vec::is_empty) {
            return Err(MeshError::IsolatedVertex { vertex: v });
        }

        let mut surface = TriangulatedSurface {
            vertex_count,
            triangles: triples.to_vec(),
            edges,
            stars: Vec::with_capacity(vertex_count),
        };
        for v in 0..vertex_count {
            let star = surface.walk_star(v, &incident[v])?;
            surface.stars.push(star);
        }
        Ok(surface)
    }

    fn walk_star(&self, p: VertexId, incident: &[TriangleId]) -> Result<Star, MeshError> {
        // Start at a path end for boundary vertices, else at the lowest triangle.
        let boundary_start = incident
            .iter()
            .copied()
            .filter_map(|t| {
                let [u, w] = self.others(t, p);
                if self.is_boundary_edge(Edge::new(p, u)) {
                    Some((t, u, w))
                } else if self.is_boundary_edge(Edge::new(p, w)) {
                    Some((t, w, u))
                } else {
                    None
                }
            })
            .min_by_key(|&(t, u, _)| (t, u));
        let (start, first, second, closed) = match boundary_start {
            Some((t, u, w)) => (t, u, w, false),
            None => {
                let t = incident[0];
                let tri = self.triangles[t];
                let i = tri.iter().position(|&x| x == p).expect("incident");
                (t, tri[(i + 1) % 3], tri[(i + 2) % 3], true)
            }
        };

        let mut triangles = vec![start];
        let mut rim = vec![first, second];
        let mut current = start;
        loop {
            let last = *rim.last().expect("nonempty");
            let next = self.edges[&Edge::new(p, last)].iter().copied().find(|&t| t != current);
            match next {
                None => {
                    if closed {
                        return Err(MeshError::BrokenStar { vertex: p });
                    }
                    break;
                }
                Some(t) if t == start => {
                    if !closed {
                        return Err(MeshError::BrokenStar { vertex: p });
                    }
                    rim.pop();
                    break;
                }
                Some(t) => {
                    if triangles.contains(&t) {
                        return Err(MeshError::BrokenStar { vertex: p });
                    }
                    let [u, w] = self.others(t, p);
                    let third = if u == last { w } else { u };
                    triangles.push(t);
                    rim.push(third);
                    current = t;
                }
            }
        }
        if triangles.len() != incident.len() {
            return Err(MeshError::BrokenStar { vertex: p });
        }
        Ok(Star { triangles, rim, closed })
    }

    /// The two vertices of `t` other than `p`, in cyclic order after `p`.
    pub fn others(&self, t: TriangleId, p: VertexId) -> [VertexId; 2] {
        let tri = self.triangles[t];
        let i = tri.iter().position(|&x| x == p).expect("vertex in triangle");
        [tri[(i + 1) % 3], tri[(i + 2) % 3]]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangles(&self) -> &[[VertexId; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: TriangleId) -> [VertexId; 3] {
        self.triangles[t]
    }

    /// Position of `v` within the stored triple of `t`.
    pub fn local_index(&self, t: TriangleId, v: VertexId) -> Option<usize> {
        self.triangles[t].iter().position(|&x| x == v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Edge, &[TriangleId])> {
        self.edges.iter().map(|(e, ts)| (e, ts.as_slice()))
    }

    pub fn edge_triangles(&self, e: Edge) -> &[TriangleId] {
        self.edges.get(&e).map_or(&[], Vec::as_slice)
    }

    pub fn is_boundary_edge(&self, e: Edge) -> bool {
        self.edge_triangles(e).len() == 1
    }

    pub fn boundary_edges(&self) -> Vec<Edge> {
        self.edges.iter().filter(|(_, ts)| ts.len() == 1).map(|(e, _)| *e).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.edges.values().all(|ts| ts.len() == 2)
    }

    pub fn star(&self, v: VertexId) -> &Star {
        &self.stars[v]
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.stars[v].valence()
    }

    pub fn is_interior_vertex(&self, v: VertexId) -> bool {
        self.stars[v].closed
    }

    pub fn interior_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count).filter(|&v| self.is_interior_vertex(v)).collect()
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count).filter(|&v| !self.is_interior_vertex(v)).collect()
    }

    /// 1-skeleton neighbours of `v`, sorted.
    pub fn vertex_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut n: Vec<VertexId> = self.stars[v].rim.clone();
        n.sort_unstable();
        n.dedup();
        n
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Edge shared by two distinct triangles.
    pub fn shared_edge(&self, t1: TriangleId, t2: TriangleId) -> Option<Edge> {
        if t1 == t2 {
            return None;
        }
        let a = self.triangles[t1];
        let b = self.triangles[t2];
        let common: Vec<VertexId> = a.iter().copied().filter(|v| b.contains(v)).collect();
        (common.len() == 2).then(|| Edge::new(common[0], common[1]))
    }

    pub fn third_vertex(&self, t: TriangleId, e: Edge) -> VertexId {
        *self.triangles[t].iter().find(|&&v| !e.contains(v)).expect("edge of triangle")
    }

    /// Edge-adjacent triangles of `t`, sorted by index.
    pub fn adjacent_triangles(&self, t: TriangleId) -> Vec<TriangleId> {
        let tri = self.triangles[t];
        let mut out: Vec<TriangleId> = (0..3)
            .filter_map(|i| {
                self.edges[&Edge::new(tri[i], tri[(i + 1) % 3])].iter().copied().find(|&s| s != t)
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.triangles.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(t) = queue.pop_front() {
            for s in self.adjacent_triangles(t) {
                if !seen[s] {
                    seen[s] = true;
                    count += 1;
                    queue.push_back(s);
                }
            }
        }
        count == self.triangles.len()
    }

    /// Whether `t1` and `t2` induce opposite directions on their shared edge.
    pub fn coherent(&self, t1: TriangleId, t2: TriangleId) -> bool {
        let e = self.shared_edge(t1, t2).expect("adjacent triangles");
        self.edge_direction(t1, e) != self.edge_direction(t2, e)
    }

    /// `true` when the stored orientation of `t` runs `e.a → e.b`.
    pub fn edge_direction(&self, t: TriangleId, e: Edge) -> bool {
        let [u, _] = self.others(t, e.a);
        u == e.b
    }

    /// Whether the stored triangle orientations are consistent.
    pub fn is_oriented(&self) -> bool {
        self.edges
            .values()
            .filter(|ts| ts.len() == 2)
            .all(|ts| self.coherent(ts[0], ts[1]))
    }

    /// Whether some choice of triangle orientations is consistent.
    pub fn is_orientable(&self) -> bool {
        self.orientation_signs().is_some()
    }

    /// Signs `s_T` with `s_T` flipping each stored triangle into a
    /// coherent orientation, if one exists (per component, first triangle
    /// kept).
    pub fn orientation_signs(&self) -> Option<Vec<i8>> {
        let mut sign = vec![0i8; self.triangles.len()];
        for root in 0..self.triangles.len() {
            if sign[root] != 0 {
                continue;
            }
            sign[root] = 1;
            let mut queue = VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                for s in self.adjacent_triangles(t) {
                    let want = if self.coherent(t, s) { sign[t] } else { -sign[t] };
                    if sign[s] == 0 {
                        sign[s] = want;
                        queue.push_back(s);
                    } else if sign[s] != want {
                        return None;
                    }
                }
            }
        }
        Some(sign)
    }

    /// A spanning tree of the dual graph by BFS from triangle 0:
    /// `parent[t]` for each non-root triangle, plus the visiting order.
    pub fn dual_spanning_tree(&self) -> (Vec<Option<TriangleId>>, Vec<TriangleId>) {
        let mut parent = vec![None; self.triangles.len()];
        let mut seen = vec![false; self.triangles.len()];
        let mut order = vec![0];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(t) = queue.pop_front() {
            for s in self.adjacent_triangles(t) {
                if !seen[s] {
                    seen[s] = true;
                    parent[s] = Some(t);
                    order.push(s);
                    queue.push_back(s);
                }
            }
        }
        (parent, order)
    }

    /// Path in the dual tree from the root to `t`.
    pub fn tree_path(parent: &[Option<TriangleId>], t: TriangleId) -> Vec<TriangleId> {
        let mut path = vec![t];
        let mut cur = t;
        while let Some(p) = parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Thick loops based at triangle 0, one per dual edge outside the BFS
    /// spanning tree. They generate the fundamental group.
    pub fn fundamental_loops(&self) -> Vec<ThickPath> {
        let (parent, _) = self.dual_spanning_tree();
        let mut loops = Vec::new();
        let mut done: BTreeSet<(TriangleId, TriangleId)> = BTreeSet::new();
        for (_, ts) in self.edges.iter().filter(|(_, ts)| ts.len() == 2) {
            let (t, s) = (ts[0].min(ts[1]), ts[0].max(ts[1]));
            if parent[s] == Some(t) || parent[t] == Some(s) || !done.insert((t, s)) {
                continue;
            }
            let mut seq = Self::tree_path(&parent, t);
            let mut back = Self::tree_path(&parent, s);
            back.reverse();
            seq.extend(back);
            loops.push(ThickPath::from_triangles(seq));
        }
        loops
    }
}
