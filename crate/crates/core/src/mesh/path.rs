use super::{Edge, MeshError, TriangleId, TriangulatedSurface, VertexId};

/// The edge `κ_j = T_j ∩ T_{j+1}` with its endpoints labelled.
///
/// If `X` is the vertex of `T_j` off the edge, `first` (`P′_j`) is the
/// vertex following `X` in the stored orientation of `T_j` and `second`
/// (`P″_j`) the one after that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedEdge {
    pub edge: Edge,
    pub opposite: VertexId,
    pub first: VertexId,
    pub second: VertexId,
}

/// A sequence of triangles in which consecutive entries share an edge.
/// A loop repeats its first triangle at the end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThickPath {
    triangles: Vec<TriangleId>,
}

impl ThickPath {
    /// Wrap a sequence without checking adjacency.
    pub fn from_triangles(triangles: Vec<TriangleId>) -> Self {
        ThickPath { triangles }
    }

    pub fn new(surface: &TriangulatedSurface, triangles: Vec<TriangleId>) -> Result<Self, MeshError> {
        let p = ThickPath { triangles };
        p.validate(surface)?;
        Ok(p)
    }

    pub fn validate(&self, surface: &TriangulatedSurface) -> Result<(), MeshError> {
        if self.triangles.is_empty() {
            return Err(MeshError::EmptyPath);
        }
        for w in self.triangles.windows(2) {
            if surface.shared_edge(w[0], w[1]).is_none() {
                return Err(MeshError::NotAdjacent { first: w[0], second: w[1] });
            }
        }
        Ok(())
    }

    pub fn triangles(&self) -> &[TriangleId] {
        &self.triangles
    }

    pub fn first(&self) -> TriangleId {
        self.triangles[0]
    }

    pub fn last(&self) -> TriangleId {
        *self.triangles.last().expect("nonempty path")
    }

    pub fn is_loop(&self) -> bool {
        !self.triangles.is_empty() && self.first() == self.last()
    }

    /// Number of steps; for a loop this is its triangle count `m`.
    pub fn steps(&self) -> usize {
        self.triangles.len().saturating_sub(1)
    }

    pub fn shared_edges(&self, surface: &TriangulatedSurface) -> Result<Vec<SharedEdge>, MeshError> {
        self.triangles
            .windows(2)
            .map(|w| {
                let edge = surface
                    .shared_edge(w[0], w[1])
                    .ok_or(MeshError::NotAdjacent { first: w[0], second: w[1] })?;
                let opposite = surface.third_vertex(w[0], edge);
                let [first, second] = surface.others(w[0], opposite);
                Ok(SharedEdge { edge, opposite, first, second })
            })
            .collect()
    }

    pub fn reversed(&self) -> ThickPath {
        let mut t = self.triangles.clone();
        t.reverse();
        ThickPath { triangles: t }
    }

    /// `self` followed by `other`; requires `self.last() == other.first()`.
    pub fn concat(&self, other: &ThickPath) -> Option<ThickPath> {
        if self.last() != other.first() {
            return None;
        }
        let mut t = self.triangles.clone();
        t.extend_from_slice(&other.triangles[1..]);
        Some(ThickPath { triangles: t })
    }

    /// Insert the backtrack `T, T′, T` at position `pos`.
    pub fn with_backtrack(
        &self,
        surface: &TriangulatedSurface,
        pos: usize,
        neighbor: TriangleId,
    ) -> Result<ThickPath, MeshError> {
        let t = self.triangles[pos];
        if surface.shared_edge(t, neighbor).is_none() {
            return Err(MeshError::NotAdjacent { first: t, second: neighbor });
        }
        let mut out = self.triangles[..=pos].to_vec();
        out.push(neighbor);
        out.extend_from_slice(&self.triangles[pos..]);
        Ok(ThickPath { triangles: out })
    }

    /// Insert a full turn around the interior vertex `v` of the triangle at
    /// position `pos`.
    pub fn with_star_turn(
        &self,
        surface: &TriangulatedSurface,
        pos: usize,
        v: VertexId,
    ) -> Result<ThickPath, MeshError> {
        let t = self.triangles[pos];
        if !surface.triangle(t).contains(&v) {
            return Err(MeshError::NotInTriangle { vertex: v, triangle: t });
        }
        let star = surface.star(v);
        if !star.closed {
            return Err(MeshError::BoundaryVertex { vertex: v });
        }
        let k = star.triangles.iter().position(|&s| s == t).expect("star contains t");
        let n = star.valence();
        let mut out = self.triangles[..=pos].to_vec();
        out.extend((1..=n).map(|i| star.triangles[(k + i) % n]));
        out.extend_from_slice(&self.triangles[pos + 1..]);
        Ok(ThickPath { triangles: out })
    }

    /// The loop going once around an interior vertex, starting at its
    /// first star triangle.
    pub fn star_loop(surface: &TriangulatedSurface, v: VertexId) -> Result<ThickPath, MeshError> {
        let star = surface.star(v);
        if !star.closed {
            return Err(MeshError::BoundaryVertex { vertex: v });
        }
        let mut t = star.triangles.clone();
        t.push(star.triangles[0]);
        Ok(ThickPath { triangles: t })
    }
}
