use std::collections::{BTreeMap, BTreeSet};

use super::{Edge, MeshError, TriangleId, TriangulatedSurface, VertexId};

/// A set of triangles `M′` of a surface, with its boundary layers.
#[derive(Debug, Clone)]
pub struct SubComplexDomain<'a> {
    surface: &'a TriangulatedSurface,
    triangles: BTreeSet<TriangleId>,
}

impl<'a> SubComplexDomain<'a> {
    pub fn new(surface: &'a TriangulatedSurface, triangles: impl IntoIterator<Item = TriangleId>) -> Self {
        let triangles = triangles.into_iter().filter(|&t| t < surface.triangle_count()).collect();
        SubComplexDomain { surface, triangles }
    }

    pub fn whole(surface: &'a TriangulatedSurface) -> Self {
        SubComplexDomain { surface, triangles: (0..surface.triangle_count()).collect() }
    }

    pub fn surface(&self) -> &'a TriangulatedSurface {
        self.surface
    }

    pub fn triangles(&self) -> &BTreeSet<TriangleId> {
        &self.triangles
    }

    pub fn contains(&self, t: TriangleId) -> bool {
        self.triangles.contains(&t)
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.triangles.iter().flat_map(|&t| self.surface.triangle(t)).collect()
    }

    /// Edges of the domain with exactly one domain triangle on them.
    pub fn boundary_edges(&self) -> Vec<Edge> {
        let mut count: BTreeMap<Edge, usize> = BTreeMap::new();
        for &t in &self.triangles {
            let tri = self.surface.triangle(t);
            for i in 0..3 {
                *count.entry(Edge::new(tri[i], tri[(i + 1) % 3])).or_default() += 1;
            }
        }
        count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect()
    }

    /// Vertices of `∂M′`.
    pub fn boundary_vertices(&self) -> BTreeSet<VertexId> {
        self.boundary_edges().into_iter().flat_map(|e| [e.a, e.b]).collect()
    }

    pub fn interior_vertices(&self) -> BTreeSet<VertexId> {
        let b = self.boundary_vertices();
        self.vertices().into_iter().filter(|v| !b.contains(v)).collect()
    }

    /// `∂₋M′`: domain triangles touching the boundary.
    pub fn inner_boundary(&self) -> BTreeSet<TriangleId> {
        let b = self.boundary_vertices();
        self.triangles
            .iter()
            .copied()
            .filter(|&t| self.surface.triangle(t).iter().any(|v| b.contains(v)))
            .collect()
    }

    /// `∂₊D`: triangles outside the domain touching its boundary.
    pub fn outer_boundary(&self) -> BTreeSet<TriangleId> {
        let b = self.boundary_vertices();
        (0..self.surface.triangle_count())
            .filter(|t| !self.triangles.contains(t))
            .filter(|&t| self.surface.triangle(t).iter().any(|v| b.contains(v)))
            .collect()
    }

    /// The domain as a surface of its own, with local-to-global vertex and
    /// triangle maps.
    pub fn sub_surface(&self) -> Result<(TriangulatedSurface, Vec<VertexId>, Vec<TriangleId>), MeshError> {
        let verts: Vec<VertexId> = self.vertices().into_iter().collect();
        let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let tris: Vec<TriangleId> = self.triangles.iter().copied().collect();
        let triples: Vec<[VertexId; 3]> =
            tris.iter().map(|&t| self.surface.triangle(t).map(|v| index[&v])).collect();
        let s = TriangulatedSurface::with_vertex_count(verts.len(), &triples)?;
        Ok((s, verts, tris))
    }
}
