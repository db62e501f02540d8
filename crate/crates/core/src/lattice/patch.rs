use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::{LatticeFunction, LatticeTriangle, Rect, Site};
use crate::mesh::{FaceColor, FaceColoring, MeshError, TriangleId, TriangulatedSurface, VertexColoring, VertexId};
use crate::scalar::Rational;

/// A finite union of lattice triangles viewed as a triangulated surface.
///
/// Vertices are numbered in lexicographic site order; black triangles come
/// first (so triangle 0 is black), each color sorted by anchor.
#[derive(Debug, Clone)]
pub struct LatticePatch {
    surface: TriangulatedSurface,
    sites: Vec<Site>,
    index: BTreeMap<Site, VertexId>,
    triangles: Vec<LatticeTriangle>,
    tri_index: BTreeMap<LatticeTriangle, TriangleId>,
}

impl LatticePatch {
    pub fn from_triangles(tris: impl IntoIterator<Item = LatticeTriangle>) -> Result<Self, MeshError> {
        let set: BTreeSet<LatticeTriangle> = tris.into_iter().collect();
        let mut triangles: Vec<LatticeTriangle> = set.into_iter().collect();
        triangles.sort_by_key(|t| (t.color, t.anchor));
        let sites: Vec<Site> = triangles
            .iter()
            .flat_map(|t| t.vertices())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<Site, VertexId> = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let triples: Vec<[VertexId; 3]> = triangles.iter().map(|t| t.vertices().map(|s| index[&s])).collect();
        let surface = TriangulatedSurface::with_vertex_count(sites.len(), &triples)?;
        let tri_index = triangles.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        Ok(LatticePatch { surface, sites, index, triangles, tri_index })
    }

    /// All lattice triangles whose vertices lie within hexagonal distance
    /// `radius` of the origin.
    pub fn hexagon(radius: i64) -> Self {
        Self::hexagon_at(Site::ORIGIN, radius)
    }

    pub fn hexagon_at(center: Site, radius: i64) -> Self {
        let r = radius;
        let box_ = Rect::new(center.x - r - 1, center.x + r + 1, center.y - r - 1, center.y + r + 1);
        let inside = |s: Site| (s - center).hex_norm() <= r;
        let tris: Vec<LatticeTriangle> = box_
            .sites()
            .flat_map(|m| [LatticeTriangle::black(m), LatticeTriangle::white(m)])
            .filter(|t| t.vertices().iter().all(|&v| inside(v)))
            .collect();
        Self::from_triangles(tris).expect("hexagon is a disc")
    }

    /// All lattice triangles with vertices in the rectangle.
    pub fn rect(r: Rect) -> Self {
        let big = r.inset(-1, -1, -1, -1);
        let tris: Vec<LatticeTriangle> = big
            .sites()
            .flat_map(|m| [LatticeTriangle::black(m), LatticeTriangle::white(m)])
            .filter(|t| t.vertices().iter().all(|&v| r.contains(v)))
            .collect();
        Self::from_triangles(tris).expect("rectangle patch is a disc")
    }

    pub fn surface(&self) -> &TriangulatedSurface {
        &self.surface
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, v: VertexId) -> Site {
        self.sites[v]
    }

    pub fn vertex_at(&self, s: Site) -> Option<VertexId> {
        self.index.get(&s).copied()
    }

    pub fn lattice_triangles(&self) -> &[LatticeTriangle] {
        &self.triangles
    }

    pub fn lattice_triangle(&self, t: TriangleId) -> LatticeTriangle {
        self.triangles[t]
    }

    pub fn triangle_id(&self, t: &LatticeTriangle) -> Option<TriangleId> {
        self.tri_index.get(t).copied()
    }

    /// The black/white classes of the lattice.
    pub fn face_coloring(&self) -> FaceColoring {
        FaceColoring(self.triangles.iter().map(|t| t.color).collect())
    }

    /// Vertex classes `(n₁ − n₂) mod 3`.
    pub fn vertex_coloring(&self) -> VertexColoring {
        VertexColoring(self.sites.iter().map(|s| Some(s.color_class() as u8)).collect())
    }

    pub fn black_triangles(&self) -> Vec<TriangleId> {
        (0..self.triangles.len()).filter(|&t| self.triangles[t].color == FaceColor::Black).collect()
    }

    /// Vertex values read from a lattice function (missing sites read 0).
    pub fn values_of(&self, f: &LatticeFunction) -> Vec<Rational> {
        self.sites.iter().map(|&s| f.value(s).cloned().unwrap_or_else(Rational::zero)).collect()
    }

    pub fn to_function(&self, values: &[Rational]) -> LatticeFunction {
        LatticeFunction::from_map(self.sites.iter().copied().zip(values.iter().cloned()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hexagon_counts() {
        for r in 1..5 {
            let h = LatticePatch::hexagon(r);
            let n = (3 * r * r + 3 * r + 1) as usize;
            assert_eq!(h.surface().vertex_count(), n);
            assert_eq!(h.surface().triangle_count(), (6 * r * r) as usize);
            assert_eq!(h.surface().euler_characteristic(), 1);
            assert!(h.surface().is_oriented());
            assert_eq!(h.lattice_triangle(0).color, FaceColor::Black);
        }
    }

    #[test]
    fn lattice_coloring_is_a_coloring() {
        let h = LatticePatch::hexagon(3);
        let fc = h.face_coloring();
        assert_eq!(Some(fc), crate::mesh::bw_face_coloring(h.surface()));
        let vc = h.vertex_coloring();
        for tri in h.surface().triangles() {
            let mut c: Vec<u8> = tri.iter().map(|&v| vc.get(v).unwrap()).collect();
            c.sort_unstable();
            assert_eq!(c, vec![0, 1, 2]);
        }
    }
}
