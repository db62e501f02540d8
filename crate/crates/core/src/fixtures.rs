//! Standard meshes and complexes.

use crate::lattice::{LatticePatch, Site};
use crate::mesh::{MeshError, ThickPath, TriangleId, TriangulatedSurface, VertexId};

/// Octahedron on `0:+z 1:+x 2:+y 3:−z 4:−x 5:−y`, faces oriented outward,
/// triangle 0 = `⟨0, 1, 2⟩`.
pub fn octahedron() -> TriangulatedSurface {
    TriangulatedSurface::new(&octahedron_triangles()).expect("octahedron")
}

pub fn octahedron_triangles() -> Vec<[VertexId; 3]> {
    let mut out = Vec::with_capacity(8);
    for sz in [1i8, -1] {
        for sx in [1i8, -1] {
            for sy in [1i8, -1] {
                let z = if sz > 0 { 0 } else { 3 };
                let x = if sx > 0 { 1 } else { 4 };
                let y = if sy > 0 { 2 } else { 5 };
                if sx * sy * sz > 0 {
                    out.push([z, x, y]);
                } else {
                    out.push([z, y, x]);
                }
            }
        }
    }
    out
}

/// Regular icosahedron, consistently oriented, with all valences 5.
pub fn icosahedron() -> TriangulatedSurface {
    TriangulatedSurface::new(&ICOSAHEDRON).expect("icosahedron")
}

const ICOSAHEDRON: [[VertexId; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

pub fn torus_vertex(n: usize, i: i64, j: i64) -> VertexId {
    let n = n as i64;
    (i.rem_euclid(n) + n * j.rem_euclid(n)) as VertexId
}

pub fn torus_triangles(n: usize) -> Vec<[VertexId; 3]> {
    let v = |i: i64, j: i64| torus_vertex(n, i, j);
    let mut out = Vec::with_capacity(2 * n * n);
    for j in 0..n as i64 {
        for i in 0..n as i64 {
            out.push([v(i, j), v(i - 1, j), v(i, j - 1)]);
        }
    }
    for j in 0..n as i64 {
        for i in 0..n as i64 {
            out.push([v(i, j), v(i + 1, j), v(i, j + 1)]);
        }
    }
    out
}

/// Quotient of the lattice by `Nℤ²`. Black triangles come first.
pub fn try_torus(n: usize) -> Result<TriangulatedSurface, MeshError> {
    TriangulatedSurface::with_vertex_count(n * n, &torus_triangles(n))
}

pub fn torus(n: usize) -> TriangulatedSurface {
    try_torus(n).expect("torus with N >= 3")
}

/// `T^b_(i,j)` on the torus fixture.
pub fn torus_black(n: usize, i: i64, j: i64) -> TriangleId {
    torus_vertex(n, i, j)
}

/// `T^w_(i,j)` on the torus fixture.
pub fn torus_white(n: usize, i: i64, j: i64) -> TriangleId {
    n * n + torus_vertex(n, i, j)
}

/// Strip loop between rows 0 and 1 starting at `T^w_(0,0)`:
/// `W₀, B₁, W₁, …, W_{N−1}, B₀, W₀`.
pub fn torus_strip_from_white(n: usize) -> ThickPath {
    let mut t = Vec::with_capacity(2 * n + 1);
    for i in 0..n as i64 {
        t.push(torus_white(n, i, 0));
        t.push(torus_black(n, i + 1, 1));
    }
    t.push(torus_white(n, 0, 0));
    ThickPath::from_triangles(t)
}

/// Loop from triangle 0 once around the `e₁` direction.
pub fn torus_meridian(n: usize) -> ThickPath {
    let mut t = Vec::with_capacity(2 * n + 1);
    for i in 0..n as i64 {
        t.push(torus_black(n, i, 0));
        t.push(torus_white(n, i, -1));
    }
    t.push(0);
    ThickPath::from_triangles(t)
}

/// Loop from triangle 0 once around the `e₂` direction.
pub fn torus_longitude(n: usize) -> ThickPath {
    let mut t = Vec::with_capacity(2 * n + 1);
    for j in 0..n as i64 {
        t.push(torus_black(n, 0, j));
        t.push(torus_white(n, -1, j));
    }
    t.push(0);
    ThickPath::from_triangles(t)
}

/// All lattice triangles within hexagonal radius `r` of the origin.
pub fn hexagon_patch(r: i64) -> LatticePatch {
    LatticePatch::hexagon(r)
}

pub fn hexagon_patch_at(center: Site, r: i64) -> LatticePatch {
    LatticePatch::hexagon_at(center, r)
}

/// Open star of valence `n`: centre `0`, rim `1..=n`.
pub fn star(n: usize) -> TriangulatedSurface {
    let tris: Vec<[VertexId; 3]> = (1..=n).map(|i| [0, i, i % n + 1]).collect();
    TriangulatedSurface::new(&tris).expect("valid star")
}

/// The cycle graph `C_n` as a list of edges.
pub fn cycle_graph(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| vec![i, (i + 1) % n]).collect()
}

/// Boundary of the `d`-simplex: all `d`-subsets of `{0, …, d}`.
pub fn simplex_boundary(d: usize) -> Vec<Vec<usize>> {
    (0..=d).map(|skip| (0..=d).filter(|&v| v != skip).collect()).collect()
}

/// Boundary of the cross-polytope in dimension `d`: vertices `±eᵢ`
/// (`+eᵢ ↦ i`, `−eᵢ ↦ i + d`), one facet per sign pattern.
pub fn cross_polytope_boundary(d: usize) -> Vec<Vec<usize>> {
    (0..1usize << d)
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 0 { i } else { i + d }).collect())
        .collect()
}
