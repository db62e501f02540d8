use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use super::{MeshError, SubComplexDomain, ThickPath, TriangleId, TriangulatedSurface, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceColor {
    Black,
    White,
}

impl FaceColor {
    pub fn flip(self) -> Self {
        match self {
            FaceColor::Black => FaceColor::White,
            FaceColor::White => FaceColor::Black,
        }
    }
}

/// Black/white coloring of the triangles of a surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceColoring(pub Vec<FaceColor>);

impl FaceColoring {
    pub fn color(&self, t: TriangleId) -> FaceColor {
        self.0[t]
    }

    pub fn of_color(&self, c: FaceColor) -> Vec<TriangleId> {
        (0..self.0.len()).filter(|&t| self.0[t] == c).collect()
    }

    pub fn black(&self) -> Vec<TriangleId> {
        self.of_color(FaceColor::Black)
    }

    pub fn white(&self) -> Vec<TriangleId> {
        self.of_color(FaceColor::White)
    }
}

/// Two-coloring of faces so that edge-adjacent faces differ; `None` when
/// the dual graph has an odd cycle. Triangle 0 (and the first triangle of
/// every further component) is black.
pub fn bw_face_coloring(surface: &TriangulatedSurface) -> Option<FaceColoring> {
    let n = surface.triangle_count();
    let mut color: Vec<Option<FaceColor>> = vec![None; n];
    for root in 0..n {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(FaceColor::Black);
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            let want = color[t].expect("colored").flip();
            for s in surface.adjacent_triangles(t) {
                match color[s] {
                    None => {
                        color[s] = Some(want);
                        queue.push_back(s);
                    }
                    Some(c) if c != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(FaceColoring(color.into_iter().map(|c| c.expect("all colored")).collect()))
}

/// Vertex colors in `{0, 1, 2}` (read as a, b, c).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexColoring(pub Vec<Option<u8>>);

impl VertexColoring {
    pub fn get(&self, v: VertexId) -> Option<u8> {
        self.0[v]
    }

    /// The vertex of `t` carrying color `c`.
    pub fn vertex_of_color(&self, surface: &TriangulatedSurface, t: TriangleId, c: u8) -> VertexId {
        *surface
            .triangle(t)
            .iter()
            .find(|&&v| self.0[v] == Some(c))
            .expect("tri-chromatic triangle")
    }
}

/// Three-coloring of the vertices of a domain with every triangle
/// tri-chromatic, or `None` when propagation meets a contradiction.
/// The lowest-index triangle of each component is colored a, b, c in
/// increasing vertex order.
pub fn three_vertex_coloring(domain: &SubComplexDomain<'_>) -> Option<VertexColoring> {
    let surface = domain.surface();
    let tris = domain.triangles();
    let mut colors: Vec<Option<u8>> = vec![None; surface.vertex_count()];
    let mut done: BTreeSet<TriangleId> = BTreeSet::new();
    for &root in tris {
        if done.contains(&root) {
            continue;
        }
        let mut seed = surface.triangle(root);
        seed.sort_unstable();
        for (c, &v) in seed.iter().enumerate() {
            match colors[v] {
                None => colors[v] = Some(c as u8),
                Some(x) if x != c as u8 => return None,
                Some(_) => {}
            }
        }
        done.insert(root);
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            for s in surface.adjacent_triangles(t) {
                if !tris.contains(&s) || done.contains(&s) {
                    continue;
                }
                let e = surface.shared_edge(t, s).expect("adjacent");
                let (ca, cb) = (colors[e.a].expect("colored"), colors[e.b].expect("colored"));
                let want = 3 - ca - cb;
                let x = surface.third_vertex(s, e);
                match colors[x] {
                    None => colors[x] = Some(want),
                    Some(c) if c != want => return None,
                    Some(_) => {}
                }
                done.insert(s);
                queue.push_back(s);
            }
        }
    }
    let ok = tris.iter().all(|&t| {
        let mut c: Vec<u8> = surface.triangle(t).iter().map(|&v| colors[v].expect("colored")).collect();
        c.sort_unstable();
        c == [0, 1, 2]
    });
    ok.then_some(VertexColoring(colors))
}

/// [`three_vertex_coloring`] of the whole surface.
pub fn three_vertex_coloring_of(surface: &TriangulatedSurface) -> Option<VertexColoring> {
    three_vertex_coloring(&SubComplexDomain::whole(surface))
}

/// A permutation of the three colors: `self.0[c]` is the image of `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Perm3(pub [u8; 3]);

impl Perm3 {
    pub fn identity() -> Self {
        Perm3([0, 1, 2])
    }

    pub fn is_identity(&self) -> bool {
        *self == Perm3::identity()
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Perm3) -> Perm3 {
        Perm3([0, 1, 2].map(|c| self.0[other.0[c as usize] as usize]))
    }

    pub fn sign(&self) -> i8 {
        let p = self.0;
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Track a local three-coloring of `T₁` along the loop and return the
/// permutation it has undergone on return.
pub fn loop_color_permutation(surface: &TriangulatedSurface, path: &ThickPath) -> Result<Perm3, MeshError> {
    if !path.is_loop() {
        return Err(MeshError::NotALoop);
    }
    path.validate(surface)?;
    let t1 = surface.triangle(path.first());
    let mut state: [(VertexId, u8); 3] = [(t1[0], 0), (t1[1], 1), (t1[2], 2)];
    for w in path.triangles().windows(2) {
        let e = surface.shared_edge(w[0], w[1]).expect("validated");
        let x = surface.third_vertex(w[1], e);
        let kept: Vec<(VertexId, u8)> = state.iter().copied().filter(|(v, _)| e.contains(*v)).collect();
        let missing = 3 - kept[0].1 - kept[1].1;
        state = [kept[0], kept[1], (x, missing)];
    }
    let mut perm = [0u8; 3];
    for (i, &v) in t1.iter().enumerate() {
        let c = state.iter().find(|(u, _)| *u == v).expect("back at T1").1;
        perm[i] = c;
    }
    Ok(Perm3(perm))
}

/// `(ρ₂, ρ₃)`: the orientation character and the length parity of a loop.
pub fn homomorphism_signs(surface: &TriangulatedSurface, path: &ThickPath) -> Result<(i8, i8), MeshError> {
    if !path.is_loop() {
        return Err(MeshError::NotALoop);
    }
    path.validate(surface)?;
    let mut eps = 1i8;
    for w in path.triangles().windows(2) {
        if !surface.coherent(w[0], w[1]) {
            eps = -eps;
        }
    }
    let rho3 = if path.steps() % 2 == 0 { 1 } else { -1 };
    Ok((eps, rho3))
}
