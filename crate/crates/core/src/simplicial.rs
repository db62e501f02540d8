//! Canonical connections on the `k`-simplices of a simplicial complex:
//! `k`-thick paths, holonomy as a permutation of vertex labels, the
//! orbit-count dimension of covariant constants, and `L = Q⁺Q`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::mesh::{FaceColor, TriangulatedSurface};
use crate::par::{self, Exec};
use crate::scalar::{rat, Rational};
use crate::solver::{same_subspace, SparseOperator};

pub type SimplexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("no simplices given")]
    Empty,
    #[error("simplex {simplex} has {found} vertices, expected {expected}")]
    ArityMismatch { simplex: SimplexId, expected: usize, found: usize },
    #[error("simplex {simplex} has a repeated vertex")]
    DegenerateSimplex { simplex: SimplexId },
    #[error("simplices {first} and {second} have the same vertices")]
    DuplicateSimplex { first: SimplexId, second: SimplexId },
    #[error("vertex {vertex} lies in no simplex")]
    IsolatedVertex { vertex: usize },
    #[error("facet {facet:?} lies in {count} simplices")]
    NotAManifold { facet: Vec<usize>, count: usize },
    #[error("simplex {ridge:?} has odd valence {valence}")]
    LocalHolonomyNontrivial { ridge: Vec<usize>, valence: usize },
    #[error("simplices {first} and {second} do not share a facet")]
    NotAdjacent { first: SimplexId, second: SimplexId },
    #[error("path is empty")]
    EmptyPath,
    #[error("path is not closed")]
    NotALoop,
    #[error("path is not contained in the star of a vertex")]
    NotElementary,
    #[error("complex is not connected through facets")]
    Disconnected,
    #[error("no simplex has id {0}")]
    UnknownSimplex(SimplexId),
}

/// A pure `k`-dimensional complex given by its top simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplexK {
    k: usize,
    vertex_count: usize,
    simplices: Vec<Vec<usize>>,
    facets: BTreeMap<Vec<usize>, Vec<SimplexId>>,
    ridges: BTreeMap<Vec<usize>, usize>,
}

fn faces_dropping(s: &[usize], n: usize) -> Vec<Vec<usize>> {
    // All sub-lists with `n` entries removed, in lexicographic order of the kept set.
    fn rec(s: &[usize], start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + (s.len() - start) < left {
            return;
        }
        if cur.len() == left {
            out.push(cur.clone());
            return;
        }
        for i in start..s.len() {
            cur.push(s[i]);
            rec(s, i + 1, left, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n <= s.len() {
        rec(s, 0, s.len() - n, &mut Vec::new(), &mut out);
    }
    out
}

impl SimplicialComplexK {
    /// Build from vertex lists; `k` is one less than the common arity.
    pub fn new(simplices: &[Vec<usize>]) -> Result<Self, SimplicialError> {
        let first = simplices.first().ok_or(SimplicialError::Empty)?;
        if first.is_empty() {
            return Err(SimplicialError::ArityMismatch { simplex: 0, expected: 1, found: 0 });
        }
        let arity = first.len();
        let mut sorted = Vec::with_capacity(simplices.len());
        let mut seen: BTreeMap<Vec<usize>, SimplexId> = BTreeMap::new();
        for (id, s) in simplices.iter().enumerate() {
            if s.len() != arity {
                return Err(SimplicialError::ArityMismatch { simplex: id, expected: arity, found: s.len() });
            }
            let mut v = s.clone();
            v.sort_unstable();
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(SimplicialError::DegenerateSimplex { simplex: id });
            }
            if let Some(&prev) = seen.get(&v) {
                return Err(SimplicialError::DuplicateSimplex { first: prev, second: id });
            }
            seen.insert(v.clone(), id);
            sorted.push(v);
        }
        let vertex_count = sorted.iter().flatten().max().map_or(0, |m| m + 1);
        let used: BTreeSet<usize> = sorted.iter().flatten().copied().collect();
        if let Some(vertex) = (0..vertex_count).find(|v| !used.contains(v)) {
            return Err(SimplicialError::IsolatedVertex { vertex });
        }
        let mut facets: BTreeMap<Vec<usize>, Vec<SimplexId>> = BTreeMap::new();
        let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (id, s) in sorted.iter().enumerate() {
            for f in faces_dropping(s, 1) {
                facets.entry(f).or_default().push(id);
            }
            if arity >= 3 {
                for r in faces_dropping(s, 2) {
                    *ridges.entry(r).or_default() += 1;
                }
            }
        }
        Ok(SimplicialComplexK { k: arity - 1, vertex_count, simplices: sorted, facets, ridges })
    }

    /// As [`new`](Self::new), additionally requiring every facet to lie
    /// in exactly two simplices.
    pub fn manifold(simplices: &[Vec<usize>]) -> Result<Self, SimplicialError> {
        let x = Self::new(simplices)?;
        x.check_manifold()?;
        Ok(x)
    }

    pub fn from_surface(surface: &TriangulatedSurface) -> Self {
        let tris: Vec<Vec<usize>> = surface.triangles().iter().map(|t| t.to_vec()).collect();
        Self::new(&tris).expect("surfaces are valid 2-complexes")
    }

    pub fn check_manifold(&self) -> Result<(), SimplicialError> {
        match self.facets.iter().find(|(_, inc)| inc.len() != 2) {
            Some((f, inc)) => Err(SimplicialError::NotAManifold { facet: f.clone(), count: inc.len() }),
            None => Ok(()),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    /// Sorted vertices of a simplex.
    pub fn simplex(&self, s: SimplexId) -> &[usize] {
        &self.simplices[s]
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn facet_adjacency(&self) -> &BTreeMap<Vec<usize>, Vec<SimplexId>> {
        &self.facets
    }

    /// Valence of every `(k−2)`-simplex (empty for `k < 2`).
    pub fn ridge_valences(&self) -> &BTreeMap<Vec<usize>, usize> {
        &self.ridges
    }

    /// Simplices sharing a facet with `s`, sorted.
    pub fn neighbors(&self, s: SimplexId) -> Vec<SimplexId> {
        let mut out: Vec<SimplexId> = faces_dropping(&self.simplices[s], 1)
            .iter()
            .flat_map(|f| self.facets[f].iter().copied())
            .filter(|&t| t != s)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The common facet of two adjacent simplices.
    pub fn shared_facet(&self, a: SimplexId, b: SimplexId) -> Option<Vec<usize>> {
        if a == b {
            return None;
        }
        let sb: BTreeSet<usize> = self.simplices[b].iter().copied().collect();
        let common: Vec<usize> = self.simplices[a].iter().copied().filter(|v| sb.contains(v)).collect();
        (common.len() == self.k).then_some(common)
    }

    fn dual_spanning_tree(&self, root: SimplexId) -> Vec<Option<SimplexId>> {
        let mut parent = vec![None; self.simplices.len()];
        let mut seen = vec![false; self.simplices.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            for t in self.neighbors(s) {
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some(s);
                    queue.push_back(t);
                }
            }
        }
        if seen.iter().any(|x| !x) {
            parent.clear();
        }
        parent
    }

    pub fn is_connected(&self) -> bool {
        !self.dual_spanning_tree(0).is_empty()
    }

    /// `Q` of the canonical connection restricted to `family`: one row per
    /// listed simplex, ones on its vertices.
    pub fn q_matrix(&self, family: &[SimplexId]) -> Matrix {
        let mut q = Matrix::zeros(family.len(), self.vertex_count);
        for (r, &s) in family.iter().enumerate() {
            for &v in &self.simplices[s] {
                q[(r, v)] = Rational::one();
            }
        }
        q
    }

    pub fn all_simplices(&self) -> Vec<SimplexId> {
        (0..self.simplices.len()).collect()
    }
}

/// A permutation of `{0, …, k}`; `p[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Perm(inv)
    }

    pub fn sign(&self) -> i8 {
        let mut seen = vec![false; self.0.len()];
        let mut sign = 1;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

/// A sequence of `k`-simplices, consecutive ones sharing a facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KThickPath {
    simplices: Vec<SimplexId>,
}

impl KThickPath {
    pub fn new(x: &SimplicialComplexK, simplices: Vec<SimplexId>) -> Result<Self, SimplicialError> {
        if simplices.is_empty() {
            return Err(SimplicialError::EmptyPath);
        }
        if let Some(&s) = simplices.iter().find(|&&s| s >= x.simplex_count()) {
            return Err(SimplicialError::UnknownSimplex(s));
        }
        for w in simplices.windows(2) {
            if x.shared_facet(w[0], w[1]).is_none() {
                return Err(SimplicialError::NotAdjacent { first: w[0], second: w[1] });
            }
        }
        Ok(KThickPath { simplices })
    }

    pub fn simplices(&self) -> &[SimplexId] {
        &self.simplices
    }

    pub fn first(&self) -> SimplexId {
        self.simplices[0]
    }

    pub fn last(&self) -> SimplexId {
        *self.simplices.last().expect("nonempty")
    }

    pub fn is_loop(&self) -> bool {
        self.simplices.len() > 1 && self.first() == self.last()
    }

    /// Number of facet crossings.
    pub fn steps(&self) -> usize {
        self.simplices.len() - 1
    }

    /// All simplices share a vertex.
    pub fn is_elementary(&self, x: &SimplicialComplexK) -> bool {
        let mut common: BTreeSet<usize> = x.simplex(self.first()).iter().copied().collect();
        for &s in &self.simplices[1..] {
            let here: BTreeSet<usize> = x.simplex(s).iter().copied().collect();
            common = common.intersection(&here).copied().collect();
        }
        !common.is_empty()
    }

    pub fn reversed(&self) -> Self {
        KThickPath { simplices: self.simplices.iter().rev().copied().collect() }
    }

    /// `self` followed by `other`, which must start where `self` ends.
    pub fn concat(&self, other: &KThickPath) -> Option<Self> {
        (self.last() == other.first()).then(|| {
            let mut s = self.simplices.clone();
            s.extend_from_slice(&other.simplices[1..]);
            KThickPath { simplices: s }
        })
    }

    /// Insert an elementary loop based at the simplex at position `at`.
    pub fn with_elementary_loop(
        &self,
        x: &SimplicialComplexK,
        at: usize,
        elementary: &KThickPath,
    ) -> Result<Self, SimplicialError> {
        if !elementary.is_loop() {
            return Err(SimplicialError::NotALoop);
        }
        if !elementary.is_elementary(x) {
            return Err(SimplicialError::NotElementary);
        }
        if self.simplices.get(at) != Some(&elementary.first()) {
            return Err(SimplicialError::NotAdjacent { first: self.simplices.get(at).copied().unwrap_or(usize::MAX), second: elementary.first() });
        }
        let mut s = self.simplices[..at].to_vec();
        s.extend_from_slice(&elementary.simplices);
        s.extend_from_slice(&self.simplices[at + 1..]);
        Ok(KThickPath { simplices: s })
    }
}

/// Transport labels `labels[i]` of the vertices `x.simplex(from)[i]`
/// across the shared facet: the new vertex takes the dropped vertex's label.
fn step_labels(x: &SimplicialComplexK, from: SimplexId, to: SimplexId, labels: &[usize]) -> Vec<usize> {
    let a = x.simplex(from);
    let b = x.simplex(to);
    let dropped = a.iter().position(|v| !b.contains(v)).expect("adjacent");
    b.iter()
        .map(|v| match a.iter().position(|u| u == v) {
            Some(i) => labels[i],
            None => labels[dropped],
        })
        .collect()
}

/// Holonomy of the canonical connection along a loop: position `i` of the
/// base simplex starts with label `i` and ends with label `p[i]`.
pub fn loop_permutation(x: &SimplicialComplexK, path: &KThickPath) -> Result<Perm, SimplicialError> {
    if !path.is_loop() {
        return Err(SimplicialError::NotALoop);
    }
    let mut labels: Vec<usize> = (0..=x.k).collect();
    for w in path.simplices.windows(2) {
        labels = step_labels(x, w[0], w[1], &labels);
    }
    Ok(Perm(labels))
}

/// Orientation character of a loop, from the incidence signs of the
/// sorted vertex lists: each crossing multiplies by `−[σ:τ][σ′:τ]`.
pub fn orientation_character(x: &SimplicialComplexK, path: &KThickPath) -> Result<i8, SimplicialError> {
    if !path.is_loop() {
        return Err(SimplicialError::NotALoop);
    }
    let incidence = |s: &[usize], other: &[usize]| {
        let pos = s.iter().position(|v| !other.contains(v)).expect("adjacent");
        if pos % 2 == 0 {
            1
        } else {
            -1
        }
    };
    let mut sign = 1i8;
    for w in path.simplices.windows(2) {
        let (a, b) = (x.simplex(w[0]), x.simplex(w[1]));
        sign *= -incidence(a, b) * incidence(b, a);
    }
    Ok(sign)
}

/// `(ρ₁, ρ₂, ρ₃)` of a loop: permutation parity, orientation, and length parity.
pub fn loop_characters(x: &SimplicialComplexK, path: &KThickPath) -> Result<(i8, i8, i8), SimplicialError> {
    let rho1 = loop_permutation(x, path)?.sign();
    let rho2 = orientation_character(x, path)?;
    let rho3 = if path.steps() % 2 == 0 { 1 } else { -1 };
    Ok((rho1, rho2, rho3))
}

/// The cycle of simplices around a `(k−2)`-simplex of a manifold, as a loop.
pub fn ridge_loop(x: &SimplicialComplexK, ridge: &[usize]) -> Result<KThickPath, SimplicialError> {
    x.check_manifold()?;
    let contains_ridge = |s: SimplexId| ridge.iter().all(|v| x.simplex(s).contains(v));
    let start = (0..x.simplex_count()).find(|&s| contains_ridge(s)).ok_or(SimplicialError::EmptyPath)?;
    let mut seq = vec![start];
    let (mut prev, mut cur) = (usize::MAX, start);
    loop {
        let next = x
            .neighbors(cur)
            .into_iter()
            .find(|&t| t != prev && contains_ridge(t))
            .expect("manifold ridge link is a cycle");
        seq.push(next);
        if next == start {
            break;
        }
        prev = cur;
        cur = next;
    }
    KThickPath::new(x, seq)
}

/// Local holonomy of the canonical connection around a `(k−2)`-simplex,
/// by explicit transport.
pub fn local_holonomy_k(x: &SimplicialComplexK, ridge: &[usize]) -> Result<Perm, SimplicialError> {
    loop_permutation(x, &ridge_loop(x, ridge)?)
}

/// Whether the canonical connection has trivial local holonomy: always for
/// `k = 1`, otherwise iff every `(k−2)`-simplex of the manifold has even
/// valence.
pub fn canonical_local_holonomy_ok(x: &SimplicialComplexK) -> Result<bool, SimplicialError> {
    if x.k <= 1 {
        return Ok(true);
    }
    x.check_manifold()?;
    Ok(x.ridges.values().all(|v| v % 2 == 0))
}

fn require_trivial_local_holonomy(x: &SimplicialComplexK) -> Result<(), SimplicialError> {
    if !canonical_local_holonomy_ok(x)? {
        let (ridge, &valence) = x.ridges.iter().find(|(_, v)| *v % 2 == 1).expect("odd ridge");
        return Err(SimplicialError::LocalHolonomyNontrivial { ridge: ridge.clone(), valence });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KHolonomyClassification {
    pub k: usize,
    pub base: SimplexId,
    /// One permutation per non-tree facet crossing.
    pub generators: Vec<Perm>,
    /// The holonomy group, sorted.
    pub group: Vec<Perm>,
    pub orbits: Vec<Vec<usize>>,
    pub q: usize,
    /// `q − 1`.
    pub dimension: usize,
    /// Label of each vertex of each simplex, transported along the tree.
    pub tree_labels: Vec<Vec<usize>>,
}

impl KHolonomyClassification {
    pub fn order(&self) -> usize {
        self.group.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.group.len() == 1
    }
}

fn group_closure(n: usize, gens: &[Perm]) -> Vec<Perm> {
    let mut seen: BTreeSet<Perm> = BTreeSet::from([Perm::identity(n)]);
    let mut queue = VecDeque::from([Perm::identity(n)]);
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let gh = h.compose(&g);
            if seen.insert(gh.clone()) {
                queue.push_back(gh);
            }
        }
    }
    seen.into_iter().collect()
}

fn orbits(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while root[i] != i {
            root[i] = root[root[i]];
            i = root[i];
        }
        i
    }
    for g in gens {
        for (i, &j) in g.0.iter().enumerate() {
            let (a, b) = (find(&mut root, i), find(&mut root, j));
            if a != b {
                root[a.max(b)] = a.min(b);
            }
        }
    }
    let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut root, i);
        by.entry(r).or_default().push(i);
    }
    by.into_values().collect()
}

pub fn classify_holonomy_k(x: &SimplicialComplexK, base: SimplexId) -> Result<KHolonomyClassification, SimplicialError> {
    classify_holonomy_k_with(x, base, Exec::default())
}

pub fn classify_holonomy_k_with(
    x: &SimplicialComplexK,
    base: SimplexId,
    exec: Exec,
) -> Result<KHolonomyClassification, SimplicialError> {
    if base >= x.simplex_count() {
        return Err(SimplicialError::UnknownSimplex(base));
    }
    require_trivial_local_holonomy(x)?;
    let parent = x.dual_spanning_tree(base);
    if parent.is_empty() {
        return Err(SimplicialError::Disconnected);
    }
    let n = x.k + 1;
    let mut tree_labels: Vec<Vec<usize>> = vec![Vec::new(); x.simplex_count()];
    tree_labels[base] = (0..n).collect();
    let mut order = vec![base];
    let mut children: Vec<Vec<SimplexId>> = vec![Vec::new(); x.simplex_count()];
    for (s, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(s);
        }
    }
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        for &c in &children[s] {
            tree_labels[c] = step_labels(x, s, c, &tree_labels[s]);
            order.push(c);
        }
        i += 1;
    }
    let crossings: Vec<(SimplexId, SimplexId)> = (0..x.simplex_count())
        .flat_map(|s| x.neighbors(s).into_iter().filter(move |&t| s < t).map(move |t| (s, t)))
        .filter(|&(s, t)| parent[t] != Some(s) && parent[s] != Some(t))
        .collect();
    let perms: Vec<Perm> = par::map(exec, &crossings, |&(s, t)| {
        let carried = step_labels(x, s, t, &tree_labels[s]);
        // Relabeling tree label ↦ carried label, read at the base.
        let mut p = vec![0; n];
        for (tl, cl) in tree_labels[t].iter().zip(&carried) {
            p[*tl] = *cl;
        }
        Perm(p)
    });
    let mut generators: Vec<Perm> = perms.into_iter().filter(|p| !p.is_identity()).collect();
    generators.sort();
    generators.dedup();
    let group = group_closure(n, &generators);
    let orbits = orbits(n, &generators);
    let q = orbits.len();
    Ok(KHolonomyClassification { k: x.k, base, generators, group, orbits, q, dimension: q - 1, tree_labels })
}

/// The loop through the tree that crosses from `s` to `t`.
pub fn generator_loop(x: &SimplicialComplexK, base: SimplexId, s: SimplexId, t: SimplexId) -> Result<KThickPath, SimplicialError> {
    let parent = x.dual_spanning_tree(base);
    if parent.is_empty() {
        return Err(SimplicialError::Disconnected);
    }
    let up = |mut v: SimplexId| {
        let mut p = vec![v];
        while let Some(q) = parent[v] {
            p.push(q);
            v = q;
        }
        p
    };
    let mut seq: Vec<SimplexId> = up(s).into_iter().rev().collect();
    seq.extend(up(t));
    KThickPath::new(x, seq)
}

/// Covariant constants of the canonical connection: vertex functions with
/// zero sum on every simplex, one per orbit beyond the first.
pub fn covariant_constants_k(x: &SimplicialComplexK, class: &KHolonomyClassification) -> Vec<Vec<Rational>> {
    let first = &class.orbits[0];
    class.orbits[1..]
        .iter()
        .map(|o| {
            let mut c = vec![Rational::zero(); x.k + 1];
            for &i in o {
                c[i] = rat(first.len() as i64);
            }
            for &i in first {
                c[i] = rat(-(o.len() as i64));
            }
            let mut psi = vec![Rational::zero(); x.vertex_count];
            let mut done = vec![false; x.vertex_count];
            for (s, labels) in class.tree_labels.iter().enumerate() {
                for (&v, &l) in x.simplex(s).iter().zip(labels) {
                    if !done[v] {
                        psi[v] = c[l].clone();
                        done[v] = true;
                    }
                }
            }
            psi
        })
        .collect()
}

/// `(Lψ)_P = Σ_{P′} m_{P,P′}ψ_{P′} + n_Pψ_P`.
pub fn assemble_lk(x: &SimplicialComplexK) -> SparseOperator {
    let mut l = SparseOperator::new(x.vertex_count);
    for s in &x.simplices {
        for &p in s {
            for &pp in s {
                l.add(p, pp, Rational::one());
            }
        }
    }
    l
}

/// Null space of `L`.
pub fn zero_modes_k(x: &SimplicialComplexK) -> Vec<Vec<Rational>> {
    assemble_lk(x).to_dense().null_space()
}

/// Two-colouring of the simplices with facet-adjacent ones differing.
pub fn bw_coloring_k(x: &SimplicialComplexK) -> Option<Vec<FaceColor>> {
    let mut color: Vec<Option<FaceColor>> = vec![None; x.simplex_count()];
    for root in 0..x.simplex_count() {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(FaceColor::Black);
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            let c = color[s].expect("coloured");
            for t in x.neighbors(s) {
                match color[t] {
                    None => {
                        color[t] = Some(c.flip());
                        queue.push_back(t);
                    }
                    Some(d) if d == c => return None,
                    Some(_) => {}
                }
            }
        }
    }
    color.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwFactorizationReport {
    /// `ρ₃` is trivial on every generator loop.
    pub rho3_trivial: bool,
    pub coloring_exists: bool,
    /// `L = 2Q_b⁺Q_b`, when a colouring exists.
    pub black_identity: Option<bool>,
    /// `L = 2Q_w⁺Q_w`, when a colouring exists.
    pub white_identity: Option<bool>,
    /// Zero modes of `L` equal the covariant constants.
    pub zero_modes_match: bool,
}

impl BwFactorizationReport {
    pub fn holds(&self) -> bool {
        self.rho3_trivial == self.coloring_exists
            && self.black_identity != Some(false)
            && self.white_identity != Some(false)
            && self.zero_modes_match
    }
}

pub fn bw_factorization_check(x: &SimplicialComplexK) -> Result<BwFactorizationReport, SimplicialError> {
    let class = classify_holonomy_k(x, 0)?;
    let parent = x.dual_spanning_tree(0);
    let depth = |mut s: SimplexId| {
        let mut d = 0usize;
        while let Some(p) = parent[s] {
            d += 1;
            s = p;
        }
        d
    };
    let rho3_trivial = (0..x.simplex_count())
        .flat_map(|s| x.neighbors(s).into_iter().map(move |t| (s, t)))
        .all(|(s, t)| (depth(s) + depth(t) + 1) % 2 == 0 || parent[t] == Some(s) || parent[s] == Some(t));
    let coloring = bw_coloring_k(x);
    let l = assemble_lk(x).to_dense();
    let check = |c: FaceColor| {
        coloring.as_ref().map(|col| {
            let fam: Vec<SimplexId> = (0..x.simplex_count()).filter(|&s| col[s] == c).collect();
            let q = x.q_matrix(&fam);
            let qtq = &q.transpose() * &q;
            let two = rat(2);
            (0..x.vertex_count).all(|i| (0..x.vertex_count).all(|j| two.clone() * qtq[(i, j)].clone() == l[(i, j)]))
        })
    };
    let zero_modes_match = same_subspace(&zero_modes_k(x), &covariant_constants_k(x, &class));
    Ok(BwFactorizationReport {
        rho3_trivial,
        coloring_exists: coloring.is_some(),
        black_identity: check(FaceColor::Black),
        white_identity: check(FaceColor::White),
        zero_modes_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cycles() {
        let c6 = SimplicialComplexK::new(&fixtures::cycle_graph(6)).unwrap();
        let h = classify_holonomy_k(&c6, 0).unwrap();
        assert_eq!((h.q, h.dimension, h.order()), (2, 1, 1));
        let modes = zero_modes_k(&c6);
        assert_eq!(modes.len(), 1);
        assert!(same_subspace(&modes, &[(0..6).map(|i| rat(if i % 2 == 0 { 1 } else { -1 })).collect()]));

        let c5 = SimplicialComplexK::new(&fixtures::cycle_graph(5)).unwrap();
        let h = classify_holonomy_k(&c5, 0).unwrap();
        assert_eq!((h.q, h.dimension), (1, 0));
        assert_eq!(h.generators, vec![Perm(vec![1, 0])]);
        assert!(zero_modes_k(&c5).is_empty());
    }

    #[test]
    fn octahedron_k2() {
        let x = SimplicialComplexK::from_surface(&fixtures::octahedron());
        assert!(canonical_local_holonomy_ok(&x).unwrap());
        let h = classify_holonomy_k(&x, 0).unwrap();
        assert_eq!((h.q, h.dimension, h.order()), (3, 2, 1));
        let r = bw_factorization_check(&x).unwrap();
        assert!(r.holds() && r.coloring_exists && r.black_identity == Some(true));
    }

    #[test]
    fn simplex_boundary_rejected() {
        let x = SimplicialComplexK::manifold(&fixtures::simplex_boundary(4)).unwrap();
        assert_eq!(x.k(), 3);
        assert!(x.ridge_valences().values().all(|&v| v == 3));
        assert!(!canonical_local_holonomy_ok(&x).unwrap());
        assert!(matches!(classify_holonomy_k(&x, 0), Err(SimplicialError::LocalHolonomyNontrivial { valence: 3, .. })));
        let edge = x.ridge_valences().keys().next().unwrap().clone();
        assert!(!local_holonomy_k(&x, &edge).unwrap().is_identity());
    }

    #[test]
    fn cross_polytope_k3() {
        let x = SimplicialComplexK::manifold(&fixtures::cross_polytope_boundary(4)).unwrap();
        assert!(canonical_local_holonomy_ok(&x).unwrap());
        for r in x.ridge_valences().keys() {
            assert!(local_holonomy_k(&x, r).unwrap().is_identity());
        }
        let h = classify_holonomy_k(&x, 0).unwrap();
        assert_eq!((h.q, h.dimension), (4, 3));
        assert!(bw_factorization_check(&x).unwrap().holds());
    }

    #[test]
    fn not_a_manifold() {
        let x = SimplicialComplexK::new(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]).unwrap();
        assert!(matches!(canonical_local_holonomy_ok(&x), Err(SimplicialError::NotAManifold { count: 3, .. })));
    }

    #[test]
    fn input_validation() {
        assert_eq!(SimplicialComplexK::new(&[]).unwrap_err(), SimplicialError::Empty);
        assert!(matches!(SimplicialComplexK::new(&[vec![0, 1], vec![1, 2, 3]]), Err(SimplicialError::ArityMismatch { .. })));
        assert!(matches!(SimplicialComplexK::new(&[vec![0, 0]]), Err(SimplicialError::DegenerateSimplex { .. })));
        assert!(matches!(SimplicialComplexK::new(&[vec![0, 1], vec![1, 0]]), Err(SimplicialError::DuplicateSimplex { .. })));
        assert!(matches!(SimplicialComplexK::new(&[vec![0, 2]]), Err(SimplicialError::IsolatedVertex { vertex: 1 })));
    }

    #[test]
    fn perm_basics() {
        let p = Perm(vec![1, 2, 0]);
        assert_eq!(p.sign(), 1);
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(Perm(vec![1, 0, 2]).sign(), -1);
    }
}
