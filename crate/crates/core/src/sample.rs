//! Seeded random inputs for checks, benches and the command line.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{extend_holomorphic_with, LatticeDomain, LatticeError, LatticeFunction, LatticeTriangle, Rect, Site, TrefoilData};
use crate::mesh::FaceColor;
use crate::opalgebra::SchrodingerOperator;
use crate::par::Exec;
use crate::scalar::{frac, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ num` and `1 ≤ q ≤ den`.
pub fn small_rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    frac(rng.random_range(-num..=num), rng.random_range(1..=den))
}

pub fn nonzero_rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    let p = rng.random_range(1..=num) * if rng.random_bool(0.5) { 1 } else { -1 };
    frac(p, rng.random_range(1..=den))
}

pub fn positive_rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    frac(rng.random_range(1..=num), rng.random_range(1..=den))
}

/// Random values on the trefoil points within `radius`.
pub fn random_trefoil(rng: &mut impl Rng, center: Site, radius: i64) -> TrefoilData {
    let values: BTreeMap<Site, Rational> =
        TrefoilData::points(center, radius).into_iter().map(|p| (p, small_rational(rng, 9, 4))).collect();
    TrefoilData::from_fn(center, radius, |p| values[&p].clone())
}

/// A random holomorphic function on `targets`, extended from random
/// trefoil data at `center`.
pub fn random_holomorphic(
    rng: &mut impl Rng,
    center: Site,
    targets: impl IntoIterator<Item = Site>,
) -> Result<LatticeFunction, LatticeError> {
    random_holomorphic_with(Exec::default(), rng, center, targets)
}

pub fn random_holomorphic_with(
    exec: Exec,
    rng: &mut impl Rng,
    center: Site,
    targets: impl IntoIterator<Item = Site>,
) -> Result<LatticeFunction, LatticeError> {
    let targets: Vec<Site> = targets.into_iter().collect();
    let radius = targets.iter().map(|&p| (p - center).hex_norm()).max().unwrap_or(0);
    let data = random_trefoil(rng, center, radius);
    extend_holomorphic_with(exec, &data, targets)
}

/// A connected domain of about `size` triangles grown from `T^b_center`.
pub fn random_lattice_domain(rng: &mut impl Rng, center: Site, size: usize) -> LatticeDomain {
    let start = LatticeTriangle::black(center);
    let mut tris: BTreeSet<LatticeTriangle> = BTreeSet::from([start]);
    let mut frontier: Vec<LatticeTriangle> = start.neighbors().to_vec();
    while tris.len() < size.max(1) && !frontier.is_empty() {
        let i = rng.random_range(0..frontier.len());
        let t = frontier.swap_remove(i);
        if tris.insert(t) {
            frontier.extend(t.neighbors().into_iter().filter(|n| !tris.contains(n)));
        }
    }
    LatticeDomain::new(tris).expect("nonempty")
}

/// A positive self-adjoint seven-point operator on `rect` with rational
/// weights.
pub fn random_schrodinger(rng: &mut impl Rng, rect: Rect) -> SchrodingerOperator<Rational> {
    let big = rect.inset(-1, -1, -1, -1);
    let mut edges: BTreeMap<(Site, Site), Rational> = BTreeMap::new();
    let mut diag: BTreeMap<Site, Rational> = BTreeMap::new();
    for n in big.sites() {
        diag.insert(n, positive_rational(rng, 40, 3));
        for d in [Site::new(1, 0), Site::new(0, 1), Site::new(-1, 1)] {
            let (a, b) = (n, n + d);
            let key = if a < b { (a, b) } else { (b, a) };
            edges.insert(key, positive_rational(rng, 7, 5));
        }
    }
    SchrodingerOperator::from_weights(rect, |n| diag[&n].clone(), |a, b| edges[&(a, b)].clone())
}

/// A connected graph on `n` vertices: a random spanning tree plus extra
/// edges. With `bipartite` the extra edges respect the tree's two-colouring.
pub fn random_graph(rng: &mut impl Rng, n: usize, extra: usize, bipartite: bool) -> Vec<Vec<usize>> {
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut side = vec![0u8; n];
    for v in 1..n {
        let u = rng.random_range(0..v);
        side[v] = 1 - side[u];
        edges.insert((u, v));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !bipartite || side[a] != side[b])
        .collect();
    for _ in 0..extra {
        if let Some(&e) = pairs.choose(rng) {
            edges.insert(e);
        }
    }
    edges.into_iter().map(|(a, b)| vec![a, b]).collect()
}

/// Random nonzero coefficients for every triangle of a surface.
pub fn random_coefficients(rng: &mut impl Rng, triangles: usize) -> Vec<[Rational; 3]> {
    (0..triangles)
        .map(|_| [nonzero_rational(rng, 5, 4), nonzero_rational(rng, 5, 4), nonzero_rational(rng, 5, 4)])
        .collect()
}

/// Random colour for a lattice triangle.
pub fn random_color(rng: &mut impl Rng) -> FaceColor {
    if rng.random_bool(0.5) {
        FaceColor::Black
    } else {
        FaceColor::White
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::first_non_holomorphic;

    #[test]
    fn seeded_and_holomorphic() {
        let a = random_holomorphic(&mut rng(7), Site::new(1, 1), Rect::square(-3, 3).sites()).unwrap();
        let b = random_holomorphic(&mut rng(7), Site::new(1, 1), Rect::square(-3, 3).sites()).unwrap();
        assert_eq!(a, b);
        assert_eq!(first_non_holomorphic(&a), None);
    }

    #[test]
    fn graph_shapes() {
        let mut r = rng(3);
        let g = random_graph(&mut r, 8, 6, true);
        assert!(g.len() >= 7);
        let d = random_lattice_domain(&mut r, Site::ORIGIN, 25);
        assert_eq!(d.triangles().len(), 25);
    }
}
