use std::collections::{BTreeMap, VecDeque};

use proptest::prelude::*;
use rand::Rng;

use triholo::connection::{
    classify_holonomy_with, connection_from_representation, holonomy_in_frame, DiscreteConnection,
};
use triholo::fixtures;
use triholo::io;
use triholo::lattice::{
    build_green_with, cauchy_reconstruct_with, extend_holomorphic_with, green_function, LatticeFunction, Rect, Site,
};
use triholo::linalg::Mat2;
use triholo::mesh::{ThickPath, TriangulatedSurface};
use triholo::opalgebra::DifferenceOperator;
use triholo::par::Exec;
use triholo::sample;
use triholo::simplicial::{
    classify_holonomy_k_with, loop_characters, loop_permutation, KThickPath, SimplicialComplexK,
};
use triholo::{rat, Rational};

/// Random walk of `len` steps from `start`, closed by a shortest path back.
fn random_loop(
    rng: &mut impl Rng,
    start: usize,
    len: usize,
    neighbors: impl Fn(usize) -> Vec<usize>,
) -> Vec<usize> {
    let mut walk = vec![start];
    for _ in 0..len {
        let nb = neighbors(*walk.last().unwrap());
        walk.push(nb[rng.random_range(0..nb.len())]);
    }
    let end = *walk.last().unwrap();
    let mut parent: BTreeMap<usize, usize> = BTreeMap::from([(start, start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for v in neighbors(u) {
            if !parent.contains_key(&v) {
                parent.insert(v, u);
                queue.push_back(v);
            }
        }
    }
    let mut cur = end;
    while cur != start {
        cur = parent[&cur];
        walk.push(cur);
    }
    if walk.len() == 1 {
        let nb = neighbors(start)[0];
        walk.extend([nb, start]);
    }
    walk
}

fn surface_loop(rng: &mut impl Rng, s: &TriangulatedSurface, len: usize) -> ThickPath {
    ThickPath::from_triangles(random_loop(rng, 0, len, |t| s.adjacent_triangles(t)))
}

fn complex_loop(rng: &mut impl Rng, x: &SimplicialComplexK, start: usize, len: usize) -> KThickPath {
    KThickPath::new(x, random_loop(rng, start, len, |s| x.neighbors(s))).unwrap()
}

fn random_commuting_pair(rng: &mut impl Rng) -> (Mat2, Mat2) {
    let mut d = || sample::nonzero_rational(rng, 4, 3);
    let (a1, a2, b1, b2) = (d(), d(), d(), d());
    let conj = Mat2::from_ints(2, 1, 1, 1);
    let inv = conj.inverse().unwrap();
    let a = &(&inv * &Mat2::new(a1, rat(0), rat(0), a2)) * &conj;
    let b = &(&inv * &Mat2::new(b1, rat(0), rat(0), b2)) * &conj;
    (a, b)
}

/// A flat connection on the `N = 4` torus from a random commuting pair.
fn torus_connection(seed: u64, s: &TriangulatedSurface) -> DiscreteConnection<'_> {
    let n = 4usize;
    let mut rng = sample::rng(seed);
    let (a, b) = random_commuting_pair(&mut rng);
    let step = |p: usize, q: usize| {
        let d = (q as i64 - p as i64 + 1).rem_euclid(n as i64) - 1;
        (p as i64 + d - q as i64) / n as i64
    };
    let pow = |m: &Mat2, k: i64| if k < 0 { m.inverse().unwrap().pow(k.unsigned_abs() as u32) } else { m.pow(k as u32) };
    let mut edges = BTreeMap::new();
    for (e, _) in s.edges() {
        for (p, q) in [(e.a, e.b), (e.b, e.a)] {
            edges.insert((p, q), &pow(&a, step(p % n, q % n)) * &pow(&b, step(p / n, q / n)));
        }
    }
    connection_from_representation(s, &edges, seed).unwrap().connection
}

fn frame(s: &TriangulatedSurface) -> (usize, usize) {
    let t = s.triangle(0);
    (t[0], t[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn holonomy_is_multiplicative_and_inverts(seed in any::<u64>(), l1 in 1usize..12, l2 in 1usize..12) {
        let s = fixtures::torus(4);
        let conn = torus_connection(seed, &s);
        let mut rng = sample::rng(seed ^ 1);
        let (a, b) = (surface_loop(&mut rng, &s, l1), surface_loop(&mut rng, &s, l2));
        let f = frame(&s);
        let ra = holonomy_in_frame(&conn, &a, f).unwrap();
        let rb = holonomy_in_frame(&conn, &b, f).unwrap();
        let rab = holonomy_in_frame(&conn, &a.concat(&b).unwrap(), f).unwrap();
        prop_assert_eq!(rab, &ra * &rb);
        let rinv = holonomy_in_frame(&conn, &a.reversed(), f).unwrap();
        prop_assert!((&ra * &rinv).is_identity());
    }

    #[test]
    fn holonomy_is_homotopy_invariant(seed in any::<u64>(), len in 1usize..12) {
        let s = fixtures::torus(4);
        let conn = torus_connection(seed, &s);
        let mut rng = sample::rng(seed ^ 2);
        let path = surface_loop(&mut rng, &s, len);
        let f = frame(&s);
        let r = holonomy_in_frame(&conn, &path, f).unwrap();
        let pos = rng.random_range(0..path.triangles().len());
        let t = path.triangles()[pos];
        let nb = s.adjacent_triangles(t);
        let back = path.with_backtrack(&s, pos, nb[rng.random_range(0..nb.len())]).unwrap();
        prop_assert_eq!(holonomy_in_frame(&conn, &back, f).unwrap(), r.clone());
        let v = s.triangle(t)[rng.random_range(0..3)];
        let turned = path.with_star_turn(&s, pos, v).unwrap();
        prop_assert_eq!(holonomy_in_frame(&conn, &turned, f).unwrap(), r);
    }

    #[test]
    fn loop_characters_multiply(seed in any::<u64>(), len in 1usize..16) {
        let mut rng = sample::rng(seed);
        let complexes = [
            SimplicialComplexK::new(&fixtures::cycle_graph(6)).unwrap(),
            SimplicialComplexK::new(&fixtures::cycle_graph(7)).unwrap(),
            SimplicialComplexK::from_surface(&fixtures::octahedron()),
            SimplicialComplexK::from_surface(&fixtures::torus(3)),
            SimplicialComplexK::from_surface(&fixtures::icosahedron()),
            SimplicialComplexK::manifold(&fixtures::cross_polytope_boundary(4)).unwrap(),
            SimplicialComplexK::manifold(&fixtures::simplex_boundary(4)).unwrap(),
        ];
        for x in &complexes {
            let start = rng.random_range(0..x.simplex_count());
            let path = complex_loop(&mut rng, x, start, len);
            let (r1, r2, r3) = loop_characters(x, &path).unwrap();
            prop_assert_eq!(r3, r1 * r2, "k = {}, loop {:?}", x.k(), path.simplices());
        }
    }

    #[test]
    fn elementary_insertion_keeps_permutation(seed in any::<u64>(), len in 1usize..16) {
        let mut rng = sample::rng(seed);
        // Complexes whose canonical connection has trivial local holonomy.
        let complexes = [
            SimplicialComplexK::new(&fixtures::cycle_graph(5)).unwrap(),
            SimplicialComplexK::from_surface(&fixtures::octahedron()),
            SimplicialComplexK::from_surface(&fixtures::torus(4)),
            SimplicialComplexK::manifold(&fixtures::cross_polytope_boundary(4)).unwrap(),
        ];
        for x in &complexes {
            let path = complex_loop(&mut rng, x, 0, len);
            let p = loop_permutation(x, &path).unwrap();
            let at = rng.random_range(0..path.simplices().len());
            let s = path.simplices()[at];
            let nb = x.neighbors(s);
            let back = KThickPath::new(x, vec![s, nb[rng.random_range(0..nb.len())], s]).unwrap();
            let q = path.with_elementary_loop(x, at, &back).unwrap();
            prop_assert_eq!(loop_permutation(x, &q).unwrap(), p.clone());
            if x.k() >= 2 {
                // A full turn around a (k−2)-face of `s`, entered at `s`.
                let simplex = x.simplex(s).to_vec();
                let ridge: Vec<usize> = simplex.iter().copied().skip(2).collect();
                let turn = KThickPath::new(x, rotate_to(x, &ridge, s)).unwrap();
                let q = path.with_elementary_loop(x, at, &turn).unwrap();
                prop_assert_eq!(loop_permutation(x, &q).unwrap(), p.clone());
            }
        }
    }

    #[test]
    fn adjoint_reverses_products(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let rect = Rect::square(-6, 6);
        let a = random_op(&mut rng, rect);
        let b = random_op(&mut rng, rect);
        let lhs = a.compose(&b).unwrap().adjoint().unwrap();
        let rhs = b.adjoint().unwrap().compose(&a.adjoint().unwrap()).unwrap();
        let w = Rect::square(-2, 2);
        prop_assert!(lhs.equal_on_window(&rhs, w).unwrap());
        prop_assert!(a.adjoint().unwrap().adjoint().unwrap().equal_on_window(&a, w).unwrap());
    }

    #[test]
    fn sequential_and_parallel_agree(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let w = Rect::square(-3, 14);
        prop_assert_eq!(build_green_with(Exec::Sequential, w), build_green_with(Exec::Parallel, w));

        let domain = sample::random_lattice_domain(&mut rng, Site::ORIGIN, 30);
        let data = sample::random_trefoil(&mut rng, Site::ORIGIN, 8);
        let targets: Vec<Site> = domain.vertices().into_iter().collect();
        let psi = extend_holomorphic_with(Exec::Sequential, &data, targets.iter().copied()).unwrap();
        prop_assert_eq!(&psi, &extend_holomorphic_with(Exec::Parallel, &data, targets.iter().copied()).unwrap());
        let b = psi.restrict(domain.boundary_vertices()).unwrap();
        prop_assert_eq!(
            cauchy_reconstruct_with(Exec::Sequential, &domain, &b, green_function).unwrap(),
            cauchy_reconstruct_with(Exec::Parallel, &domain, &b, green_function).unwrap()
        );

        let s = fixtures::torus(4);
        let conn = torus_connection(seed, &s);
        let h1 = classify_holonomy_with(Exec::Sequential, &conn).unwrap();
        let h2 = classify_holonomy_with(Exec::Parallel, &conn).unwrap();
        prop_assert_eq!(h1.matrices, h2.matrices);
        let x = SimplicialComplexK::manifold(&fixtures::cross_polytope_boundary(4)).unwrap();
        let k1 = classify_holonomy_k_with(&x, 0, Exec::Sequential).unwrap();
        let k2 = classify_holonomy_k_with(&x, 0, Exec::Parallel).unwrap();
        prop_assert_eq!(k1.generators, k2.generators);
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let s = fixtures::torus(rng.random_range(3..=6));
        let back = io::parse_surface(&io::write_surface(&s)).unwrap();
        prop_assert_eq!(back.triangles(), s.triangles());

        let conn = DiscreteConnection::new(&s, sample::random_coefficients(&mut rng, s.triangle_count())).unwrap();
        let parsed = io::parse_connection(&io::write_connection(&conn), &s).unwrap();
        for t in 0..s.triangle_count() {
            prop_assert_eq!(parsed.coefficients(t), conn.coefficients(t));
        }

        let f = LatticeFunction::from_fn(Rect::square(-3, 3).sites(), |_| sample::small_rational(&mut sample::rng(seed), 7, 5));
        prop_assert_eq!(io::parse_lattice_function(&io::write_lattice_function(&f)).unwrap(), f);

        let d = sample::random_lattice_domain(&mut rng, Site::new(2, -1), 20);
        let tris: Vec<_> = d.triangles().iter().copied().collect();
        prop_assert_eq!(io::parse_lattice_domain(&io::write_lattice_domain(&tris)).unwrap(), tris);

        let x = SimplicialComplexK::manifold(&fixtures::cross_polytope_boundary(rng.random_range(2..=4))).unwrap();
        let y = io::parse_complex(&io::write_complex(&x)).unwrap();
        prop_assert_eq!(y.simplices(), x.simplices());
    }
}

fn random_op(rng: &mut impl Rng, rect: Rect) -> DifferenceOperator<Rational> {
    let mut op = DifferenceOperator::<Rational>::zero(rect);
    for _ in 0..rng.random_range(1..=4) {
        let alpha = (rng.random_range(-1..=1), rng.random_range(-1..=1));
        let vals: BTreeMap<Site, Rational> = rect.sites().map(|n| (n, sample::small_rational(rng, 5, 3))).collect();
        op = op.with_term(alpha, |n| vals[&n].clone());
    }
    op
}

/// The simplices around `ridge` as a loop starting and ending at `s`.
fn rotate_to(x: &SimplicialComplexK, ridge: &[usize], s: usize) -> Vec<usize> {
    let contains = |t: usize| ridge.iter().all(|v| x.simplex(t).contains(v));
    let mut seq = vec![s];
    let (mut prev, mut cur) = (usize::MAX, s);
    loop {
        let next = x.neighbors(cur).into_iter().find(|&t| t != prev && contains(t)).unwrap();
        seq.push(next);
        if next == s {
            return seq;
        }
        prev = cur;
        cur = next;
    }
}
