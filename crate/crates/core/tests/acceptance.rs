//! Acceptance criteria. Each prints one PASS/FAIL line with its runtime
//! against the limit; the process exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use petgraph::algo::is_bipartite_undirected;
use petgraph::graph::UnGraph;
use rand::Rng;

use triholo::connection::{
    classify_holonomy, connection_from_representation, holonomy_matrix, local_holonomy, local_holonomy_matrix,
    DiscreteConnection, GroupTag,
};
use triholo::fixtures;
use triholo::lattice::{
    build_green, build_green_by_expansion, cauchy_reconstruct, green, green_function, poly_space_basis,
    qplus_at, taylor_coefficients, taylor_coefficients_by_residual, taylor_partial_sum, AdmissibleSequence,
    LatticePatch, LatticeTriangle, Rect, Site,
};
use triholo::linalg::{rank_of, Mat2, Matrix};
use triholo::mesh::{FaceColor, SubComplexDomain, TriangulatedSurface};
use triholo::opalgebra::{
    f_criterion, factorize, verify_qcd_identity, verify_qcd_identity_float, DifferenceOperator, ExpParams,
};
use triholo::sample;
use triholo::simplicial::{
    assemble_lk, classify_holonomy_k, zero_modes_k, SimplicialComplexK, SimplicialError,
};
use triholo::solver::{
    assemble_l, check_l_identity, covariant_constants, covariant_constants_by_nullspace, determining_set,
    max_principle_check, same_subspace, solve_bw, zero_modes,
};
use triholo::scalar::Field;
use triholo::{frac, rat, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Dimension law.
fn dimension_law() -> Outcome {
    let seq = AdmissibleSequence::cycling(Site::ORIGIN, 7);
    for k in 0..=6 {
        let tri = seq.triangle(k).map_err(|e| format!("{e}"))?;
        let sites = tri.sites();
        let basis = poly_space_basis(k, &seq, sites.iter().copied()).map_err(|e| format!("k={k}: {e}"))?;
        let vectors: Vec<Vec<Rational>> =
            basis.flat().iter().map(|f| sites.iter().map(|&s| f.value(s).cloned().unwrap()).collect()).collect();
        let rank = rank_of(&vectors);
        ensure(rank == 2 * k + 2, || format!("k={k}: rank {rank}"))?;

        // Second route: the solution space of Q⁺ψ = 0 over the black
        // triangles inside T(k) has the same dimension and contains the basis.
        let index: BTreeMap<Site, usize> = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut rows = Vec::new();
        for &m in &sites {
            let t = LatticeTriangle::black(m);
            if t.vertices().iter().all(|v| index.contains_key(v)) {
                let mut row = vec![Rational::zero(); sites.len()];
                for v in t.vertices() {
                    row[index[&v]] = rat(1);
                }
                rows.push(row);
            }
        }
        let null = Matrix::from_rows(rows).null_space();
        ensure(null.len() == 2 * k + 2, || format!("k={k}: Q+ null space has dimension {}", null.len()))?;
        ensure(same_subspace(&null, &vectors), || format!("k={k}: basis outside the Q+ null space"))?;
    }
    Ok("rank 2k+2 for k = 0..6 by two routes".into())
}

// 2. Green identity.
fn green_identity() -> Outcome {
    let w = Rect::square(-10, 30);
    let g = build_green(Rect { x0: -11, x1: 30, y0: -11, y1: 30 });
    for n in w.sites() {
        let q = qplus_at(&g, n).map_err(|e| format!("{e}"))?;
        let expect = if n == Site::ORIGIN { rat(1) } else { rat(0) };
        ensure(q == expect, || format!("Q+G at {n:?} = {q}"))?;
        // Closed form against the recursively filled table.
        ensure(g.value(n) == Some(&Rational::from_integer(green(n))), || format!("closed form differs at {n:?}"))?;
    }
    let expansion = build_green_by_expansion(Rect::square(-3, 12));
    ensure(expansion.agrees_on(&g, Rect::square(-3, 12).sites()), || "series expansion differs".into())?;
    for (n, v) in [((0, 0), 1), ((1, 0), -1), ((1, 1), 2), ((2, 1), -3)] {
        let s = Site::new(n.0, n.1);
        ensure(g.value(s) == Some(&rat(v)), || format!("G{n:?} = {:?}, table says {v}", g.value(s)))?;
    }
    Ok(format!("Q+G = delta at {} sites, table values match", w.len()))
}

// 3. Cauchy reconstruction.
fn cauchy() -> Outcome {
    let mut rng = sample::rng(3);
    let domains: Vec<_> = (0..20).map(|i| sample::random_lattice_domain(&mut rng, Site::ORIGIN, 12 + 3 * i)).collect();
    let mut cover: BTreeSet<Site> = BTreeSet::new();
    for d in &domains {
        cover.extend(d.vertices());
    }
    let mut checked = 0usize;
    for j in 0..100 {
        let psi = sample::random_holomorphic(&mut rng, Site::ORIGIN, cover.iter().copied()).map_err(|e| format!("{e}"))?;
        let c0 = sample::small_rational(&mut rng, 9, 4);
        let c1 = sample::small_rational(&mut rng, 9, 4);
        let cc = [c0.clone(), c1.clone(), -(c0 + c1)];
        for (i, d) in domains.iter().enumerate() {
            let boundary = psi.restrict(d.boundary_vertices()).map_err(|e| format!("{e}"))?;
            let interior = d.interior_vertices();
            let r = cauchy_reconstruct(d, &boundary, green_function).map_err(|e| format!("{e}"))?;
            ensure(r.agrees_on(&psi, interior.iter().copied()), || format!("psi {j}, domain {i}: G kernel"))?;
            let shifted = cauchy_reconstruct(d, &boundary, |n| green_function(n) + &cc[n.color_class()])
                .map_err(|e| format!("{e}"))?;
            ensure(shifted.agrees_on(&psi, interior.iter().copied()), || format!("psi {j}, domain {i}: G + c kernel"))?;
            checked += interior.len();
        }
    }
    Ok(format!("100 psi x 20 domains, both kernels, {checked} interior values"))
}

// 4. Taylor exactness.
fn taylor() -> Outcome {
    let order = 5;
    let seq = AdmissibleSequence::cycling(Site::ORIGIN, order + 1);
    let top = seq.triangle(order).map_err(|e| format!("{e}"))?.sites();
    let basis = poly_space_basis(order, &seq, top.iter().copied()).map_err(|e| format!("{e}"))?;
    let mut rng = sample::rng(4);
    for j in 0..50 {
        let psi = sample::random_holomorphic(&mut rng, Site::ORIGIN, top.iter().copied()).map_err(|e| format!("{e}"))?;
        let exp = taylor_coefficients(&psi, &basis, order).map_err(|e| format!("{e}"))?;
        for k in 0..=order {
            let tk = seq.triangle(k).unwrap().sites();
            ensure(taylor_partial_sum(&exp, &basis, k).agrees_on(&psi, tk), || format!("psi {j}: S_{k} differs on T({k})"))?;
        }
        ensure(exp.residual_vanishes.iter().all(|&b| b), || format!("psi {j}: residual check"))?;
        let again = taylor_coefficients_by_residual(&psi, &basis, order).map_err(|e| format!("{e}"))?;
        ensure(again == exp.alpha, || format!("psi {j}: coefficient routes differ"))?;
    }
    Ok("50 psi, k = 0..5, partial sums exact, routes agree".into())
}

fn orient(a: &[Rational; 2], b: &[Rational; 2], c: &[Rational; 2]) -> Rational {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// Brute-force hull of `s`: its bounding box and every supporting line
/// through two of its points, found by testing all pairs.
struct BruteHull {
    lo: [Rational; 2],
    hi: [Rational; 2],
    lines: Vec<([Rational; 2], [Rational; 2])>,
}

impl BruteHull {
    fn new(s: &[[Rational; 2]]) -> Self {
        let bound = |i: usize, max: bool| {
            let it = s.iter().map(|q| q[i].clone());
            if max { it.max() } else { it.min() }.unwrap()
        };
        let distinct: Vec<&[Rational; 2]> = s.iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut lines = Vec::new();
        for a in &distinct {
            for b in &distinct {
                if a != b && distinct.iter().all(|c| !orient(a, b, c).is_negative()) {
                    lines.push(((*a).clone(), (*b).clone()));
                }
            }
        }
        BruteHull { lo: [bound(0, false), bound(1, false)], hi: [bound(0, true), bound(1, true)], lines }
    }

    fn contains(&self, p: &[Rational; 2]) -> bool {
        (0..2).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
            && self.lines.iter().all(|(a, b)| !orient(a, b, p).is_negative())
    }
}

// 5. Maximum principle.
fn max_principle() -> Outcome {
    let mut rng = sample::rng(5);
    let patches: Vec<LatticePatch> = (2..=4).map(LatticePatch::hexagon).collect();
    let mut images = 0usize;
    for j in 0..200 {
        let patch = &patches[j % patches.len()];
        let s = patch.surface();
        let coloring = patch.face_coloring();
        let domain = SubComplexDomain::whole(s);
        let fixed: BTreeMap<usize, Rational> = determining_set(&domain, &coloring)
            .into_iter()
            .map(|v| (v, sample::small_rational(&mut rng, 20, 3)))
            .collect();
        let sol = solve_bw(&domain, &coloring, &fixed).map_err(|e| format!("{e}"))?;
        let psi = sol.to_vertex_function(s.vertex_count());
        let r = max_principle_check(&domain, &coloring, &psi).map_err(|e| format!("{e}"))?;
        ensure(r.violations.is_empty() && r.interior_corners.is_empty(), || {
            format!("solution {j}: {} violations, {} interior corners", r.violations.len(), r.interior_corners.len())
        })?;
        let boundary: BTreeSet<usize> = r.boundary_triangles.iter().copied().collect();
        let bpts: Vec<[Rational; 2]> = r.images.iter().filter(|(t, _)| boundary.contains(t)).map(|(_, p)| p.clone()).collect();
        let hull = BruteHull::new(&bpts);
        for (t, p) in &r.images {
            ensure(hull.contains(p), || format!("solution {j}: triangle {t} outside (brute force)"))?;
        }
        images += r.images.len();
    }
    Ok(format!("200 solutions, {images} images inside the boundary hull, zero violations"))
}

/// `(k′, k″)` by solving the triangle equations once around the star of `p`.
fn propagate_star(conn: &DiscreteConnection<'_>, p: usize) -> (Rational, Rational) {
    let s = conn.surface();
    let star = s.star(p);
    let n = star.valence();
    let run = |psi_p: Rational, start: Rational| {
        let mut cur = start;
        for i in 1..=n {
            let t = star.triangle_at(i);
            cur = -(conn.b(t, p) * &psi_p + conn.b(t, star.rim_at(i)) * &cur) / conn.b(t, star.rim_at(i + 1));
        }
        cur
    };
    (run(rat(1), rat(0)), run(rat(0), rat(1)))
}

// 6. Holonomy closed form.
fn holonomy_closed_form() -> Outcome {
    let mut rng = sample::rng(6);
    for j in 0..1000 {
        let n = rng.random_range(3..=9);
        let s = fixtures::star(n);
        let conn = DiscreteConnection::new(&s, sample::random_coefficients(&mut rng, n)).map_err(|e| format!("{e}"))?;
        let h = local_holonomy(&conn, 0).map_err(|e| format!("{e}"))?;
        let (k1, k2) = propagate_star(&conn, 0);
        ensure(h.k1 == k1 && h.k2 == k2, || format!("star {j} (valence {n}): closed form ({}, {}) vs ({k1}, {k2})", h.k1, h.k2))?;
        ensure(local_holonomy_matrix(&conn, 0).unwrap() == h.matrix(), || format!("star {j}: step matrices differ"))?;
    }
    Ok("1000 stars of valence 3..9 agree exactly".into())
}

// 7. Fixture classification.
fn fixture_classification() -> Outcome {
    let cases = [
        ("octahedron", fixtures::octahedron(), GroupTag::Trivial, 2),
        ("torus N=3", fixtures::torus(3), GroupTag::Trivial, 2),
        ("torus N=4", fixtures::torus(4), GroupTag::Z3, 0),
    ];
    let mut parts = Vec::new();
    for (name, s, group, dim) in &cases {
        let conn = DiscreteConnection::canonical(s);
        let h = classify_holonomy(&conn).map_err(|e| format!("{name}: {e}"))?;
        ensure(h.group == *group && h.invariant_dimension == *dim, || {
            format!("{name}: {:?}/{} expected {group:?}/{dim}", h.group, h.invariant_dimension)
        })?;
        let cc = covariant_constants(&conn).map_err(|e| format!("{name}: {e}"))?;
        ensure(cc.dimension() == *dim, || format!("{name}: covariant dimension {}", cc.dimension()))?;
        let zm = zero_modes(&conn);
        ensure(zm.len() == *dim && same_subspace(&zm, &cc.basis), || format!("{name}: zero modes differ"))?;
        ensure(same_subspace(&covariant_constants_by_nullspace(&conn), &cc.basis), || format!("{name}: null space route differs"))?;
        parts.push(format!("{name} {}/{dim}", group.name()));
    }
    Ok(parts.join(", "))
}

/// `QᵀQ` and `−2(D − A) + 3n_P` built directly from the triangle list.
fn l_identity_dense(s: &TriangulatedSurface) -> (Matrix, Matrix) {
    let n = s.vertex_count();
    let mut q = Matrix::zeros(s.triangle_count(), n);
    let mut rhs = Matrix::zeros(n, n);
    for (t, tri) in s.triangles().iter().enumerate() {
        for &v in tri {
            q[(t, v)] = rat(1);
            rhs[(v, v)] = &rhs[(v, v)] + rat(3);
        }
    }
    for (e, _) in s.edges() {
        rhs[(e.a, e.a)] = &rhs[(e.a, e.a)] - rat(2);
        rhs[(e.b, e.b)] = &rhs[(e.b, e.b)] - rat(2);
        rhs[(e.a, e.b)] = &rhs[(e.a, e.b)] + rat(2);
        rhs[(e.b, e.a)] = &rhs[(e.b, e.a)] + rat(2);
    }
    (&q.transpose() * &q, rhs)
}

// 8. Operator identities.
fn operator_identities() -> Outcome {
    let cases = [
        ("octahedron", fixtures::octahedron()),
        ("torus N=3", fixtures::torus(3)),
        ("torus N=4", fixtures::torus(4)),
        ("torus N=6", fixtures::torus(6)),
    ];
    for (name, s) in &cases {
        let r = check_l_identity(s).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.holds(), || format!("{name}: {r:?}"))?;
        ensure(r.black_mismatches.is_some() && r.dual_block_identity == Some(true), || {
            format!("{name}: b/w identities not checked")
        })?;
        let (qtq, rhs) = l_identity_dense(s);
        ensure(qtq == rhs, || format!("{name}: dense Q^T Q differs from -2 Delta + 3 n_P"))?;
        ensure(assemble_l(&DiscreteConnection::canonical(s)).to_dense() == qtq, || format!("{name}: assembled L differs"))?;
    }
    for r in [2, 3] {
        let p = fixtures::hexagon_patch(r);
        let rep = check_l_identity(p.surface()).map_err(|e| format!("hexagon {r}: {e}"))?;
        ensure(rep.holds(), || format!("hexagon {r}: {rep:?}"))?;
    }
    Ok("octahedron, tori N=3,4,6 and hexagon patches: L, Q_b+Q_b, Q_w+Q_w, dual block identity".into())
}

fn random_function(rng: &mut impl Rng, rect: Rect) -> BTreeMap<Site, Rational> {
    rect.sites().map(|n| (n, sample::small_rational(rng, 9, 5))).collect()
}

// 9. Operator algebra suite.
fn opalgebra_suite() -> Outcome {
    let mut rng = sample::rng(9);
    for j in 0..50 {
        let size = rng.random_range(4..=7);
        let l = sample::random_schrodinger(&mut rng, Rect::square(0, size));
        for color in [FaceColor::Black, FaceColor::White] {
            let f = factorize(&l, color).map_err(|e| format!("operator {j}: {e}"))?;
            ensure(f.round_trip(&l).map_err(|e| format!("{e}"))?, || format!("operator {j} {color:?}: coefficients"))?;
            // Apply both sides to a random function on the interior.
            let recomposed = f.recompose().map_err(|e| format!("{e}"))?;
            let psi = random_function(&mut rng, l.operator().rect().inset(-2, -2, -2, -2));
            for n in f.interior.sites() {
                let lhs = l.operator().apply_at(n, |m| psi[&m].clone()).ok_or("outside window")?;
                let rhs = recomposed.apply_at(n, |m| psi[&m].embed()).ok_or("outside window")?;
                ensure(rhs == lhs.embed(), || format!("operator {j} {color:?}: action differs at {n:?}"))?;
            }
        }
    }

    let window = Rect::square(0, 9);
    let exact = [
        (rat(1), rat(1), [[rat(2), rat(4)], [rat(1), rat(2)]]),
        (frac(2, 3), rat(-5), [[frac(1, 2), rat(1)], [frac(1, 4), frac(1, 2)]]),
        (rat(3), frac(1, 7), [[rat(3), rat(1)], [rat(9), rat(3)]]),
    ];
    for (c, d, e) in exact {
        let p = ExpParams { c, d, e };
        let r = verify_qcd_identity(&p, window).map_err(|e| format!("{e}"))?;
        ensure(r.holds, || format!("qcd exact {p:?}"))?;
    }
    let mut worst = 0.0f64;
    for (c, d, l) in [
        (1.0, 1.0, [[0.3, 0.5], [0.1, 0.3]]),
        (0.7, -1.3, [[-0.2, 0.15], [-0.55, -0.2]]),
        (2.0, 0.5, [[0.05, 0.0], [0.1, 0.05]]),
    ] {
        let r = verify_qcd_identity_float(c, d, l, window, 1e-12).map_err(|e| format!("{e}"))?;
        worst = worst.max(r.max_relative_error);
        ensure(r.holds, || format!("qcd float l={l:?}: {}", r.max_relative_error))?;
    }

    let big = Rect::square(-4, 6);
    let qw = DifferenceOperator::<Rational>::identity(big).with_term((1, 0), |_| frac(2, 3)).with_term((0, 1), |_| rat(5));
    let f = f_criterion(&qw, &qw.adjoint().unwrap(), Rect::square(0, 2)).map_err(|e| format!("{e}"))?;
    ensure(f.as_ref().is_some_and(|m| m.values().all(One::is_one)), || format!("constant coefficients: {f:?}"))?;
    let a = random_function(&mut rng, big);
    let b = random_function(&mut rng, big);
    let qw = DifferenceOperator::<Rational>::identity(big)
        .with_term((1, 0), |n| &a[&n] + rat(3))
        .with_term((0, 1), |n| &b[&n] + rat(3));
    let f = f_criterion(&qw, &qw.adjoint().unwrap(), Rect::square(0, 2)).map_err(|e| format!("{e}"))?;
    ensure(f.is_none(), || "generic coefficients admitted an f".into())?;
    Ok(format!("50 factorizations x 2 colours, qcd exact and float (worst {worst:.1e}), f-criterion"))
}

fn wrap_step(n: usize, a: usize, b: usize) -> i64 {
    // Lattice step from coordinate a to b in {−1, 0, 1}, and how many
    // times it crosses the seam.
    let n = n as i64;
    let (a, b) = (a as i64, b as i64);
    let d = (b - a + 1).rem_euclid(n) - 1;
    (a + d - b) / n
}

fn pow_signed(m: &Mat2, k: i64) -> Mat2 {
    let base = if k < 0 { m.inverse().unwrap() } else { m.clone() };
    base.pow(k.unsigned_abs() as u32)
}

/// A flat representation of the torus with holonomy `a` across the `e₁`
/// seam and `b` across the `e₂` seam.
fn torus_representation(n: usize, a: &Mat2, b: &Mat2) -> BTreeMap<(usize, usize), Mat2> {
    let s = fixtures::torus(n);
    let mut out = BTreeMap::new();
    for (e, _) in s.edges() {
        for (p, q) in [(e.a, e.b), (e.b, e.a)] {
            let wx = wrap_step(n, p % n, q % n);
            let wy = wrap_step(n, p / n, q / n);
            out.insert((p, q), &pow_signed(a, wx) * &pow_signed(b, wy));
        }
    }
    out
}

fn ksimplicial_from(s: &TriangulatedSurface) -> SimplicialComplexK {
    SimplicialComplexK::from_surface(s)
}

// 10. Representations, graphs and k-simplices.
fn representation_and_simplicial() -> Outcome {
    let pairs = [
        (Mat2::from_ints(2, 0, 0, 3), Mat2::from_ints(5, 0, 0, 7)),
        (Mat2::from_ints(1, 1, 0, 1), Mat2::from_ints(1, 3, 0, 1)),
        (Mat2::from_ints(2, 1, 1, 1), Mat2::from_ints(5, 3, 3, 2)),
    ];
    for n in [3, 4, 5] {
        let s = fixtures::torus(n);
        for (a, b) in &pairs {
            let edges = torus_representation(n, a, b);
            let rc = connection_from_representation(&s, &edges, 11).map_err(|e| format!("N={n}: {e}"))?;
            let conn = &rc.connection;
            triholo::connection::check_curvature(conn).map_err(|e| format!("N={n}: {e}"))?;
            for (path, want) in [(fixtures::torus_meridian(n), a), (fixtures::torus_longitude(n), b)] {
                let got = holonomy_matrix(conn, &path).map_err(|e| format!("{e}"))?;
                ensure(got.trace() == want.trace() && got.det() == want.det(), || {
                    format!("N={n}: holonomy tr {} det {} vs tr {} det {}", got.trace(), got.det(), want.trace(), want.det())
                })?;
            }
        }
    }

    let mut rng = sample::rng(10);
    let mut bipartite_seen = [0usize; 2];
    for j in 0..20 {
        let n = rng.random_range(4..=12);
        let bip = j % 2 == 0;
        let extra = rng.random_range(0..=n);
        let edges = sample::random_graph(&mut rng, n, extra, bip);
        let x = SimplicialComplexK::new(&edges).map_err(|e| format!("{e}"))?;
        let g = UnGraph::<(), ()>::from_edges(edges.iter().map(|e| (e[0] as u32, e[1] as u32)));
        let oracle = is_bipartite_undirected(&g, 0.into());
        let kernel = !zero_modes_k(&x).is_empty();
        ensure(oracle == kernel, || format!("graph {j}: bipartite {oracle}, kernel {kernel}"))?;
        let h = classify_holonomy_k(&x, 0).map_err(|e| format!("{e}"))?;
        ensure((h.dimension > 0) == oracle, || format!("graph {j}: orbit dimension {}", h.dimension))?;
        bipartite_seen[oracle as usize] += 1;
    }
    ensure(bipartite_seen.iter().all(|&c| c > 0), || format!("graph sample not mixed: {bipartite_seen:?}"))?;

    for (name, s) in [
        ("octahedron", fixtures::octahedron()),
        ("torus N=3", fixtures::torus(3)),
        ("torus N=4", fixtures::torus(4)),
        ("torus N=6", fixtures::torus(6)),
    ] {
        let conn = DiscreteConnection::canonical(&s);
        let h2 = classify_holonomy(&conn).map_err(|e| format!("{e}"))?;
        let x = ksimplicial_from(&s);
        let hk = classify_holonomy_k(&x, 0).map_err(|e| format!("{e}"))?;
        ensure(Some(hk.order()) == h2.order && hk.dimension == h2.invariant_dimension, || {
            format!("{name}: k-route order/dim {}/{} vs {:?}/{}", hk.order(), hk.dimension, h2.order, h2.invariant_dimension)
        })?;
        if h2.group == GroupTag::Trivial {
            ensure(hk.is_trivial(), || format!("{name}: k-route group nontrivial"))?;
        }
        ensure(assemble_lk(&x).to_dense() == assemble_l(&conn).to_dense(), || format!("{name}: L differs"))?;
        ensure(same_subspace(&zero_modes_k(&x), &zero_modes(&conn)), || format!("{name}: zero modes differ"))?;
    }

    let x = SimplicialComplexK::manifold(&fixtures::simplex_boundary(4)).map_err(|e| format!("{e}"))?;
    ensure(
        matches!(classify_holonomy_k(&x, 0), Err(SimplicialError::LocalHolonomyNontrivial { valence: 3, .. })),
        || "boundary of the 4-simplex accepted".into(),
    )?;
    Ok("torus representations N=3,4,5; 20 graphs vs bipartite oracle; k=2 matches surfaces; 4-simplex boundary rejected".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("dimension law", 5, dimension_law),
        ("Green identity", 1, green_identity),
        ("Cauchy reconstruction", 30, cauchy),
        ("Taylor exactness", 30, taylor),
        ("maximum principle", 30, max_principle),
        ("holonomy closed form", 10, holonomy_closed_form),
        ("fixture classification", 10, fixture_classification),
        ("operator identities", 5, operator_identities),
        ("operator algebra", 20, opalgebra_suite),
        ("representations and k-simplices", 20, representation_and_simplicial),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (tag, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over time limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("[{tag}] {:>2}. {name} ({:.2} s / {limit} s): {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
