use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use triholo::connection::{classify_holonomy_with, DiscreteConnection};
use triholo::fixtures;
use triholo::lattice::{build_green_with, cauchy_reconstruct_with, extend_holomorphic_with, green_function, Rect, Site};
use triholo::par::Exec;
use triholo::sample;
use triholo::simplicial::{classify_holonomy_k_with, SimplicialComplexK};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn lattice_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("green");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, 160), |b| b.iter(|| build_green_with(exec, Rect::square(0, 160))));
    }
    g.finish();

    let mut rng = sample::rng(1);
    let domain = sample::random_lattice_domain(&mut rng, Site::ORIGIN, 600);
    let targets: Vec<Site> = domain.vertices().into_iter().collect();
    let radius = targets.iter().map(|p| p.hex_norm()).max().unwrap_or(0);
    let data = sample::random_trefoil(&mut rng, Site::ORIGIN, radius);

    let mut g = c.benchmark_group("extend_holomorphic");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, targets.len()), |b| {
            b.iter(|| extend_holomorphic_with(exec, &data, targets.iter().copied()).unwrap())
        });
    }
    g.finish();

    let psi = extend_holomorphic_with(Exec::Parallel, &data, targets.iter().copied()).unwrap();
    let boundary = psi.restrict(domain.boundary_vertices()).unwrap();
    let mut g = c.benchmark_group("cauchy_reconstruct");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, domain.triangles().len()), |b| {
            b.iter(|| cauchy_reconstruct_with(exec, &domain, &boundary, green_function).unwrap())
        });
    }
    g.finish();
}

fn holonomy_kernels(c: &mut Criterion) {
    let s = fixtures::torus(12);
    let conn = DiscreteConnection::canonical(&s);
    let mut g = c.benchmark_group("classify_holonomy");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "torus12"), |b| b.iter(|| classify_holonomy_with(exec, &conn).unwrap()));
    }
    g.finish();

    let x = SimplicialComplexK::manifold(&fixtures::cross_polytope_boundary(6)).unwrap();
    let mut g = c.benchmark_group("classify_holonomy_k");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "cross6"), |b| b.iter(|| classify_holonomy_k_with(&x, 0, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, lattice_kernels, holonomy_kernels);
criterion_main!(benches);
