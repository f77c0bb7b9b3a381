use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polytope_fem::{quadrature_rule, ReferenceSimplex, ScalarFamily, VectorElement, VectorFamily};

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("element construction");
    for (f, p, s) in [
        (VectorFamily::N2, 3, ReferenceSimplex::Triangle),
        (VectorFamily::N1, 3, ReferenceSimplex::Triangle),
        (VectorFamily::Bdm, 3, ReferenceSimplex::Tetrahedron),
    ] {
        g.bench_function(BenchmarkId::new(format!("{f} {}", s.name()), p), |b| {
            b.iter(|| VectorElement::new(f, p, s, ScalarFamily::Bernstein).unwrap())
        });
    }
    g.finish();
}

fn tabulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("tabulate on a quadrature rule");
    for (f, p, s) in [
        (VectorFamily::N2, 2, ReferenceSimplex::Triangle),
        (VectorFamily::N1, 2, ReferenceSimplex::Triangle),
        (VectorFamily::N2, 2, ReferenceSimplex::Tetrahedron),
    ] {
        let e = VectorElement::new(f, p, s, ScalarFamily::Lagrange).unwrap();
        let rule = quadrature_rule(s.dim(), 2 * p + 2).unwrap();
        g.bench_function(BenchmarkId::new(format!("{f} {}", s.name()), p), |b| {
            b.iter(|| {
                for x in &rule.points {
                    black_box(e.tabulate(x));
                }
            })
        });
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    c.bench_function("tetrahedron rule degree 10", |b| b.iter(|| quadrature_rule(3, black_box(10)).unwrap()));
}

criterion_group!(benches, construction, tabulation, quadrature);
criterion_main!(benches);
