use criterion::{black_box, criterion_group, criterion_main, Criterion};
use eqfactor::bipartite::dewerra_factorize;
use eqfactor::degree_bounded::hilton_parity_factorize;
use eqfactor::equitable::equitable_factorize;
use eqfactor::parity_epsilon::{epsilon_parity_factor, RatioSpec, Rational};
use eqfactor::{Multigraph, Preconditions};

/// Circulant multigraph: vertex i joined to i+1 and i+2, each `mult` times.
fn circulant(n: usize, mult: usize) -> Multigraph {
    let mut g = Multigraph::new(n);
    for i in 0..n {
        for _ in 0..mult {
            g.add_edge(i, (i + 1) % n);
            g.add_edge(i, (i + 2) % n);
        }
    }
    g
}

fn complete_bipartite(a: usize, b: usize, mult: usize) -> Multigraph {
    let mut g = Multigraph::new(a + b);
    for u in 0..a {
        for v in a..a + b {
            for _ in 0..mult {
                g.add_edge(u, v);
            }
        }
    }
    g
}

fn benches(c: &mut Criterion) {
    let g = circulant(9, 3);
    c.bench_function("equitable k=3 circulant", |b| {
        b.iter(|| equitable_factorize(black_box(&g), 3, Preconditions::Assume).unwrap())
    });
    let h = complete_bipartite(6, 6, 2);
    c.bench_function("dewerra k=4 K6,6", |b| b.iter(|| dewerra_factorize(black_box(&h), 4).unwrap()));
    c.bench_function("hilton k=3 circulant", |b| b.iter(|| hilton_parity_factorize(black_box(&g), 3).unwrap()));
    let e = circulant(8, 2);
    let spec = RatioSpec { eps: Rational::new(1, 2), v0: (1 << 8) - 1, v1: 0, v1p: 0, fpar: vec![0; 8], z: None };
    c.bench_function("epsilon 1/2 circulant", |b| {
        b.iter(|| epsilon_parity_factor(black_box(&e), &spec, Preconditions::Assume).unwrap())
    });
}

criterion_group!(pipelines, benches);
criterion_main!(pipelines);
