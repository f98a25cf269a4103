#![allow(dead_code)]

use eqfactor::Multigraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_multigraph(rng: &mut ChaCha8Rng, n: usize, m: usize, loops: bool) -> Multigraph {
    let mut g = Multigraph::new(n);
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n);
        while !loops && v == u && n > 1 {
            v = rng.gen_range(0..n);
        }
        g.add_edge(u, v);
    }
    g
}

/// A random spanning tree plus `extra` random edges.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize, loops: bool) -> Multigraph {
    let mut g = Multigraph::new(n);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v);
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n);
        while !loops && v == u && n > 1 {
            v = rng.gen_range(0..n);
        }
        g.add_edge(u, v);
    }
    g
}

/// Sides `0..a` and `a..n`, each edge joining the two.
pub fn random_bipartite(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Multigraph {
    let a = rng.gen_range(1..n);
    let mut g = Multigraph::new(n);
    for _ in 0..m {
        g.add_edge(rng.gen_range(0..a), rng.gen_range(a..n));
    }
    g
}

/// Every multigraph on `n` vertices whose pair and loop multiplicities sum
/// to at most `max_edges`.
pub fn all_multigraphs(n: usize, max_edges: usize) -> Vec<Multigraph> {
    let mut slots = Vec::new();
    for u in 0..n {
        for v in u..n {
            slots.push((u, v));
        }
    }
    let mut out = Vec::new();
    let mut mult = vec![0usize; slots.len()];
    fill(&slots, 0, max_edges, &mut mult, n, &mut out);
    out
}

fn fill(slots: &[(usize, usize)], i: usize, left: usize, mult: &mut Vec<usize>, n: usize, out: &mut Vec<Multigraph>) {
    if i == slots.len() {
        let mut g = Multigraph::new(n);
        for (s, &c) in slots.iter().zip(mult.iter()) {
            for _ in 0..c {
                g.add_edge(s.0, s.1);
            }
        }
        out.push(g);
        return;
    }
    for c in 0..=left {
        mult[i] = c;
        fill(slots, i + 1, left - c, mult, n, out);
    }
    mult[i] = 0;
}
