//! Loopful multigraphs, orientations, residues and the structural transforms
//! used by every other module.
//!
//! Vertex sets are `u64` bitsets, so set-valued arguments need `n <= 64`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Vertex set as a bitset over `0..64`.
pub type VSet = u64;

/// Bitset holding the given vertices.
pub fn vset(vs: &[usize]) -> VSet {
    vs.iter().fold(0, |s, &v| s | (1u64 << v))
}

/// The full set `{0, .., n-1}`.
pub fn full_set(n: usize) -> VSet {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Members of a bitset in increasing order.
pub fn members(s: VSet) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(v)
        }
    })
}

#[inline]
pub fn contains(s: VSet, v: usize) -> bool {
    s >> v & 1 == 1
}

/// `[x]_k`, the representative of `x` in `0..k`.
pub fn residue(x: i64, k: i64) -> Result<i64> {
    if k <= 0 {
        return invalid(format!("modulus must be positive, got {k}"));
    }
    Ok(x.rem_euclid(k))
}

#[inline]
pub(crate) fn rk(x: i64, k: i64) -> i64 {
    x.rem_euclid(k)
}

/// Undirected multigraph; loops and parallel edges allowed. Edge ids are
/// the positions in the edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multigraph {
    n: usize,
    ends: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, ends: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Multigraph::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u},{v}) has an endpoint outside 0..{n}"));
            }
            g.ends.push((u, v));
        }
        Ok(g)
    }

    /// Adds an edge and returns its id. Panics on an out-of-range endpoint.
    pub fn add_edge(&mut self, u: usize, v: usize) -> usize {
        assert!(u < self.n && v < self.n, "endpoint out of range");
        self.ends.push((u, v));
        self.ends.len() - 1
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn edge_list(&self) -> &[(usize, usize)] {
        &self.ends
    }

    /// `(id, u, v)` in id order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.ends.iter().enumerate().map(|(e, &(u, v))| (e, u, v))
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (u, v) = self.ends[e];
        u == v
    }

    pub fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.ends
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.ends {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Degrees of the spanning subgraph with the given edge ids.
    pub fn degrees_of(&self, edge_ids: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in edge_ids {
            let (u, v) = self.ends[e];
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.ends.iter().filter(|&&(a, b)| a == v && b == v).count()
    }

    pub fn has_loops(&self) -> bool {
        self.ends.iter().any(|&(a, b)| a == b)
    }

    /// Incident edge ids; a loop is listed once.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        self.edges()
            .filter(|&(_, a, b)| a == v || b == v)
            .map(|(e, _, _)| e)
            .collect()
    }

    /// Adjacency as `(edge id, neighbour)` lists; a loop appears once.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (e, u, v) in self.edges() {
            adj[u].push((e, v));
            if u != v {
                adj[v].push((e, u));
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().filter(|c| !c.is_empty()).count() <= 1
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = Dsu::new(self.n);
        for &(u, v) in &self.ends {
            dsu.union(u, v);
        }
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for v in 0..self.n {
            by_root[dsu.find(v)].push(v);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }

    /// A 2-colouring (`false`/`true` per vertex) if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let adj = self.adjacency();
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                let su = side[u].unwrap();
                for &(_, w) in &adj[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            stack.push(w);
                        }
                        Some(sw) if sw == su => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }

    pub fn is_eulerian(&self) -> bool {
        self.degrees().iter().all(|d| d % 2 == 0)
    }

    /// Spanning subgraph on the listed edges, with the new-to-old edge map.
    pub fn spanning_subgraph(&self, edge_ids: &[usize]) -> (Multigraph, Vec<usize>) {
        let mut h = Multigraph::new(self.n);
        for &e in edge_ids {
            let (u, v) = self.ends[e];
            h.add_edge(u, v);
        }
        (h, edge_ids.to_vec())
    }
}

/// Union-find over `0..n`.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Direction of every edge, stored as the tail endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orientation {
    tails: Vec<usize>,
}

impl Orientation {
    pub fn new(g: &Multigraph, tails: Vec<usize>) -> Result<Self> {
        if tails.len() != g.num_edges() {
            return invalid("orientation must cover every edge exactly once");
        }
        for (e, &t) in tails.iter().enumerate() {
            let (u, v) = g.ends(e);
            if t != u && t != v {
                return invalid(format!("tail {t} is not an endpoint of edge {e}"));
            }
        }
        Ok(Orientation { tails })
    }

    /// Every edge directed from its first listed endpoint.
    pub fn as_listed(g: &Multigraph) -> Self {
        Orientation { tails: g.edges().map(|(_, u, _)| u).collect() }
    }

    pub fn tail(&self, e: usize) -> usize {
        self.tails[e]
    }

    pub fn head(&self, g: &Multigraph, e: usize) -> usize {
        g.other(e, self.tails[e])
    }

    pub fn tails(&self) -> &[usize] {
        &self.tails
    }

    pub fn out_degrees(&self, g: &Multigraph) -> Vec<usize> {
        let mut d = vec![0; g.n()];
        for &t in &self.tails {
            d[t] += 1;
        }
        d
    }

    pub fn in_degrees(&self, g: &Multigraph) -> Vec<usize> {
        let mut d = vec![0; g.n()];
        for e in 0..self.tails.len() {
            d[self.head(g, e)] += 1;
        }
        d
    }

    pub fn reverse(&mut self, g: &Multigraph, e: usize) {
        self.tails[e] = g.other(e, self.tails[e]);
    }
}

/// Bipartite host produced by splitting every vertex in two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitGraph {
    pub host: Multigraph,
    /// `image[v] = (v1, v2)`; `v1` lies in the first part.
    pub image: Vec<(usize, usize)>,
    /// Old edge id to host edge id.
    pub edge_map: Vec<usize>,
}

impl SplitGraph {
    pub fn first_part(&self) -> VSet {
        vset(&self.image.iter().map(|&(a, _)| a).collect::<Vec<_>>())
    }

    pub fn second_part(&self) -> VSet {
        vset(&self.image.iter().map(|&(_, b)| b).collect::<Vec<_>>())
    }

    /// Maps a host edge id back to the original edge id.
    pub fn pull_back(&self) -> Vec<usize> {
        let mut back = vec![usize::MAX; self.host.num_edges()];
        for (old, &new) in self.edge_map.iter().enumerate() {
            back[new] = old;
        }
        back
    }
}

/// `d_G(A)`, `d_G(A,B)` and `e_G(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryCounts {
    pub boundary: usize,
    pub between: Option<usize>,
    pub inside: usize,
}

pub fn boundary_counts(g: &Multigraph, a: VSet, b: Option<VSet>) -> Result<BoundaryCounts> {
    let all = full_set(g.n());
    if a & !all != 0 || b.is_some_and(|b| b & !all != 0) {
        return invalid("vertex set outside V(G)");
    }
    if let Some(b) = b {
        if a & b != 0 {
            return invalid("A and B must be disjoint");
        }
    }
    Ok(BoundaryCounts {
        boundary: cut(g, a),
        between: b.map(|b| between(g, a, b)),
        inside: inside(g, a),
    })
}

/// Non-loop edges with exactly one end in `a`.
pub fn cut(g: &Multigraph, a: VSet) -> usize {
    g.edge_list()
        .iter()
        .filter(|&&(u, v)| contains(a, u) != contains(a, v))
        .count()
}

pub fn between(g: &Multigraph, a: VSet, b: VSet) -> usize {
    g.edge_list()
        .iter()
        .filter(|&&(u, v)| {
            (contains(a, u) && contains(b, v)) || (contains(b, u) && contains(a, v))
        })
        .count()
}

pub fn inside(g: &Multigraph, a: VSet) -> usize {
    g.edge_list()
        .iter()
        .filter(|&&(u, v)| contains(a, u) && contains(a, v))
        .count()
}

/// Structural operations of [`transform`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    /// Merge `A` into its lowest vertex and drop the edges inside `A`.
    Contract(VSet),
    /// Replace `v` by `v` and a new last vertex; `to_second` lists the
    /// non-loop edges moved to the new vertex. Loops join the two images.
    SplitVertex { v: usize, to_second: Vec<usize> },
    Induced(VSet),
    BipartiteFactor(VSet, VSet),
}

/// Result of a transform, with old-to-new vertex and edge maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformed {
    pub graph: Multigraph,
    pub vertex_map: Vec<Option<usize>>,
    pub edge_map: Vec<Option<usize>>,
}

pub fn transform(g: &Multigraph, op: &Transform) -> Result<Transformed> {
    let n = g.n();
    let all = full_set(n);
    match op {
        Transform::Contract(a) => {
            if *a & !all != 0 || *a == 0 {
                return invalid("contracted set must be a nonempty subset of V(G)");
            }
            let rep = a.trailing_zeros() as usize;
            let mut vertex_map = vec![None; n];
            let mut next = 0;
            for (v, slot) in vertex_map.iter_mut().enumerate() {
                if !contains(*a, v) || v == rep {
                    *slot = Some(next);
                    next += 1;
                }
            }
            for v in members(*a) {
                vertex_map[v] = vertex_map[rep];
            }
            let mut h = Multigraph::new(next);
            let mut edge_map = vec![None; g.num_edges()];
            for (e, u, v) in g.edges() {
                if contains(*a, u) && contains(*a, v) {
                    continue;
                }
                edge_map[e] = Some(h.add_edge(vertex_map[u].unwrap(), vertex_map[v].unwrap()));
            }
            Ok(Transformed { graph: h, vertex_map, edge_map })
        }
        Transform::SplitVertex { v, to_second } => {
            let v = *v;
            if v >= n {
                return invalid("split vertex out of range");
            }
            let mut moved = vec![false; g.num_edges()];
            for &e in to_second {
                if e >= g.num_edges() {
                    return invalid(format!("edge {e} does not exist"));
                }
                let (a, b) = g.ends(e);
                if a != v && b != v {
                    return invalid(format!("edge {e} is not incident with vertex {v}"));
                }
                if a == b {
                    return invalid(format!("loop {e} cannot be routed to one image"));
                }
                moved[e] = true;
            }
            let mut h = Multigraph::new(n + 1);
            let second = n;
            let mut edge_map = vec![None; g.num_edges()];
            for (e, a, b) in g.edges() {
                let (a, b) = if a == v && b == v {
                    (v, second)
                } else if moved[e] && a == v {
                    (second, b)
                } else if moved[e] {
                    (a, second)
                } else {
                    (a, b)
                };
                edge_map[e] = Some(h.add_edge(a, b));
            }
            let vertex_map = (0..n).map(Some).collect();
            Ok(Transformed { graph: h, vertex_map, edge_map })
        }
        Transform::Induced(a) => {
            if *a & !all != 0 {
                return invalid("induced set outside V(G)");
            }
            Ok(restrict(g, *a, |u, v| contains(*a, u) && contains(*a, v)))
        }
        Transform::BipartiteFactor(a, b) => {
            if (*a | *b) & !all != 0 || a & b != 0 {
                return invalid("bipartite factor needs disjoint subsets of V(G)");
            }
            let ab = a | b;
            Ok(restrict(g, ab, |u, v| {
                (contains(*a, u) && contains(*b, v)) || (contains(*b, u) && contains(*a, v))
            }))
        }
    }
}

fn restrict(g: &Multigraph, keep: VSet, take: impl Fn(usize, usize) -> bool) -> Transformed {
    let mut vertex_map = vec![None; g.n()];
    let mut next = 0;
    for v in members(keep) {
        vertex_map[v] = Some(next);
        next += 1;
    }
    let mut h = Multigraph::new(next);
    let mut edge_map = vec![None; g.num_edges()];
    for (e, u, v) in g.edges() {
        if take(u, v) {
            edge_map[e] = Some(h.add_edge(vertex_map[u].unwrap(), vertex_map[v].unwrap()));
        }
    }
    Transformed { graph: h, vertex_map, edge_map }
}

/// `G_D`: `v+ = v`, `v- = n + v`; an arc `u -> w` becomes `u+ w-`.
pub fn build_split_graph(g: &Multigraph, d: &Orientation) -> Result<SplitGraph> {
    if d.tails().len() != g.num_edges() {
        return invalid("orientation does not cover E(G)");
    }
    let n = g.n();
    let mut host = Multigraph::new(2 * n);
    for e in 0..g.num_edges() {
        let t = d.tail(e);
        let (a, b) = g.ends(e);
        if t != a && t != b {
            return Err(Error::InvalidInput(format!("malformed orientation at edge {e}")));
        }
        host.add_edge(t, n + d.head(g, e));
    }
    Ok(SplitGraph {
        host,
        image: (0..n).map(|v| (v, n + v)).collect(),
        edge_map: (0..g.num_edges()).collect(),
    })
}

/// Small named graphs used throughout tests and examples.
pub mod families {
    use super::Multigraph;

    pub fn complete(n: usize) -> Multigraph {
        let mut g = Multigraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Multigraph {
        let mut g = Multigraph::new(n);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Multigraph {
        let mut g = Multigraph::new(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    /// Two vertices joined by `mult` parallel edges.
    pub fn bundle(mult: usize) -> Multigraph {
        let mut g = Multigraph::new(2);
        for _ in 0..mult {
            g.add_edge(0, 1);
        }
        g
    }

    pub fn star(leaves: usize) -> Multigraph {
        let mut g = Multigraph::new(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v);
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Multigraph {
        let mut g = Multigraph::new(a + b);
        for u in 0..a {
            for v in 0..b {
                g.add_edge(u, a + v);
            }
        }
        g
    }

    pub fn cube() -> Multigraph {
        let mut g = Multigraph::new(8);
        for u in 0..8usize {
            for bit in 0..3 {
                let v = u ^ (1 << bit);
                if u < v {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn residue_examples() {
        assert_eq!(residue(7, 3), Ok(1));
        assert_eq!(residue(-2, 5), Ok(3));
        assert_eq!(residue(0, 4), Ok(0));
        assert!(residue(3, 0).is_err());
    }

    #[test]
    fn boundary_examples() {
        let t = complete(3);
        assert_eq!(boundary_counts(&t, vset(&[0]), None).unwrap().boundary, 2);
        let c = boundary_counts(&t, vset(&[0]), Some(vset(&[1]))).unwrap();
        assert_eq!(c.between, Some(1));
        let mut tl = complete(3);
        tl.add_edge(0, 0);
        let c = boundary_counts(&tl, vset(&[0]), None).unwrap();
        assert_eq!((c.boundary, tl.degree(0)), (2, 4));
        assert_eq!(c.inside, 1);
        assert!(boundary_counts(&t, vset(&[0, 1]), Some(vset(&[1]))).is_err());
    }

    #[test]
    fn transform_examples() {
        let t = complete(3);
        let c = transform(&t, &Transform::Contract(vset(&[0, 1]))).unwrap();
        assert_eq!(c.graph.n(), 2);
        assert_eq!(c.graph.num_edges(), 2);
        assert_eq!(c.graph.edge_list(), &[(0, 1), (0, 1)]);

        let mut l = Multigraph::new(1);
        l.add_edge(0, 0);
        let s = transform(&l, &Transform::SplitVertex { v: 0, to_second: vec![] }).unwrap();
        assert_eq!(s.graph.edge_list(), &[(0, 1)]);

        let b = transform(&t, &Transform::BipartiteFactor(vset(&[0]), vset(&[1, 2]))).unwrap();
        assert_eq!(b.graph.num_edges(), 2);
        assert_eq!(b.graph.degrees(), vec![2, 1, 1]);

        let bad = transform(&t, &Transform::SplitVertex { v: 0, to_second: vec![2] });
        assert!(bad.is_err(), "edge 2 = (1,2) is not incident with 0");
    }

    #[test]
    fn split_graph_examples() {
        let c3 = cycle(3);
        let d = Orientation::as_listed(&c3);
        let s = build_split_graph(&c3, &d).unwrap();
        assert_eq!(s.host.n(), 6);
        assert_eq!(s.host.degrees(), vec![1; 6]);

        let mut l = Multigraph::new(1);
        l.add_edge(0, 0);
        let s = build_split_graph(&l, &Orientation::as_listed(&l)).unwrap();
        assert_eq!(s.host.edge_list(), &[(0, 1)]);

        let dg = bundle(2);
        let d = Orientation::new(&dg, vec![0, 1]).unwrap();
        let s = build_split_graph(&dg, &d).unwrap();
        assert_eq!(s.host.edge_list(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn loops_count_in_orientation_both_ways() {
        let mut g = Multigraph::new(1);
        g.add_edge(0, 0);
        let d = Orientation::as_listed(&g);
        assert_eq!(d.out_degrees(&g), vec![1]);
        assert_eq!(d.in_degrees(&g), vec![1]);
    }
}
