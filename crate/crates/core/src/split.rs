//! Splitting every vertex into an out-copy and an in-copy so that the
//! resulting bipartite graph keeps prescribed degree residues, steered
//! factors and cut guarantees.

use serde::{Deserialize, Serialize};

use crate::connectivity::{for_each_cut, is_tree_connected, tree_connectivity_pack, Packing};
use crate::error::{Error, Preconditions, Result};
use crate::graph::{
    build_split_graph, contains, full_set, rk, Multigraph, Orientation, SplitGraph, VSet,
};
use crate::orientation::{
    find_mod_k_orientation, search_mod_k_orientations, OrientationTarget, DEFAULT_BUDGET,
};

/// Largest vertex count for the bipartition search.
pub const BIPARTITION_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRequest {
    pub target: OrientationTarget,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
    /// `U1`; `U2` is its complement.
    pub u1: VSet,
    /// `(edge, tail)` for factor edges with both ends on one side. Edges not
    /// listed take their first endpoint as tail.
    pub steering: Vec<(usize, usize)>,
    pub preconditions: Preconditions,
}

impl SplitRequest {
    pub fn plain(target: OrientationTarget) -> Self {
        SplitRequest {
            target,
            f1: Vec::new(),
            f2: Vec::new(),
            u1: 0,
            steering: Vec::new(),
            preconditions: Preconditions::Validate,
        }
    }
}

/// `S_i`: out-copies of `U_i` together with in-copies of its complement.
pub fn steering_side(h: &SplitGraph, u1: VSet, i: usize) -> VSet {
    let mut s = 0;
    for (v, &(a, b)) in h.image.iter().enumerate() {
        let in_ui = contains(u1, v) == (i == 1);
        s |= 1 << if in_ui { a } else { b };
    }
    s
}

fn shift_target(t: &OrientationTarget, fixed_out: &[usize]) -> OrientationTarget {
    let k = t.k;
    let allowed = t
        .allowed
        .iter()
        .zip(fixed_out)
        .map(|(&mask, &f)| {
            (0..k).filter(|&r| mask >> r & 1 == 1).fold(0u64, |acc, r| acc | 1 << ((r + k - f % k) % k))
        })
        .collect();
    OrientationTarget { k, allowed }
}

/// Orients the factors as prescribed, finds a residue orientation of the
/// rest, and splits each vertex into its out-edges and in-edges.
pub fn split_with_factors(g: &Multigraph, r: &SplitRequest) -> Result<SplitGraph> {
    let n = g.n();
    let k = r.target.k;
    if r.target.allowed.len() != n {
        return Err(Error::InvalidInput("one target per vertex required".into()));
    }
    if r.u1 & !full_set(n) != 0 {
        return Err(Error::InvalidInput("U1 is not a vertex subset".into()));
    }
    let mut fixed = vec![None; g.num_edges()];
    for (which, list) in [(1, &r.f1), (2, &r.f2)] {
        for &e in list.iter() {
            if e >= g.num_edges() {
                return Err(Error::InvalidInput(format!("edge {e} out of range")));
            }
            if fixed[e].is_some() {
                return Err(Error::InvalidInput(format!("edge {e} in both factors")));
            }
            let (a, b) = g.ends(e);
            let tail = if contains(r.u1, a) != contains(r.u1, b) {
                let a_in_ui = contains(r.u1, a) == (which == 1);
                if a_in_ui {
                    a
                } else {
                    b
                }
            } else {
                a
            };
            fixed[e] = Some(tail);
        }
    }
    for &(e, t) in &r.steering {
        if fixed.get(e).copied().flatten().is_none() {
            return Err(Error::InvalidInput(format!("steered edge {e} is not in F1 or F2")));
        }
        let (a, b) = g.ends(e);
        if contains(r.u1, a) != contains(r.u1, b) {
            return Err(Error::InvalidInput(format!("steered edge {e} crosses the bipartition")));
        }
        if t != a && t != b {
            return Err(Error::InvalidInput(format!("tail {t} is not an end of edge {e}")));
        }
        fixed[e] = Some(t);
    }
    if let Some(p) = r.target.singletons() {
        if rk(p.iter().sum(), k as i64) != rk(g.num_edges() as i64, k as i64) {
            return Err(Error::HypothesisUnmet("sum of targets differs from |E| mod k".into()));
        }
    }
    let rest: Vec<usize> = (0..g.num_edges()).filter(|&e| fixed[e].is_none()).collect();
    let (g_rest, back) = g.spanning_subgraph(&rest);
    if r.preconditions == Preconditions::Validate && !is_tree_connected(&g_rest, 2 * k - 2) {
        return Err(Error::HypothesisUnmet(format!(
            "G minus F1, F2 is not {}-tree-connected",
            2 * k - 2
        )));
    }
    let mut fixed_out = vec![0usize; n];
    for t in fixed.iter().flatten() {
        fixed_out[*t] += 1;
    }
    let d_rest = find_mod_k_orientation(&g_rest, &shift_target(&r.target, &fixed_out))?;
    let mut tails = vec![0; g.num_edges()];
    for (e, t) in fixed.iter().enumerate() {
        if let Some(t) = t {
            tails[e] = *t;
        }
    }
    for (new, &old) in back.iter().enumerate() {
        tails[old] = d_rest.tail(new);
    }
    let h = build_split_graph(g, &Orientation::new(g, tails)?)?;
    let outdeg = h.host.degrees();
    if let Some(v) = (0..n).find(|&v| !r.target.admits(v, outdeg[h.image[v].0])) {
        return Err(Error::InternalContradiction(format!("residue target missed at vertex {v}")));
    }
    Ok(h)
}

fn cross_graph(g: &Multigraph, u1: VSet) -> (Multigraph, Vec<usize>) {
    let cross: Vec<usize> = g
        .edges()
        .filter(|&(_, a, b)| contains(u1, a) != contains(u1, b))
        .map(|(e, _, _)| e)
        .collect();
    g.spanning_subgraph(&cross)
}

/// A bipartition `(U1, U2)` whose crossing edges form an `m`-tree-connected
/// factor. Candidates are tried by decreasing cut size, then by the index
/// set of `U1`; vertex 0 always lies in `U1`.
pub fn bipartite_tree_connected_factor(g: &Multigraph, m: usize) -> Result<(VSet, VSet)> {
    let n = g.n();
    if !is_tree_connected(g, 2 * m) {
        return Err(Error::HypothesisUnmet(format!("graph is not {}-tree-connected", 2 * m)));
    }
    if n <= 1 {
        return Ok((full_set(n), 0));
    }
    if n > BIPARTITION_CAP {
        return Err(Error::CapExceeded(format!("n = {n} > {BIPARTITION_CAP}")));
    }
    let all = full_set(n);
    let mut cands: Vec<(usize, VSet)> = Vec::new();
    for_each_cut(g, all & !1, |a, d| {
        cands.push((d, all & !a));
    });
    cands.sort_by_key(|&(d, u1)| (std::cmp::Reverse(d), u1));
    for (_, u1) in cands {
        if is_tree_connected(&cross_graph(g, u1).0, m) {
            return Ok((u1, all & !u1));
        }
    }
    Err(Error::InternalContradiction(format!(
        "no bipartition carries an {m}-tree-connected crossing factor"
    )))
}

/// Edge partition produced by [`decompose_index`]; every edge lies in
/// exactly one of `g0`, `g1`, `m_edges` and `leftover`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDecomposition {
    pub u1: VSet,
    pub u2: VSet,
    pub g0: Vec<usize>,
    /// `m0` edge-disjoint spanning trees inside `g0`.
    pub g0_trees: Vec<Vec<usize>>,
    pub g1: Vec<usize>,
    /// `m` edge-disjoint spanning trees inside `g1`.
    pub g1_trees: Vec<Vec<usize>>,
    /// Edges inside `U1` or `U2`.
    pub m_edges: Vec<usize>,
    /// Crossing edges of the trees that supplied `m_edges`.
    pub leftover: Vec<usize>,
}

fn is_internal(g: &Multigraph, u1: VSet, e: usize) -> bool {
    let (a, b) = g.ends(e);
    contains(u1, a) == contains(u1, b)
}

fn pack(g: &Multigraph, ids: &[usize], m: usize) -> Result<Option<(Vec<Vec<usize>>, Vec<usize>)>> {
    let (sub, back) = g.spanning_subgraph(ids);
    Ok(match tree_connectivity_pack(&sub, m)? {
        Packing::Packed(p) => Some((
            p.trees.iter().map(|t| t.iter().map(|&e| back[e]).collect()).collect(),
            p.leftover.iter().map(|&e| back[e]).collect(),
        )),
        Packing::Infeasible { .. } => None,
    })
}

/// Path between `x` and `y` in a spanning tree, as edge ids.
fn tree_path(g: &Multigraph, tree: &[usize], x: usize, y: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); g.n()];
    for &e in tree {
        let (a, b) = g.ends(e);
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut via = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(u) = stack.pop() {
        for &(w, e) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                via[w] = Some((u, e));
                stack.push(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = y;
    while let Some((u, e)) = via[cur] {
        path.push(e);
        cur = u;
    }
    path
}

/// Splits an `(m0 + 2m)`-tree-connected graph into an `m0`-tree-connected
/// part, an `m`-tree-connected bipartite part and a set of edges inside the
/// sides of its bipartition.
pub fn decompose_index(g: &Multigraph, m0: usize, m: usize) -> Result<IndexDecomposition> {
    let all: Vec<usize> = (0..g.num_edges()).collect();
    let Some((trees, l)) = pack(g, &all, m0 + 2 * m)? else {
        return Err(Error::HypothesisUnmet(format!("graph is not {}-tree-connected", m0 + 2 * m)));
    };
    let h0 = trees[..m0].to_vec();
    let h_trees = trees[m0..].to_vec();
    let h_edges: Vec<usize> = h_trees.concat();
    let (h, _) = g.spanning_subgraph(&h_edges);
    let (u1, u2) = bipartite_tree_connected_factor(&h, m)?;
    let internal_h: Vec<usize> =
        h_edges.iter().copied().filter(|&e| is_internal(g, u1, e)).collect();

    if internal_h.len() >= m {
        let g1: Vec<usize> = h_edges.iter().copied().filter(|&e| !is_internal(g, u1, e)).collect();
        let Some((g1_trees, _)) = pack(g, &g1, m)? else {
            return Err(Error::InternalContradiction("crossing factor lost its packing".into()));
        };
        let mut g0 = h0.concat();
        g0.extend(&l);
        g0.sort_unstable();
        return Ok(IndexDecomposition {
            u1,
            u2,
            g0,
            g0_trees: h0,
            g1,
            g1_trees,
            m_edges: internal_h,
            leftover: Vec::new(),
        });
    }

    // Fewer than m internal edges: at least m + 1 of the 2m trees avoid them.
    let free: Vec<Vec<usize>> = h_trees
        .iter()
        .filter(|t| t.iter().all(|&e| !is_internal(g, u1, e)))
        .take(m)
        .cloned()
        .collect();
    if free.len() < m {
        return Err(Error::InternalContradiction("too few internal-free trees".into()));
    }
    let mut g1: Vec<usize> = free.concat();
    g1.sort_unstable();
    let mut rest: Vec<usize> = (0..g.num_edges()).filter(|e| g1.binary_search(e).is_err()).collect();
    rest.sort_by_key(|&e| !is_internal(g, u1, e));
    let Some((mut ts, mut lo)) = pack(g, &rest, m + m0)? else {
        return Err(Error::InternalContradiction("remainder lost its packing".into()));
    };
    let count = |t: &Vec<usize>| t.iter().filter(|&&e| is_internal(g, u1, e)).count();
    loop {
        ts.sort_by_key(|t| std::cmp::Reverse(count(t)));
        if m == 0 || count(&ts[m - 1]) > 0 {
            break;
        }
        let Some(pos) = lo.iter().position(|&e| is_internal(g, u1, e) && !g.is_loop(e)) else {
            break;
        };
        let xy = lo.swap_remove(pos);
        let (x, y) = g.ends(xy);
        let path = tree_path(g, &ts[m - 1], x, y);
        let out = path[0];
        ts[m - 1].retain(|&e| e != out);
        ts[m - 1].push(xy);
        lo.push(out);
    }
    let chosen = &ts[..m];
    let mut m_edges: Vec<usize> =
        chosen.iter().flatten().copied().filter(|&e| is_internal(g, u1, e)).collect();
    let mut leftover: Vec<usize> =
        chosen.iter().flatten().copied().filter(|&e| !is_internal(g, u1, e)).collect();
    let g0_trees: Vec<Vec<usize>> = ts[m..].to_vec();
    let mut g0: Vec<usize> = g0_trees.concat();
    g0.extend(&lo);
    g0.sort_unstable();
    m_edges.sort_unstable();
    leftover.sort_unstable();
    let total_internal = (0..g.num_edges()).filter(|&e| is_internal(g, u1, e)).count();
    if m_edges.len() < m.min(total_internal) {
        return Err(Error::InternalContradiction("internal edges escaped the chosen trees".into()));
    }
    Ok(IndexDecomposition { u1, u2, g0, g0_trees, g1, g1_trees: free, m_edges, leftover })
}

/// Smallest `d_H(X)` over proper `X ⊇ {z1, z2}`, or `None` when no such
/// `X` exists.
pub fn min_cut_containing(h: &Multigraph, z1: usize, z2: usize) -> Option<usize> {
    let within = full_set(h.n()) & !(1 << z1) & !(1 << z2);
    let mut best = None;
    for_each_cut(h, within, |_, d| {
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
    });
    best
}

fn cut_ok(h: &SplitGraph, z: usize, m: usize) -> bool {
    let (z1, z2) = h.image[z];
    m == 0 || min_cut_containing(&h.host, z1, z2).is_none_or(|d| d >= m)
}

/// Depth of each vertex in a spanning tree rooted at `r`.
fn depths(g: &Multigraph, tree: &[usize], r: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); g.n()];
    for &e in tree {
        let (a, b) = g.ends(e);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut depth = vec![usize::MAX; g.n()];
    depth[r] = 0;
    let mut q = std::collections::VecDeque::from([r]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                q.push_back(w);
            }
        }
    }
    depth
}

/// Tail that puts `y`'s copy in `S1` for an edge `xy` inside one side.
fn tail_for_s1(u1: VSet, x: usize, y: usize) -> usize {
    if contains(u1, y) {
        y
    } else {
        x
    }
}

fn proof_split(g: &Multigraph, k: usize, p: &[i64], m: usize, z: usize) -> Result<SplitGraph> {
    let dec = decompose_index(g, 2 * k - 2 + m, m)?;
    let u1 = dec.u1;
    let t: Vec<Vec<usize>> = dec.g0_trees[..m].to_vec();
    let n_m = dec.m_edges.len().min(m);
    let m_used = &dec.m_edges[..n_m];
    let mut f1: Vec<usize> = t.concat();
    f1.extend(m_used);
    let f2 = dec.g1.clone();
    let mut steering = Vec::new();
    for (i, tree) in t.iter().enumerate() {
        let r = if i < n_m {
            let e = m_used[i];
            let (a, b) = g.ends(e);
            let tail = tail_for_s1(u1, b, a);
            steering.push((e, tail));
            a
        } else {
            z
        };
        let depth = depths(g, tree, r);
        for &e in tree {
            if !is_internal(g, u1, e) {
                continue;
            }
            let (a, b) = g.ends(e);
            let (x, y) = if depth[a] < depth[b] { (a, b) } else { (b, a) };
            steering.push((e, tail_for_s1(u1, x, y)));
        }
    }
    let req = SplitRequest {
        target: OrientationTarget::exact(k, p)?,
        f1,
        f2,
        u1,
        steering,
        preconditions: Preconditions::Assume,
    };
    split_with_factors(g, &req)
}

/// A split with `d_H(v1) ≡ p(v)` and every proper vertex set containing
/// both copies of `z` sending at least `m` edges out.
pub fn split_tree_connected(
    g: &Multigraph,
    k: usize,
    p: &[i64],
    m: usize,
    z: usize,
    pre: Preconditions,
) -> Result<SplitGraph> {
    let n = g.n();
    if k == 0 || p.len() != n || z >= n {
        return Err(Error::InvalidInput("need k >= 1, one target per vertex and z in V".into()));
    }
    if rk(p.iter().sum(), k as i64) != rk(g.num_edges() as i64, k as i64) {
        return Err(Error::HypothesisUnmet("sum of targets differs from |E| mod k".into()));
    }
    if 2 * n > crate::connectivity::SUBSET_CAP {
        return Err(Error::CapExceeded(format!("split graph has {} > 24 vertices", 2 * n)));
    }
    let need = 2 * k - 2 + 3 * m;
    let connected = is_tree_connected(g, need);
    if pre == Preconditions::Validate && !connected {
        return Err(Error::HypothesisUnmet(format!("graph is not {need}-tree-connected")));
    }
    if connected {
        if let Ok(h) = proof_split(g, k, p, m, z) {
            if cut_ok(&h, z, m) {
                return Ok(h);
            }
        }
    }
    let target = OrientationTarget::exact(k, p)?;
    let found = search_mod_k_orientations(g, &target, DEFAULT_BUDGET, |d| {
        build_split_graph(g, d).is_ok_and(|h| cut_ok(&h, z, m))
    })?;
    match found {
        Some(d) => build_split_graph(g, &d),
        None if connected => {
            Err(Error::InternalContradiction("no residue split meets the cut bound".into()))
        }
        None => Err(Error::Infeasible("no residue split meets the cut bound".into())),
    }
}

/// `{v1, v2}` pairs merged back and `H[S1, S2]` edges dropped: what remains
/// are the crossing edges of `G`, as original edge ids.
pub fn crossing_edges_recovered(h: &SplitGraph, u1: VSet) -> Vec<usize> {
    let s1 = steering_side(h, u1, 1);
    let back = h.pull_back();
    let mut out: Vec<usize> = h
        .host
        .edges()
        .filter(|&(_, a, b)| contains(s1, a) == contains(s1, b))
        .map(|(e, _, _)| back[e])
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::is_tree_connected;
    use crate::graph::families::{bundle, complete};
    use crate::graph::vset;

    #[test]
    fn trivial_modulus_accepts_any_split() {
        let g = complete(4);
        let r = SplitRequest::plain(OrientationTarget::exact(1, &[0; 4]).unwrap());
        let h = split_with_factors(&g, &r).unwrap();
        assert_eq!(h.host.num_edges(), 6);
        assert!(h.host.bipartition().is_some());
    }

    #[test]
    fn digon_with_odd_targets() {
        let g = bundle(4);
        let r = SplitRequest::plain(OrientationTarget::exact(2, &[1, 1]).unwrap());
        let h = split_with_factors(&g, &r).unwrap();
        let d = h.host.degrees();
        assert_eq!((d[0] % 2, d[1] % 2), (1, 1));
        for v in 0..2 {
            assert_eq!(d[h.image[v].0] + d[h.image[v].1], 4);
        }
    }

    #[test]
    fn steering_and_sides() {
        // K4 plus two extra parallel copies keeps the rest 2-tree-connected.
        let mut g = complete(4);
        for (a, b) in [(0, 1), (2, 3), (0, 2), (1, 3)] {
            g.add_edge(a, b);
        }
        let u1 = vset(&[0, 1]);
        // edge 0 = (0,1) inside U1, edge 1 = (0,2) crossing.
        let r = SplitRequest {
            target: OrientationTarget::exact(2, &[0, 0, 0, 0]).unwrap(),
            f1: vec![0, 1],
            f2: vec![],
            u1,
            steering: vec![(0, 1)],
            preconditions: Preconditions::Validate,
        };
        let h = split_with_factors(&g, &r).unwrap();
        assert_eq!(h.host.ends(h.edge_map[0]), (1, 4));
        let s1 = steering_side(&h, u1, 1);
        let (a, b) = h.host.ends(h.edge_map[1]);
        assert!(contains(s1, a) && contains(s1, b));
        let internal: Vec<usize> = g
            .edges()
            .filter(|&(_, a, b)| contains(u1, a) == contains(u1, b))
            .map(|(e, _, _)| e)
            .collect();
        let crossing: Vec<usize> =
            (0..g.num_edges()).filter(|e| !internal.contains(e)).collect();
        assert_eq!(crossing_edges_recovered(&h, u1), crossing);
    }

    #[test]
    fn bipartite_factor_examples() {
        assert_eq!(bipartite_tree_connected_factor(&bundle(4), 2).unwrap(), (0b01, 0b10));
        let (u1, u2) = bipartite_tree_connected_factor(&complete(4), 1).unwrap();
        assert_eq!((u1, u2), (vset(&[0, 1]), vset(&[2, 3])));
        assert!(is_tree_connected(&cross_graph(&complete(4), u1).0, 1));
        assert!(matches!(
            bipartite_tree_connected_factor(&complete(3), 1),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    fn assert_partition(g: &Multigraph, d: &IndexDecomposition) {
        let mut all: Vec<usize> =
            [&d.g0, &d.g1, &d.m_edges, &d.leftover].into_iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..g.num_edges()).collect::<Vec<_>>());
    }

    #[test]
    fn decompose_examples() {
        let k4 = complete(4);
        let d = decompose_index(&k4, 0, 1).unwrap();
        assert_partition(&k4, &d);
        assert_eq!(d.g1.len(), 4);
        assert!(is_tree_connected(&k4.spanning_subgraph(&d.g1).0, 1));
        assert!(d.m_edges.contains(&0) || d.m_edges.contains(&5));

        let g = bundle(5);
        let d = decompose_index(&g, 1, 2).unwrap();
        assert_partition(&g, &d);
        assert!(d.m_edges.is_empty());
        assert!(is_tree_connected(&g.spanning_subgraph(&d.g0).0, 1));
        assert!(is_tree_connected(&g.spanning_subgraph(&d.g1).0, 2));

        assert!(matches!(decompose_index(&complete(3), 1, 1), Err(Error::HypothesisUnmet(_))));
    }

    #[test]
    fn cut_guaranteed_split() {
        let g = bundle(8);
        let h = split_tree_connected(&g, 2, &[0, 0], 1, 0, Preconditions::Validate).unwrap();
        let d = h.host.degrees();
        assert_eq!((d[0] % 2, d[1] % 2), (0, 0));
        assert!(min_cut_containing(&h.host, 0, 2).unwrap() >= 1);

        let g = complete(4);
        let h = split_tree_connected(&g, 1, &[0; 4], 0, 0, Preconditions::Validate).unwrap();
        assert_eq!(h.host.num_edges(), 6);

        assert!(matches!(
            split_tree_connected(&complete(3), 2, &[1, 1, 1], 1, 0, Preconditions::Validate),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn assumed_split_is_verified() {
        let g = complete(5);
        let h = split_tree_connected(&g, 2, &[0, 0, 0, 0, 0], 2, 0, Preconditions::Assume).unwrap();
        let (z1, z2) = h.image[0];
        assert!(min_cut_containing(&h.host, z1, z2).unwrap() >= 2);
    }
}
