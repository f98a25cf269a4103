//! Exact validators for edge, odd-edge and tree connectivity, partition
//! connectivity and the bipartite index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{contains, full_set, members, Dsu, Multigraph, VSet};
use crate::matroid::{self, Graphic, Matroid, OutDegree};

/// Largest vertex count for subset enumeration.
pub const SUBSET_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutMode {
    /// Every cut counts.
    Edge,
    /// Only cuts with `d(A)` odd count.
    Odd,
    /// Only cuts with `|A ∩ Q|` odd count.
    OddQ,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityQuery {
    pub mode: CutMode,
    pub lambda: usize,
    /// Restrict to `A ⊆ V0` when set.
    pub v0: Option<VSet>,
    pub q: Option<VSet>,
}

impl ConnectivityQuery {
    pub fn edge(lambda: usize) -> Self {
        ConnectivityQuery { mode: CutMode::Edge, lambda, v0: None, q: None }
    }

    pub fn odd(lambda: usize) -> Self {
        ConnectivityQuery { mode: CutMode::Odd, lambda, v0: None, q: None }
    }

    pub fn odd_q(lambda: usize, q: VSet) -> Self {
        ConnectivityQuery { mode: CutMode::OddQ, lambda, v0: None, q: Some(q) }
    }

    pub fn partial(mut self, v0: VSet) -> Self {
        self.v0 = Some(v0);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub holds: bool,
    pub witness_cut: Option<VSet>,
    /// Minimum qualifying cut; `None` stands for infinity.
    pub value: Option<usize>,
}

/// Calls `visit(A, d(A))` for every nonempty `A ⊆ within` in Gray-code order.
pub(crate) fn for_each_cut(g: &Multigraph, within: VSet, mut visit: impl FnMut(VSet, usize)) {
    let n = g.n();
    let mut mult = vec![vec![0i64; n]; n];
    let mut nl = vec![0i64; n];
    for &(u, v) in g.edge_list() {
        if u != v {
            mult[u][v] += 1;
            mult[v][u] += 1;
            nl[u] += 1;
            nl[v] += 1;
        }
    }
    let verts: Vec<usize> = members(within).collect();
    let mut inside_nb = vec![0i64; n];
    let mut set: VSet = 0;
    let mut cut: i64 = 0;
    for i in 1u64..(1u64 << verts.len()) {
        let v = verts[i.trailing_zeros() as usize];
        if contains(set, v) {
            set &= !(1 << v);
            cut -= nl[v] - 2 * inside_nb[v];
            for w in 0..n {
                inside_nb[w] -= mult[v][w];
            }
        } else {
            set |= 1 << v;
            cut += nl[v] - 2 * inside_nb[v];
            for w in 0..n {
                inside_nb[w] += mult[v][w];
            }
        }
        visit(set, cut as usize);
    }
}

pub fn connectivity_profile(g: &Multigraph, q: &ConnectivityQuery) -> Result<Profile> {
    if g.n() > SUBSET_CAP {
        return Err(Error::CapExceeded(format!("n = {} > {SUBSET_CAP}", g.n())));
    }
    let all = full_set(g.n());
    let v0 = q.v0.unwrap_or(all) & all;
    let qs = q.q.unwrap_or(0);
    if q.mode == CutMode::OddQ && q.v0.is_some() && qs & !v0 != 0 {
        return Err(Error::InvalidInput("Q must be a subset of V0".into()));
    }
    let mut best: Option<(usize, VSet)> = None;
    for_each_cut(g, v0, |a, d| {
        if a == all {
            return;
        }
        let counts = match q.mode {
            CutMode::Edge => true,
            CutMode::Odd => d % 2 == 1,
            CutMode::OddQ => (a & qs).count_ones() % 2 == 1,
        };
        if counts && best.is_none_or(|(b, _)| d < b) {
            best = Some((d, a));
        }
    });
    let holds = best.is_none_or(|(d, _)| d >= q.lambda);
    Ok(Profile {
        holds,
        witness_cut: if holds { None } else { best.map(|(_, a)| a) },
        value: best.map(|(d, _)| d),
    })
}

/// Edge-disjoint spanning trees plus the unused edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePacking {
    pub trees: Vec<Vec<usize>>,
    pub leftover: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Packing {
    Packed(TreePacking),
    /// A vertex partition with fewer than `m(|P| - 1)` crossing edges.
    Infeasible { partition: Vec<Vec<usize>>, crossing: usize },
}

impl Packing {
    pub fn is_packed(&self) -> bool {
        matches!(self, Packing::Packed(_))
    }
}

pub fn tree_connectivity_pack(g: &Multigraph, m: usize) -> Result<Packing> {
    let n = g.n();
    let gm = Graphic(g);
    let ms: Vec<&dyn Matroid> = vec![&gm; m];
    let ground: Vec<usize> = (0..g.num_edges()).collect();
    let part = matroid::partition(&ground, &ms);
    if part.parts.iter().all(|t| t.len() + 1 == n.max(1)) {
        let mut used = vec![false; g.num_edges()];
        for t in &part.parts {
            for &e in t {
                used[e] = true;
            }
        }
        let leftover = (0..g.num_edges()).filter(|&e| !used[e]).collect();
        return Ok(Packing::Packed(TreePacking { trees: part.parts, leftover }));
    }
    // The reachable set spans the same components in every forest, so its
    // components form a partition meeting the rank bound with equality.
    let mut dsu = Dsu::new(n);
    for &e in &part.reachable {
        let (u, v) = g.ends(e);
        dsu.union(u, v);
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        groups[dsu.find(v)].push(v);
    }
    let partition: Vec<Vec<usize>> = groups.into_iter().filter(|c| !c.is_empty()).collect();
    let crossing = g.edge_list().iter().filter(|&&(u, v)| dsu.find(u) != dsu.find(v)).count();
    if crossing >= m * (partition.len() - 1) {
        return Err(Error::InternalContradiction(
            "matroid partition certificate does not violate the partition bound".into(),
        ));
    }
    Ok(Packing::Infeasible { partition, crossing })
}

pub fn is_tree_connected(g: &Multigraph, m: usize) -> bool {
    matches!(tree_connectivity_pack(g, m), Ok(Packing::Packed(_)))
}

/// Backtracking search for `m` edge-disjoint spanning trees; an oracle for
/// [`tree_connectivity_pack`] on at most 16 edges.
pub fn tree_packing_exhaustive(g: &Multigraph, m: usize) -> Result<Option<Vec<Vec<usize>>>> {
    if g.num_edges() > 16 {
        return Err(Error::CapExceeded(format!("|E| = {} > 16", g.num_edges())));
    }
    let need = g.n().saturating_sub(1);
    let mut trees: Vec<Vec<usize>> = vec![Vec::new(); m];
    fn rec(g: &Multigraph, e: usize, need: usize, trees: &mut Vec<Vec<usize>>) -> bool {
        let missing: usize = trees.iter().map(|t| need - t.len()).sum();
        if missing == 0 {
            return true;
        }
        if g.num_edges() - e < missing {
            return false;
        }
        let (u, v) = g.ends(e);
        for i in 0..trees.len() {
            if trees[i].len() == need || u == v {
                continue;
            }
            // symmetry: an empty tree is only tried once
            if trees[i].is_empty() && i > 0 && trees[i - 1].is_empty() {
                continue;
            }
            let mut dsu = Dsu::new(g.n());
            for &f in &trees[i] {
                let (a, b) = g.ends(f);
                dsu.union(a, b);
            }
            if dsu.union(u, v) {
                trees[i].push(e);
                if rec(g, e + 1, need, trees) {
                    return true;
                }
                trees[i].pop();
            }
        }
        rec(g, e + 1, need, trees)
    }
    Ok(rec(g, 0, need, &mut trees).then_some(trees))
}

/// Decomposition witnessing `(m, l)`-partition-connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionWitness {
    pub trees: Vec<Vec<usize>>,
    /// Edges of the remaining factor `F` with the tail chosen for each.
    pub oriented: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub holds: bool,
    pub witness: Option<PartitionWitness>,
}

/// Decides whether `G` splits into an `m`-tree-connected factor and a factor
/// with an orientation meeting `d+ >= l`, by a matroid union of `m` cycle
/// matroids and the out-degree transversal matroid.
pub fn partition_connected_check(g: &Multigraph, m: usize, l: &[usize]) -> Result<PartitionCheck> {
    let n = g.n();
    if l.len() != n {
        return Err(Error::InvalidInput("l must have one entry per vertex".into()));
    }
    let gm = Graphic(g);
    let od = OutDegree { g, cap: l.to_vec() };
    let mut ms: Vec<&dyn Matroid> = vec![&gm; m];
    ms.push(&od);
    let ground: Vec<usize> = (0..g.num_edges()).collect();
    let part = matroid::partition(&ground, &ms);
    let trees_ok = part.parts[..m].iter().all(|t| t.len() + 1 == n.max(1));
    let need_l: usize = l.iter().sum();
    if !trees_ok || part.parts[m].len() != need_l {
        return Ok(PartitionCheck { holds: false, witness: None });
    }
    let charged = &part.parts[m];
    let tails = od.assign(charged).expect("independent set is assignable");
    let mut in_tree = vec![false; g.num_edges()];
    for t in &part.parts[..m] {
        for &e in t {
            in_tree[e] = true;
        }
    }
    let mut tail_of = vec![None; g.num_edges()];
    for (&e, &t) in charged.iter().zip(&tails) {
        tail_of[e] = Some(t);
    }
    let oriented = (0..g.num_edges())
        .filter(|&e| !in_tree[e])
        .map(|e| (e, tail_of[e].unwrap_or(g.ends(e).0)))
        .collect();
    Ok(PartitionCheck {
        holds: true,
        witness: Some(PartitionWitness { trees: part.parts[..m].to_vec(), oriented }),
    })
}

/// `|E|` minus the largest bipartite factor; loops never count.
pub fn bipartite_index(g: &Multigraph) -> Result<usize> {
    let n = g.n();
    if n > SUBSET_CAP {
        return Err(Error::CapExceeded(format!("n = {n} > {SUBSET_CAP}")));
    }
    if n <= 1 {
        return Ok(g.num_edges());
    }
    let mut best = 0;
    for_each_cut(g, full_set(n - 1), |_, d| best = best.max(d));
    Ok(g.num_edges() - best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::graph::vset;

    fn cut_by_scan(g: &Multigraph, a: VSet) -> usize {
        crate::graph::cut(g, a)
    }

    #[test]
    fn gray_code_cuts_match_direct_count() {
        let mut g = complete(5);
        g.add_edge(1, 1);
        g.add_edge(2, 3);
        for_each_cut(&g, full_set(5), |a, d| assert_eq!(d, cut_by_scan(&g, a)));
    }

    #[test]
    fn profile_examples() {
        let t = complete(3);
        assert_eq!(connectivity_profile(&t, &ConnectivityQuery::edge(2)).unwrap().value, Some(2));
        let odd = connectivity_profile(&t, &ConnectivityQuery::odd(100)).unwrap();
        assert_eq!((odd.value, odd.holds), (None, true));
        let k4 = connectivity_profile(&complete(4), &ConnectivityQuery::odd(4)).unwrap();
        assert_eq!(k4.value, Some(3));
        assert!(!k4.holds);
        assert_eq!(k4.witness_cut.map(|a| a.count_ones()), Some(1));
    }

    #[test]
    fn partial_and_q_modes() {
        let p = path(3);
        let r = connectivity_profile(&p, &ConnectivityQuery::edge(2).partial(vset(&[1]))).unwrap();
        assert_eq!(r.value, Some(2));
        let r = connectivity_profile(&cycle(4), &ConnectivityQuery::odd_q(2, vset(&[0, 2]))).unwrap();
        assert!(r.holds);
        assert_eq!(r.value, Some(2));
    }

    #[test]
    fn packing_examples() {
        match tree_connectivity_pack(&bundle(6), 6).unwrap() {
            Packing::Packed(p) => assert!(p.trees.iter().all(|t| t.len() == 1)),
            other => panic!("{other:?}"),
        }
        assert!(tree_connectivity_pack(&complete(4), 2).unwrap().is_packed());
        match tree_connectivity_pack(&complete(3), 2).unwrap() {
            Packing::Infeasible { partition, crossing } => {
                assert!(crossing < 2 * (partition.len() - 1));
            }
            other => panic!("{other:?}"),
        }
        let mut two = Multigraph::new(2);
        two.add_edge(0, 0);
        assert!(!tree_connectivity_pack(&two, 1).unwrap().is_packed());
    }

    #[test]
    fn partition_connected_examples() {
        assert!(partition_connected_check(&cycle(5), 1, &[0; 5]).unwrap().holds);
        let t = partition_connected_check(&complete(3), 1, &[1, 0, 0]).unwrap();
        assert!(t.holds);
        let w = t.witness.unwrap();
        assert_eq!(w.oriented.len(), 1);
        assert_eq!(w.oriented[0].1, 0);
        assert!(!partition_connected_check(&complete(4), 2, &[1; 4]).unwrap().holds);
    }

    #[test]
    fn bipartite_index_examples() {
        assert_eq!(bipartite_index(&cycle(4)).unwrap(), 0);
        assert_eq!(bipartite_index(&complete(3)).unwrap(), 1);
        assert_eq!(bipartite_index(&complete(4)).unwrap(), 2);
        let mut l = path(2);
        l.add_edge(1, 1);
        assert_eq!(bipartite_index(&l).unwrap(), 1);
    }
}
