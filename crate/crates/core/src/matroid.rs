//! Matroid partition by shortest augmenting paths, used for tree packings
//! and partition-connectivity.

use std::collections::VecDeque;

use crate::graph::{Dsu, Multigraph};

pub trait Matroid {
    fn independent(&self, set: &[usize]) -> bool;
}

/// Cycle matroid of a multigraph; loops are dependent.
pub struct Graphic<'a>(pub &'a Multigraph);

impl Matroid for Graphic<'_> {
    fn independent(&self, set: &[usize]) -> bool {
        let mut dsu = Dsu::new(self.0.n());
        set.iter().all(|&e| {
            let (u, v) = self.0.ends(e);
            dsu.union(u, v)
        })
    }
}

/// Edge sets that can be oriented so that vertex `v` receives at most
/// `cap[v]` tails: the transversal matroid of orientations with `d+ <= cap`.
pub struct OutDegree<'a> {
    pub g: &'a Multigraph,
    pub cap: Vec<usize>,
}

impl OutDegree<'_> {
    /// Tail per edge of `set`, if every edge can be charged to an endpoint.
    pub fn assign(&self, set: &[usize]) -> Option<Vec<usize>> {
        let n = self.g.n();
        let mut load: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut tail = vec![usize::MAX; set.len()];
        for i in 0..set.len() {
            let mut seen = vec![false; n];
            if !self.place(set, i, &mut tail, &mut load, &mut seen) {
                return None;
            }
        }
        Some(tail)
    }

    fn place(
        &self,
        set: &[usize],
        i: usize,
        tail: &mut [usize],
        load: &mut [Vec<usize>],
        seen: &mut [bool],
    ) -> bool {
        let (u, v) = self.g.ends(set[i]);
        for w in [u, v] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            if load[w].len() < self.cap[w] {
                load[w].push(i);
                tail[i] = w;
                return true;
            }
            for slot in 0..load[w].len() {
                let j = load[w][slot];
                if self.place(set, j, tail, load, seen) {
                    load[w][slot] = i;
                    tail[i] = w;
                    return true;
                }
            }
        }
        false
    }
}

impl Matroid for OutDegree<'_> {
    fn independent(&self, set: &[usize]) -> bool {
        self.assign(set).is_some()
    }
}

/// Outcome of [`partition`]: one independent set per matroid, the ground
/// elements left uncovered, and the elements reachable from them in the
/// final exchange graph.
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub uncovered: Vec<usize>,
    pub reachable: Vec<usize>,
}

/// Greedily covers `ground` (in order) by independent sets, one per matroid,
/// maximizing the total size.
pub fn partition(ground: &[usize], ms: &[&dyn Matroid]) -> Partition {
    let max_el = ground.iter().copied().max().map_or(0, |x| x + 1);
    let mut owner: Vec<Option<usize>> = vec![None; max_el];
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); ms.len()];
    let mut uncovered = Vec::new();
    for &x in ground {
        if !augment(x, ms, &mut parts, &mut owner) {
            uncovered.push(x);
        }
    }
    let reachable = explore(&uncovered, ms, &parts, &owner, max_el).0;
    for p in &mut parts {
        p.sort_unstable();
    }
    Partition { parts, uncovered, reachable }
}

type Label = Option<(usize, usize)>;

/// BFS over the exchange graph. Returns the visited elements, labels, and the
/// first element that can enter some part freely (with that part).
fn explore(
    roots: &[usize],
    ms: &[&dyn Matroid],
    parts: &[Vec<usize>],
    owner: &[Option<usize>],
    max_el: usize,
) -> (Vec<usize>, Vec<Label>, Option<(usize, usize)>) {
    let mut label: Vec<Label> = vec![None; max_el];
    let mut seen = vec![false; max_el];
    let mut order = Vec::new();
    let mut q = VecDeque::new();
    for &r in roots {
        seen[r] = true;
        q.push_back(r);
    }
    while let Some(y) = q.pop_front() {
        order.push(y);
        for (i, m) in ms.iter().enumerate() {
            if owner[y] == Some(i) {
                continue;
            }
            let mut with_y = parts[i].clone();
            with_y.push(y);
            if m.independent(&with_y) {
                return (order, label, Some((y, i)));
            }
            for (pos, &f) in parts[i].iter().enumerate() {
                if seen[f] {
                    continue;
                }
                let mut swapped = with_y.clone();
                swapped.swap_remove(pos);
                if m.independent(&swapped) {
                    seen[f] = true;
                    label[f] = Some((y, i));
                    q.push_back(f);
                }
            }
        }
    }
    (order, label, None)
}

fn augment(
    x: usize,
    ms: &[&dyn Matroid],
    parts: &mut [Vec<usize>],
    owner: &mut [Option<usize>],
) -> bool {
    let (_, label, hit) = explore(&[x], ms, parts, owner, owner.len());
    let Some((mut cur, mut target)) = hit else {
        return false;
    };
    loop {
        if let Some(old) = owner[cur] {
            parts[old].retain(|&e| e != cur);
        }
        let prev_owner = owner[cur];
        parts[target].push(cur);
        owner[cur] = Some(target);
        if cur == x {
            return true;
        }
        let (p, j) = label[cur].expect("labelled element on augmenting path");
        debug_assert_eq!(Some(j), prev_owner);
        cur = p;
        target = j;
    }
}
