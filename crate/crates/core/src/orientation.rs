//! Orientations with prescribed out-degree residues.
//!
//! Parallel edges are grouped into bundles; only the number of bundle edges
//! directed each way matters, and only modulo `k`. Bundles are decided in a
//! fixed order and each vertex is checked as soon as its last bundle is
//! placed. Failed frontier states are memoized, which keeps the search
//! complete while staying fast at desk scale.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{contains, rk, Multigraph, Orientation, VSet};

/// Default node budget before a search reports `SearchExhausted`.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Admissible out-degree residues per vertex, as bitmasks over `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationTarget {
    pub k: usize,
    pub allowed: Vec<u64>,
}

impl OrientationTarget {
    /// `d+(v) ≡ p(v) (mod k)` for every vertex.
    pub fn exact(k: usize, p: &[i64]) -> Result<Self> {
        check_k(k)?;
        let allowed = p.iter().map(|&x| 1u64 << rk(x, k as i64)).collect();
        Ok(OrientationTarget { k, allowed })
    }

    /// Per-vertex admissible residue lists; an empty list means unconstrained.
    pub fn sets(k: usize, sets: &[Vec<i64>]) -> Result<Self> {
        check_k(k)?;
        let all = mask_all(k);
        let allowed = sets
            .iter()
            .map(|s| {
                if s.is_empty() {
                    all
                } else {
                    s.iter().fold(0, |m, &x| m | 1u64 << rk(x, k as i64))
                }
            })
            .collect();
        Ok(OrientationTarget { k, allowed })
    }

    /// The single prescribed residue at every vertex, if all are singletons.
    pub fn singletons(&self) -> Option<Vec<i64>> {
        self.allowed
            .iter()
            .map(|&m| (m.count_ones() == 1).then(|| m.trailing_zeros() as i64))
            .collect()
    }

    pub fn admits(&self, v: usize, out_deg: usize) -> bool {
        self.allowed[v] >> (out_deg % self.k) & 1 == 1
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > 64 {
        return Err(Error::InvalidInput(format!("modulus {k} outside 1..=64")));
    }
    Ok(())
}

fn mask_all(k: usize) -> u64 {
    if k == 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

pub fn find_mod_k_orientation(g: &Multigraph, t: &OrientationTarget) -> Result<Orientation> {
    find_mod_k_orientation_budget(g, t, DEFAULT_BUDGET)
}

pub fn find_mod_k_orientation_budget(
    g: &Multigraph,
    t: &OrientationTarget,
    budget: u64,
) -> Result<Orientation> {
    check_k(t.k)?;
    if t.allowed.len() != g.n() {
        return Err(Error::InvalidInput("one target per vertex required".into()));
    }
    if let Some(p) = t.singletons() {
        let sum: i64 = p.iter().sum();
        let k = t.k as i64;
        if rk(sum, k) != rk(g.num_edges() as i64, k) {
            return Err(Error::NecessaryConditionViolated(format!(
                "sum of targets {sum} is not congruent to |E| = {} mod {k}",
                g.num_edges()
            )));
        }
    }
    let mut search = Search::new(g, t, budget);
    match search.run() {
        Some(choice) => Ok(search.orientation(&choice)),
        None if search.nodes > budget => Err(Error::SearchExhausted(search.nodes)),
        None => Err(Error::Infeasible("no orientation meets the residue targets".into())),
    }
}

/// Visits residue-feasible orientations (one per choice of bundle counts)
/// until `accept` returns true; returns the accepted one. Budget overruns
/// surface as `SearchExhausted`.
pub fn search_mod_k_orientations(
    g: &Multigraph,
    t: &OrientationTarget,
    budget: u64,
    mut accept: impl FnMut(&Orientation) -> bool,
) -> Result<Option<Orientation>> {
    check_k(t.k)?;
    if t.allowed.len() != g.n() {
        return Err(Error::InvalidInput("one target per vertex required".into()));
    }
    let mut search = Search::new(g, t, budget);
    let mut found = None;
    let mut visit = |s: &Search, choice: &[usize]| {
        let d = s.orientation(choice);
        if accept(&d) {
            found = Some(d);
            true
        } else {
            false
        }
    };
    search.enumerate(&mut visit);
    if found.is_none() && search.nodes > budget {
        return Err(Error::SearchExhausted(search.nodes));
    }
    Ok(found)
}

struct Bundle {
    u: usize,
    v: usize,
    edges: Vec<usize>,
}

struct Search<'a> {
    g: &'a Multigraph,
    t: &'a OrientationTarget,
    k: usize,
    bundles: Vec<Bundle>,
    /// Vertices whose last bundle is bundle `i`.
    finishing: Vec<Vec<usize>>,
    remaining: Vec<Vec<usize>>,
    base: Vec<usize>,
    failed: HashSet<(usize, Vec<u8>)>,
    budget: u64,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a Multigraph, t: &'a OrientationTarget, budget: u64) -> Self {
        let n = g.n();
        let mut base = vec![0usize; n];
        let mut by_pair: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
            Default::default();
        for (e, a, b) in g.edges() {
            if a == b {
                base[a] += 1;
            } else {
                let (u, v) = (a.min(b), a.max(b));
                by_pair.entry((v, u)).or_default().push(e);
            }
        }
        let bundles: Vec<Bundle> =
            by_pair.into_iter().map(|((v, u), edges)| Bundle { u, v, edges }).collect();
        let mut last = vec![None; n];
        for (i, b) in bundles.iter().enumerate() {
            last[b.u] = Some(i);
            last[b.v] = Some(i);
        }
        let mut finishing = vec![Vec::new(); bundles.len()];
        for (v, l) in last.iter().enumerate() {
            if let Some(i) = l {
                finishing[*i].push(v);
            }
        }
        // remaining[i][v]: bundle multiplicity at v from bundle i onward.
        let mut remaining = vec![vec![0usize; n]; bundles.len() + 1];
        for i in (0..bundles.len()).rev() {
            remaining[i] = remaining[i + 1].clone();
            remaining[i][bundles[i].u] += bundles[i].edges.len();
            remaining[i][bundles[i].v] += bundles[i].edges.len();
        }
        let mut s = Search {
            g,
            t,
            k: t.k,
            bundles,
            finishing,
            remaining,
            base,
            failed: HashSet::new(),
            budget,
            nodes: 0,
        };
        s.base.iter_mut().for_each(|x| *x %= t.k);
        s
    }

    fn run(&mut self) -> Option<Vec<usize>> {
        let untouched_ok = (0..self.g.n())
            .filter(|&v| self.remaining[0][v] == 0)
            .all(|v| self.t.admits(v, self.base[v]));
        if !untouched_ok {
            return None;
        }
        let mut res: Vec<u8> = self.base.iter().map(|&x| x as u8).collect();
        let mut choice = Vec::with_capacity(self.bundles.len());
        self.dfs(0, &mut res, &mut choice).then_some(choice)
    }

    fn reachable(&self, v: usize, cur: usize, spare: usize) -> bool {
        if spare + 1 >= self.k {
            return self.t.allowed[v] != 0;
        }
        (0..=spare).any(|s| self.t.admits(v, cur + s))
    }

    fn dfs(&mut self, i: usize, res: &mut Vec<u8>, choice: &mut Vec<usize>) -> bool {
        if i == self.bundles.len() {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let key = (i, res.clone());
        if self.failed.contains(&key) {
            return false;
        }
        let (u, v, c) = (self.bundles[i].u, self.bundles[i].v, self.bundles[i].edges.len());
        let k = self.k;
        for j in 0..=c.min(k - 1) {
            let (ru, rv) = (res[u], res[v]);
            res[u] = ((ru as usize + j) % k) as u8;
            res[v] = ((rv as usize + c - j) % k) as u8;
            let ok = self.finishing[i].iter().all(|&w| self.t.admits(w, res[w] as usize))
                && [u, v].iter().all(|&w| {
                    let spare = self.remaining[i + 1][w];
                    spare == 0 || self.reachable(w, res[w] as usize, spare)
                });
            if ok {
                let mut saved = Vec::new();
                for &w in &self.finishing[i] {
                    saved.push((w, res[w]));
                    res[w] = 0;
                }
                choice.push(j);
                if self.dfs(i + 1, res, choice) {
                    for (w, r) in saved {
                        res[w] = r;
                    }
                    return true;
                }
                choice.pop();
                for (w, r) in saved {
                    res[w] = r;
                }
            }
            res[u] = ru;
            res[v] = rv;
        }
        if self.nodes <= self.budget {
            self.failed.insert(key);
        }
        false
    }

    fn enumerate(&mut self, visit: &mut dyn FnMut(&Search, &[usize]) -> bool) {
        let untouched_ok = (0..self.g.n())
            .filter(|&v| self.remaining[0][v] == 0)
            .all(|v| self.t.admits(v, self.base[v]));
        if !untouched_ok {
            return;
        }
        let mut res: Vec<u8> = self.base.iter().map(|&x| x as u8).collect();
        let mut choice = Vec::with_capacity(self.bundles.len());
        self.enum_dfs(0, &mut res, &mut choice, visit);
    }

    /// Returns (some solution exists below, stop requested).
    fn enum_dfs(
        &mut self,
        i: usize,
        res: &mut Vec<u8>,
        choice: &mut Vec<usize>,
        visit: &mut dyn FnMut(&Search, &[usize]) -> bool,
    ) -> (bool, bool) {
        if i == self.bundles.len() {
            return (true, visit(self, choice));
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return (true, true);
        }
        let key = (i, res.clone());
        if self.failed.contains(&key) {
            return (false, false);
        }
        let (u, v, c) = (self.bundles[i].u, self.bundles[i].v, self.bundles[i].edges.len());
        let k = self.k;
        let mut any = false;
        for j in 0..=c.min(k - 1) {
            let (ru, rv) = (res[u], res[v]);
            res[u] = ((ru as usize + j) % k) as u8;
            res[v] = ((rv as usize + c - j) % k) as u8;
            let ok = self.finishing[i].iter().all(|&w| self.t.admits(w, res[w] as usize))
                && [u, v].iter().all(|&w| {
                    let spare = self.remaining[i + 1][w];
                    spare == 0 || self.reachable(w, res[w] as usize, spare)
                });
            let mut stop = false;
            if ok {
                let saved: Vec<(usize, u8)> =
                    self.finishing[i].iter().map(|&w| (w, res[w])).collect();
                for &(w, _) in &saved {
                    res[w] = 0;
                }
                choice.push(j);
                let (found, st) = self.enum_dfs(i + 1, res, choice, visit);
                choice.pop();
                for (w, r) in saved {
                    res[w] = r;
                }
                any |= found;
                stop = st;
            }
            res[u] = ru;
            res[v] = rv;
            if stop {
                return (true, true);
            }
        }
        if !any {
            self.failed.insert(key);
        }
        (any, false)
    }

    fn orientation(&self, choice: &[usize]) -> Orientation {
        let mut tails: Vec<usize> = self.g.edges().map(|(_, u, _)| u).collect();
        for (b, &j) in self.bundles.iter().zip(choice) {
            for (pos, &e) in b.edges.iter().enumerate() {
                tails[e] = if pos < j { b.u } else { b.v };
            }
        }
        Orientation::new(self.g, tails).expect("tails are endpoints")
    }
}

/// Balanced orientation: for odd `k`, `2 d+(v) ≡ d(v)`; for even `k` on an
/// Eulerian graph, `d+(v) ≡ d(v)/2`, shifted by `k/2` on `Q`.
pub fn find_balanced_orientation(g: &Multigraph, k: usize, q: VSet) -> Result<Orientation> {
    let t = balanced_target(g, k, q)?;
    match find_mod_k_orientation(g, &t) {
        Err(Error::NecessaryConditionViolated(m)) => Err(Error::Infeasible(m)),
        other => other,
    }
}

pub fn balanced_target(g: &Multigraph, k: usize, q: VSet) -> Result<OrientationTarget> {
    check_k(k)?;
    let d = g.degrees();
    if k % 2 == 1 {
        let sets: Vec<Vec<i64>> = d
            .iter()
            .map(|&dv| (0..k as i64).filter(|&r| rk(2 * r - dv as i64, k as i64) == 0).collect())
            .collect();
        return OrientationTarget::sets(k, &sets);
    }
    if !g.is_eulerian() {
        return Err(Error::InvalidInput("even modulus needs an Eulerian graph".into()));
    }
    if q.count_ones() % 2 == 1 {
        return Err(Error::InvalidInput("even modulus needs |Q| even".into()));
    }
    let p: Vec<i64> = d
        .iter()
        .enumerate()
        .map(|(v, &dv)| dv as i64 / 2 + if contains(q, v) { k as i64 / 2 } else { 0 })
        .collect();
    OrientationTarget::exact(k, &p)
}

/// Every orientation of a small graph, in binary counting order over edge ids.
pub fn all_orientations(g: &Multigraph) -> Result<Vec<Orientation>> {
    let m = g.num_edges();
    if m > 20 {
        return Err(Error::CapExceeded(format!("|E| = {m} > 20")));
    }
    Ok((0u32..1 << m)
        .map(|mask| {
            let tails = g
                .edges()
                .map(|(e, u, v)| if mask >> e & 1 == 0 { u } else { v })
                .collect();
            Orientation::new(g, tails).unwrap()
        })
        .collect())
}
