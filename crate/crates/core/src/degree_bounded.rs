//! Factorizations with lower or upper degree bounds.

use serde::{Deserialize, Serialize};

use crate::connectivity::{connectivity_profile, ConnectivityQuery};
use crate::equitable::{directed_factorize, factorize_partial_v0, modulo_hypothesis, DirectedVariant};
use crate::error::{Error, Preconditions, Result};
use crate::factorization::{strictly_within, Factorization};
use crate::graph::{contains, full_set, rk, Multigraph, Orientation, VSet};
use crate::orientation::{find_mod_k_orientation, OrientationTarget};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundSpec {
    Interval { v0: VSet },
    MinDegrees { bounds: Vec<usize>, p: usize },
    MaxDegrees { bounds: Vec<usize>, p: usize },
    Kano { a: usize, b: usize, k: usize },
    Hilton { k: usize },
    OddConn { v0: VSet, v1: VSet },
}

/// Parity certificate that no factorization meets the interval window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpossibilityProof {
    pub k: usize,
    pub v0: VSet,
    /// `Σ_{V0} ⌊d/k⌋ + Σ_{V∖V0} ⌈d/k⌉`, odd.
    pub parity_sum: usize,
    /// `Σ_{V0} [d]_k + Σ_{V∖V0} [k-d]_k`, at most `k - 2`.
    pub residue_sum: usize,
}

impl ImpossibilityProof {
    fn compute(g: &Multigraph, k: usize, v0: VSet) -> Self {
        let mut parity_sum = 0;
        let mut residue_sum = 0;
        for (v, &d) in g.degrees().iter().enumerate() {
            if contains(v0, v) {
                parity_sum += d / k;
                residue_sum += d % k;
            } else {
                parity_sum += d.div_ceil(k);
                residue_sum += (k - d % k) % k;
            }
        }
        ImpossibilityProof { k, v0, parity_sum, residue_sum }
    }

    fn applies(&self) -> bool {
        self.parity_sum % 2 == 1 && self.residue_sum + 2 <= self.k
    }

    /// Recomputes both sums from `g`.
    pub fn verify(&self, g: &Multigraph) -> bool {
        let again = ImpossibilityProof::compute(g, self.k, self.v0);
        again == *self && again.applies()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalOutcome {
    Factorized(Factorization),
    Impossible(ImpossibilityProof),
}

/// Whether `x` is an allowed factor degree for a vertex of degree `d`.
pub fn interval_allows(x: usize, d: usize, k: usize, in_v0: bool) -> bool {
    let (fl, ce) = (d / k, d.div_ceil(k));
    x == fl || x == ce || (in_v0 && x == ce + 1) || (!in_v0 && fl >= 1 && x == fl - 1)
}

fn interval_ok(g: &Multigraph, f: &Factorization, v0: VSet) -> bool {
    let d = g.degrees();
    f.is_size_balanced()
        && f.degrees(g).iter().all(|di| {
            (0..g.n()).all(|v| interval_allows(di[v], d[v], f.k, contains(v0, v)))
        })
}

/// An absorbing vertex `z` and a set `Z ∌ z` such that the residue left at
/// `z` keeps it inside its window.
fn interval_choice(g: &Multigraph, k: usize, v0: VSet) -> Option<(VSet, usize, usize)> {
    let n = g.n();
    let deg = g.degrees();
    let r: Vec<usize> = deg.iter().map(|&d| d % k).collect();
    let e = g.num_edges() % k;
    for z in 0..n {
        let mut reach = vec![vec![false; k]; n + 1];
        reach[0][0] = true;
        for v in 0..n {
            for s in 0..k {
                if reach[v][s] {
                    reach[v + 1][s] = true;
                    if v != z {
                        reach[v + 1][(s + r[v]) % k] = true;
                    }
                }
            }
        }
        for s in (0..k).filter(|&s| reach[n][s]) {
            let t = (e + k - s) % k;
            let ok = if r[z] == 0 {
                t == 0
            } else if contains(v0, z) {
                t <= r[z]
            } else {
                t == 0 || t >= r[z]
            };
            if ok {
                let mut zs = 0;
                let mut cur = s;
                for v in (0..n).rev() {
                    if !reach[v][cur] {
                        zs |= 1 << v;
                        cur = (cur + k - r[v]) % k;
                    }
                }
                return Some((zs, z, t));
            }
        }
    }
    None
}

/// Factor degrees in `{⌊d/k⌋, ⌈d/k⌉}`, plus `⌈d/k⌉ + 1` on `V0` and
/// `⌊d/k⌋ - 1` off it, with sizes within one of `|E|/k`.
pub fn factorize_interval(g: &Multigraph, k: usize, v0: VSet, pre: Preconditions) -> Result<IntervalOutcome> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if v0 & !full_set(g.n()) != 0 {
        return Err(Error::InvalidInput("V0 is not a vertex subset".into()));
    }
    let proof = ImpossibilityProof::compute(g, k, v0);
    if proof.applies() {
        return Ok(IntervalOutcome::Impossible(proof));
    }
    if pre == Preconditions::Validate && !modulo_hypothesis(g, k) {
        return Err(Error::HypothesisUnmet("needs (2k-2)-tree- or (3k-3)-edge-connectivity".into()));
    }
    let (zs, z, t) = interval_choice(g, k, v0)
        .ok_or_else(|| Error::InternalContradiction("no absorbing vertex despite the criterion".into()))?;
    let deg = g.degrees();
    let mut p: Vec<i64> = (0..g.n()).map(|v| if contains(zs, v) { deg[v] as i64 } else { 0 }).collect();
    p[z] = t as i64;
    let d = find_mod_k_orientation(g, &OrientationTarget::exact(k, &p)?)?;
    let (f, _) = directed_factorize(g, &d, k, DirectedVariant::SizeBalanced)?;
    if !interval_ok(g, &f, v0) {
        return Err(Error::InternalContradiction("interval window violated".into()));
    }
    Ok(IntervalOutcome::Factorized(f))
}

/// Orientation with `|d+(v) - d-(v)| ≤ 1` from closed trails after pairing
/// odd vertices through a dummy vertex.
pub fn balanced_orientation(g: &Multigraph) -> Orientation {
    let n = g.n();
    let mut h = g.clone();
    let dummy = h.add_vertex();
    for v in (0..n).filter(|&v| g.degree(v) % 2 == 1) {
        h.add_edge(v, dummy);
    }
    let adj = h.adjacency();
    let mut used = vec![false; h.num_edges()];
    let mut ptr = vec![0usize; h.n()];
    let mut tails: Vec<usize> = (0..h.num_edges()).map(|e| h.ends(e).0).collect();
    for s in 0..h.n() {
        loop {
            let mut v = s;
            let mut moved = false;
            loop {
                while ptr[v] < adj[v].len() && used[adj[v][ptr[v]].0] {
                    ptr[v] += 1;
                }
                let Some(&(e, w)) = adj[v].get(ptr[v]) else { break };
                used[e] = true;
                tails[e] = v;
                v = w;
                moved = true;
            }
            if !moved {
                break;
            }
        }
    }
    tails.truncate(g.num_edges());
    Orientation::new(g, tails).expect("tails are endpoints")
}

/// Factors with `|d_i(v) - d(v)/k| < 2`, even degrees at even vertices and
/// exactly one odd factor `j_v` at each odd vertex.
pub fn hilton_parity_factorize(g: &Multigraph, k: usize) -> Result<(Factorization, Vec<Option<usize>>)> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let d = balanced_orientation(g);
    let (f, _) = directed_factorize(g, &d, k, DirectedVariant::ExactTripartition)?;
    let deg = g.degrees();
    let fd = f.degrees(g);
    let mut jv = vec![None; g.n()];
    for v in 0..g.n() {
        let odd: Vec<usize> = (0..k).filter(|&i| fd[i][v] % 2 == 1).collect();
        let ok_window = (0..k).all(|i| strictly_within(fd[i][v], deg[v], k, 2));
        let tight = [0, 1, 2 * k - 1].contains(&(deg[v] % (2 * k)));
        let ok_tight = !tight || (0..k).all(|i| strictly_within(fd[i][v], deg[v], k, 1));
        let ok_parity = if deg[v] % 2 == 0 {
            odd.is_empty()
        } else {
            odd.len() == 1 && (0..k).filter(|&i| i != odd[0]).all(|i| fd[i][v].abs_diff(fd[odd[0]][v]) == 1)
        };
        if !(ok_window && ok_tight && ok_parity) {
            return Err(Error::InternalContradiction(format!("parity factorization fails at {v}")));
        }
        jv[v] = odd.first().copied();
    }
    Ok((f, jv))
}

/// `k` factors with `2a ≤ δ(G_i) ≤ Δ(G_i) ≤ 2b`; possible iff
/// `2ka ≤ δ(G) ≤ Δ(G) ≤ 2kb`.
pub fn kano_2a2b(g: &Multigraph, k: usize, a: usize, b: usize) -> Result<Factorization> {
    if k == 0 || a > b {
        return Err(Error::InvalidInput("need k > 0 and a ≤ b".into()));
    }
    let deg = g.degrees();
    if let Some(v) = (0..g.n()).find(|&v| deg[v] < 2 * k * a || deg[v] > 2 * k * b) {
        return Err(Error::Infeasible(format!(
            "vertex {v} has degree {} outside [{}, {}]",
            deg[v],
            2 * k * a,
            2 * k * b
        )));
    }
    let (f, _) = hilton_parity_factorize(g, k)?;
    let ok = f.degrees(g).iter().flatten().all(|&x| 2 * a <= x && x <= 2 * b);
    if !ok {
        return Err(Error::InternalContradiction("[2a,2b] window violated".into()));
    }
    Ok(f)
}

fn validate_bounds(bounds: &[usize], p: usize) -> Result<usize> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::SpecInvalid(format!("p = {p} must be odd and at least 3")));
    }
    if bounds.is_empty() {
        return Err(Error::SpecInvalid("at least one bound required".into()));
    }
    if let Some(&b) = bounds.iter().find(|&&b| b + 1 < p) {
        return Err(Error::SpecInvalid(format!("bound {b} is below p - 1 = {}", p - 1)));
    }
    let total: usize = bounds.iter().sum();
    if total % p != 0 {
        return Err(Error::SpecInvalid(format!("bounds sum to {total}, not a multiple of p = {p}")));
    }
    Ok(total / p)
}

/// Merges `k` factors into `bounds.len()` parts: each odd bound takes one
/// factor from `j_set`, the remaining factors are re-split by `kano_2a2b`
/// into pieces of even degree two and handed out in index order.
fn combine(
    g: &Multigraph,
    h: &Factorization,
    j_set: &[usize],
    bounds: &[usize],
    p: usize,
    lower: bool,
) -> Result<Factorization> {
    let odd: Vec<usize> = (0..bounds.len()).filter(|&i| bounds[i] % 2 == 1).collect();
    if j_set.len() < odd.len() {
        return Err(Error::InternalContradiction("too few reserved factors".into()));
    }
    let used = &j_set[..odd.len()];
    let rest: Vec<usize> = (0..h.k).filter(|j| !used.contains(j)).collect();
    let nf = rest.len() * p / 2;
    let mut assignment = vec![usize::MAX; g.num_edges()];
    for (t, &j) in used.iter().enumerate() {
        for e in h.factor(j) {
            assignment[e] = odd[t];
        }
    }
    if nf > 0 {
        let edges: Vec<usize> = (0..g.num_edges()).filter(|e| rest.contains(&h.assignment[*e])).collect();
        let (sub, back) = g.spanning_subgraph(&edges);
        let b = if lower { sub.max_degree().div_ceil(2 * nf).max(1) } else { 1 };
        let pieces = kano_2a2b(&sub, nf, usize::from(lower), b)?;
        let mut owner = Vec::with_capacity(nf);
        for (i, &bd) in bounds.iter().enumerate() {
            let cnt = if bd % 2 == 1 { (bd - p) / 2 } else { bd / 2 };
            owner.extend(std::iter::repeat_n(i, cnt));
        }
        if owner.len() != nf {
            return Err(Error::InternalContradiction("piece count mismatch".into()));
        }
        for (se, &c) in pieces.assignment.iter().enumerate() {
            assignment[back[se]] = owner[c];
        }
    } else if assignment.contains(&usize::MAX) {
        return Err(Error::InternalContradiction("edges left without a part".into()));
    }
    let f = Factorization::new(bounds.len(), assignment)?;
    let fd = f.degrees(g);
    let ok = (0..bounds.len()).all(|i| {
        fd[i].iter().all(|&x| if lower { x >= bounds[i] } else { x <= bounds[i] })
    });
    if !ok {
        return Err(Error::InternalContradiction("combined parts miss their bounds".into()));
    }
    Ok(f)
}

fn single_part(g: &Multigraph) -> Result<Factorization> {
    Factorization::new(1, vec![0; g.num_edges()])
}

/// Parts `G_1..G_m` with `δ(G_i) ≥ bounds[i]`, where `Σ bounds = kp`.
pub fn factorize_min_degrees(g: &Multigraph, bounds: &[usize], p: usize, pre: Preconditions) -> Result<Factorization> {
    let k = validate_bounds(bounds, p)?;
    let total: usize = bounds.iter().sum();
    let deg = g.degrees();
    let n = g.n();
    if let Some(v) = (0..n).find(|&v| deg[v] < total) {
        return Err(Error::Infeasible(format!("vertex {v} has degree {} < {total}", deg[v])));
    }
    let odd = bounds.iter().filter(|&&b| b % 2 == 1).count();
    let surplus: usize = deg.iter().map(|&d| d - total).sum();
    if n % 2 == 1 && surplus + 1 < odd {
        return Err(Error::IffConditionFails(format!(
            "odd order with total surplus {surplus} < {odd} odd bounds - 1"
        )));
    }
    if bounds.len() == 1 {
        return single_part(g);
    }
    let v0 = (0..n).filter(|&v| deg[v] + 2 <= k * p + k).fold(0, |s, v| s | 1 << v);
    let all = full_set(n);
    let (h, j_set) = if v0 != all {
        (factorize_partial_v0(g, k, v0, pre)?, (0..k).collect::<Vec<_>>())
    } else if n % 2 == 0 || deg.iter().map(|&d| d % k).sum::<usize>() >= k {
        match factorize_interval(g, k, all, pre)? {
            IntervalOutcome::Factorized(f) => (f, (0..k).collect()),
            IntervalOutcome::Impossible(_) => {
                return Err(Error::InternalContradiction("lower window reported impossible".into()))
            }
        }
    } else {
        tight_case(g, k, pre, true)?
    };
    combine(g, &h, &j_set, bounds, p, true)
}

/// Parts `G_1..G_m` with `Δ(G_i) ≤ bounds[i]`, where `Σ bounds = kp`.
pub fn factorize_max_degrees(g: &Multigraph, bounds: &[usize], p: usize, pre: Preconditions) -> Result<Factorization> {
    let k = validate_bounds(bounds, p)?;
    let total: usize = bounds.iter().sum();
    let deg = g.degrees();
    let n = g.n();
    if let Some(v) = (0..n).find(|&v| deg[v] > total) {
        return Err(Error::Infeasible(format!("vertex {v} has degree {} > {total}", deg[v])));
    }
    let odd = bounds.iter().filter(|&&b| b % 2 == 1).count();
    let slack: usize = deg.iter().map(|&d| total - d).sum();
    if n % 2 == 1 && slack + 1 < odd {
        return Err(Error::IffConditionFails(format!(
            "odd order with total slack {slack} < {odd} odd bounds - 1"
        )));
    }
    if bounds.len() == 1 {
        return single_part(g);
    }
    let v0 = (0..n).filter(|&v| deg[v] + k >= k * p + 2).fold(0, |s, v| s | 1 << v);
    let all = full_set(n);
    let (h, j_set) = if v0 != all {
        (factorize_partial_v0(g, k, v0, pre)?, (0..k).collect::<Vec<_>>())
    } else if n % 2 == 0 || deg.iter().map(|&d| (k - d % k) % k).sum::<usize>() >= k {
        match factorize_interval(g, k, 0, pre)? {
            IntervalOutcome::Factorized(f) => (f, (0..k).collect()),
            IntervalOutcome::Impossible(_) => {
                return Err(Error::InternalContradiction("upper window reported impossible".into()))
            }
        }
    } else {
        tight_case(g, k, pre, false)?
    };
    combine(g, &h, &j_set, bounds, p, false)
}

/// Odd order with every vertex at the boundary: shift the residue at the
/// first vertex by half the deficit and pair the low and high factors there.
fn tight_case(g: &Multigraph, k: usize, pre: Preconditions, lower: bool) -> Result<(Factorization, Vec<usize>)> {
    if pre == Preconditions::Validate && !modulo_hypothesis(g, k) {
        return Err(Error::HypothesisUnmet("needs (2k-2)-tree- or (3k-3)-edge-connectivity".into()));
    }
    let deg = g.degrees();
    let res: usize = if lower {
        deg.iter().map(|&d| d % k).sum()
    } else {
        deg.iter().map(|&d| (k - d % k) % k).sum()
    };
    let shift = ((k - res) / 2) as i64;
    let z = 0;
    let mut p: Vec<i64> = deg.iter().map(|&d| d as i64).collect();
    p[z] += if lower { shift } else { -shift };
    let d = find_mod_k_orientation(g, &OrientationTarget::exact(k, &p)?)?;
    let (h, tri) = directed_factorize(g, &d, k, DirectedVariant::ExactTripartition)?;
    let [j0, _, j2] = &tri.parts[z];
    let paired: Vec<usize> = if lower {
        j0.iter().chain(j2.iter().take(j0.len())).copied().collect()
    } else {
        j2.iter().chain(j0.iter().take(j2.len())).copied().collect()
    };
    let j_set = (0..k).filter(|j| !paired.contains(j)).collect();
    Ok((h, j_set))
}

/// Whether `x` fits the odd-connectivity windows at a vertex.
fn odd_conn_allows(x: usize, d: usize, k: usize, plus: bool, minus: bool) -> bool {
    if !strictly_within(x, d, k, 2) {
        return false;
    }
    let (fl, ce) = (d / k, d.div_ceil(k));
    (plus || x <= ce) && (minus || x >= fl)
}

/// `Q` from the floor/ceiling parities on `V0` and `V1`.
pub fn odd_conn_q(g: &Multigraph, k: usize, v0: VSet, v1: VSet) -> VSet {
    g.degrees().iter().enumerate().fold(0, |q, (v, &d)| {
        let odd = (contains(v0, v) && (d / k) % 2 == 1) || (contains(v1, v) && d.div_ceil(k) % 2 == 1);
        if odd {
            q | 1 << v
        } else {
            q
        }
    })
}

/// Factors with sizes within one of `|E|/k` and `|d_i(v) - d(v)/k| < 2`,
/// never above `⌈d/k⌉` outside `V0` and residue `k-1`, never below `⌊d/k⌋`
/// outside `V1` and residue `1`, for `v ∈ V0 ∪ V1`.
pub fn odd_conn_factorize(g: &Multigraph, k: usize, v0: VSet, v1: VSet, pre: Preconditions) -> Result<Factorization> {
    let n = g.n();
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let all = full_set(n);
    if (v0 | v1) & !all != 0 || v0 & v1 != 0 {
        return Err(Error::InvalidInput("V0 and V1 must be disjoint vertex subsets".into()));
    }
    let deg = g.degrees();
    if let Some(v) = (0..n).find(|&v| contains(v0, v) && deg[v] % k != k - 1) {
        return Err(Error::InvalidInput(format!("vertex {v} in V0 needs degree ≡ k-1")));
    }
    if let Some(v) = (0..n).find(|&v| contains(v1, v) && deg[v] % k != 1 % k) {
        return Err(Error::InvalidInput(format!("vertex {v} in V1 needs degree ≡ 1")));
    }
    let fixed = v0 | v1;
    let q = odd_conn_q(g, k, v0, v1);
    if fixed == all && q.count_ones() % 2 == 1 {
        return Err(Error::ParityObstruction(format!("|Q| = {} is odd and V0 ∪ V1 = V", q.count_ones())));
    }
    if pre == Preconditions::Validate {
        let prof = connectivity_profile(g, &ConnectivityQuery::odd_q(3 * k - 3, q).partial(fixed))?;
        if !prof.holds {
            return Err(Error::HypothesisUnmet(format!(
                "cut {:?} has fewer than {} edges",
                prof.witness_cut,
                3 * k - 3
            )));
        }
    }
    let z0 = all & !fixed;
    let first_free = (z0 != 0).then(|| z0.trailing_zeros() as usize);
    let mut g0 = g.clone();
    let mut pair: Vec<usize> = if k % 2 == 1 {
        (0..n)
            .filter(|&v| {
                (contains(v0, v) && deg[v] % 2 != (deg[v] / k) % 2)
                    || (contains(v1, v) && deg[v] % 2 != deg[v].div_ceil(k) % 2)
            })
            .collect()
    } else {
        (0..n).filter(|&v| deg[v] % 2 == 1).collect()
    };
    if pair.len() % 2 == 1 {
        match first_free.filter(|z| !pair.contains(z)) {
            Some(z) => {
                pair.push(z);
                pair.sort_unstable();
            }
            None => return Err(Error::ParityObstruction("cannot pair the parity-defect vertices".into())),
        }
    }
    for c in pair.chunks(2) {
        g0.add_edge(c[0], c[1]);
    }
    let d0 = g0.degrees();
    let ki = k as i64;
    let sets: Vec<Vec<i64>> = (0..n)
        .map(|v| {
            if !contains(fixed, v) {
                return Vec::new();
            }
            let dv = d0[v] as i64;
            if k % 2 == 1 {
                (0..ki).filter(|&r| rk(2 * r - dv, ki) == 0).collect()
            } else {
                vec![dv / 2 + if contains(q, v) { ki / 2 } else { 0 }]
            }
        })
        .collect();
    let d = find_mod_k_orientation(&g0, &OrientationTarget::sets(k, &sets)?)?;
    let d = Orientation::new(g, d.tails()[..g.num_edges()].to_vec())?;
    let (f, _) = directed_factorize(g, &d, k, DirectedVariant::SizeBalanced)?;
    let fd = f.degrees(g);
    let ok = (0..n).all(|v| {
        let r = deg[v] % k;
        let plus = contains(v0, v) || r == k - 1 || !contains(fixed, v);
        let minus = contains(v1, v) || r == 1 || !contains(fixed, v);
        (0..k).all(|i| odd_conn_allows(fd[i][v], deg[v], k, plus, minus))
    });
    if !ok {
        return Err(Error::InternalContradiction("odd-connectivity windows violated".into()));
    }
    Ok(f)
}
