//! Bipartite machinery: König colouring, `(g,f)`-factors, the Folkman–Fulkerson
//! condition, de Werra factorization, the strongly equitable `z1`/`z2`
//! construction and size balancing by alternating-path swaps.

use serde::{Deserialize, Serialize};

use crate::connectivity::{for_each_cut, SUBSET_CAP};
use crate::error::{Error, Result};
use crate::factorization::{ceil_div, floor_div, strictly_within, Factorization};
use crate::flow::BoundedNet;
use crate::graph::{contains, full_set, members, rk, Multigraph, VSet};

/// Degree window `[g(v), f(v)]`, optionally with a parity set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSpec {
    pub g: Vec<i64>,
    pub f: Vec<i64>,
    /// Vertices where `d_F(v) ≡ f(v) (mod 2)` is required.
    pub parity: Option<VSet>,
}

impl DegreeSpec {
    pub fn new(g: Vec<i64>, f: Vec<i64>) -> Self {
        DegreeSpec { g, f, parity: None }
    }

    pub fn exact(f: Vec<i64>) -> Self {
        DegreeSpec { g: f.clone(), f, parity: None }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.g.len() != n || self.f.len() != n {
            return Err(Error::InvalidInput("degree spec needs one bound per vertex".into()));
        }
        if let Some(v) = (0..n).find(|&v| self.g[v] > self.f[v]) {
            return Err(Error::InvalidInput(format!("g > f at vertex {v}")));
        }
        Ok(())
    }

    /// Whether the factor with the given degrees satisfies the spec.
    pub fn admits(&self, deg: &[usize]) -> bool {
        deg.iter().enumerate().all(|(v, &d)| {
            let d = d as i64;
            self.g[v] <= d
                && d <= self.f[v]
                && self.parity.is_none_or(|p| !contains(p, v) || rk(d - self.f[v], 2) == 0)
        })
    }
}

/// Colour per edge; artificial edges are excluded from the colour sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub k: usize,
    pub color: Vec<usize>,
    pub artificial: Vec<bool>,
}

impl EdgeColoring {
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for (e, &c) in self.color.iter().enumerate() {
            if !self.artificial[e] {
                s[c] += 1;
            }
        }
        s
    }

    pub fn is_proper(&self, h: &Multigraph) -> bool {
        let mut seen = vec![vec![false; self.k]; h.n()];
        for (e, u, v) in h.edges() {
            let c = self.color[e];
            if u == v || seen[u][c] || seen[v][c] {
                return false;
            }
            seen[u][c] = true;
            seen[v][c] = true;
        }
        true
    }
}

fn sides_of(h: &Multigraph) -> Result<Vec<bool>> {
    h.bipartition().ok_or_else(|| Error::InvalidInput("graph is not bipartite".into()))
}

pub fn konig_edge_coloring(h: &Multigraph, k: usize) -> Result<EdgeColoring> {
    konig_with_artificial(h, k, vec![false; h.num_edges()])
}

pub(crate) fn konig_with_artificial(h: &Multigraph, k: usize, artificial: Vec<bool>) -> Result<EdgeColoring> {
    sides_of(h)?;
    if h.max_degree() > k {
        return Err(Error::InvalidInput(format!("maximum degree exceeds {k}")));
    }
    let n = h.n();
    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; k]; n];
    let mut color = vec![usize::MAX; h.num_edges()];
    let free = |at: &Vec<Vec<Option<usize>>>, v: usize| (0..k).find(|&c| at[v][c].is_none());
    for (e, u, v) in h.edges() {
        let a = free(&at, u).expect("degree bound leaves a free colour");
        let c = if at[v][a].is_none() {
            a
        } else {
            let b = free(&at, v).expect("degree bound leaves a free colour");
            if at[u][b].is_none() {
                b
            } else {
                // Swap a and b along the path from v that starts with colour a.
                let mut path = Vec::new();
                let (mut x, mut want) = (v, a);
                while let Some(f) = at[x][want] {
                    path.push(f);
                    x = h.other(f, x);
                    want = if want == a { b } else { a };
                }
                for &f in &path {
                    let (p, q) = h.ends(f);
                    at[p][color[f]] = None;
                    at[q][color[f]] = None;
                }
                for &f in &path {
                    let (p, q) = h.ends(f);
                    color[f] = if color[f] == a { b } else { a };
                    at[p][color[f]] = Some(f);
                    at[q][color[f]] = Some(f);
                }
                a
            }
        };
        color[e] = c;
        at[u][c] = Some(e);
        at[v][c] = Some(e);
    }
    Ok(EdgeColoring { k, color, artificial })
}

/// A factor (as sorted edge ids) with `g <= d_F <= f`, or `None`.
pub fn gf_factor(h: &Multigraph, s: &DegreeSpec) -> Result<Option<Vec<usize>>> {
    s.validate(h.n())?;
    let side = sides_of(h)?;
    let n = h.n();
    if s.f.iter().any(|&f| f < 0) {
        return Ok(None);
    }
    let (src, snk) = (n, n + 1);
    let mut net = BoundedNet::new(n + 2);
    for v in 0..n {
        let (lo, hi) = (s.g[v].max(0), s.f[v]);
        if side[v] {
            net.add_arc(v, snk, lo, hi);
        } else {
            net.add_arc(src, v, lo, hi);
        }
    }
    let mut edge_arc = Vec::with_capacity(h.num_edges());
    for (_, u, v) in h.edges() {
        let (x, y) = if side[u] { (v, u) } else { (u, v) };
        edge_arc.push(net.add_arc(x, y, 0, 1));
    }
    net.add_arc(snk, src, 0, i64::MAX / 4);
    Ok(net
        .circulation()
        .map(|flow| (0..h.num_edges()).filter(|&e| flow[edge_arc[e]] == 1).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMode {
    Plain,
    /// The `m/k`-weighted form, scaled by `k` to stay integral.
    Ratio { m: i64, k: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub holds: bool,
    /// The most violated `(A, B)` when the condition fails.
    pub witness: Option<(VSet, VSet)>,
}

/// Folkman–Fulkerson condition over all `A, B` on opposite sides.
pub fn ff_oracle(h: &Multigraph, s: &DegreeSpec, mode: OracleMode) -> Result<OracleOutcome> {
    s.validate(h.n())?;
    let n = h.n();
    if n > SUBSET_CAP {
        return Err(Error::CapExceeded(format!("n = {n} > {SUBSET_CAP}")));
    }
    let side = sides_of(h)?;
    let x: VSet = (0..n).filter(|&v| !side[v]).fold(0, |a, v| a | 1 << v);
    let y = full_set(n) & !x;
    let d: Vec<i64> = h.degrees().iter().map(|&v| v as i64).collect();
    match mode {
        OracleMode::Plain => Ok(ff_plain(h, s, &d, x, y)),
        OracleMode::Ratio { m, k } => {
            if k <= 0 || m <= 0 || m > k {
                return Err(Error::InvalidInput("ratio mode needs 0 < m <= k".into()));
            }
            Ok(ff_ratio(h, s, &d, x, y, m, k))
        }
    }
}

fn ff_plain(h: &Multigraph, s: &DegreeSpec, d: &[i64], x: VSet, y: VSet) -> OracleOutcome {
    let n = h.n();
    let mut mult = vec![vec![0i64; n]; n];
    for &(u, v) in h.edge_list() {
        mult[u][v] += 1;
        mult[v][u] += 1;
    }
    let mut worst: Option<(i64, VSet, VSet)> = None;
    for (from, to) in [(x, y), (y, x)] {
        let from_v: Vec<usize> = members(from).collect();
        for mask in 0u64..1 << from_v.len() {
            let a: VSet = members(mask).fold(0, |acc, i| acc | 1 << from_v[i]);
            let fa: i64 = members(a).map(|v| s.f[v]).sum();
            // For fixed A the best B takes every b with positive net contribution.
            let mut b: VSet = 0;
            let mut gain = 0;
            for bv in members(to) {
                let col: i64 = members(a).map(|av| mult[av][bv]).sum();
                let net = col - (d[bv] - s.g[bv]);
                if net > 0 {
                    b |= 1 << bv;
                    gain += net;
                }
            }
            let violation = gain - fa;
            if violation > 0 && worst.is_none_or(|(w, _, _)| violation > w) {
                worst = Some((violation, a, b));
            }
        }
    }
    OracleOutcome { holds: worst.is_none(), witness: worst.map(|(_, a, b)| (a, b)) }
}

fn ff_ratio(h: &Multigraph, s: &DegreeSpec, d: &[i64], x: VSet, y: VSet, m: i64, k: i64) -> OracleOutcome {
    let ends: Vec<(VSet, VSet)> = h.edge_list().iter().map(|&(u, v)| (1 << u, 1 << v)).collect();
    // edges with exactly one end in `a` after deleting the vertices of `del`
    let cut_without = |a: VSet, del: VSet| -> i64 {
        ends.iter()
            .filter(|&&(p, q)| (p | q) & del == 0 && ((p & a != 0) != (q & a != 0)))
            .count() as i64
    };
    let mut worst: Option<(i64, VSet, VSet)> = None;
    for (from, to) in [(x, y), (y, x)] {
        let fv: Vec<usize> = members(from).collect();
        let tv: Vec<usize> = members(to).collect();
        for am in 0u64..1 << fv.len() {
            let a: VSet = members(am).fold(0, |acc, i| acc | 1 << fv[i]);
            let sa: i64 = members(a).map(|v| k * s.f[v] - m * d[v]).sum();
            for bm in 0u64..1 << tv.len() {
                let b: VSet = members(bm).fold(0, |acc, i| acc | 1 << tv[i]);
                let sb: i64 = members(b).map(|v| m * d[v] - k * s.g[v]).sum();
                let rhs = sa + sb + m * cut_without(a, b) + (k - m) * cut_without(b, a);
                if rhs < 0 && worst.is_none_or(|(w, _, _)| rhs < w) {
                    worst = Some((rhs, a, b));
                }
            }
        }
    }
    OracleOutcome { holds: worst.is_none(), witness: worst.map(|(_, a, b)| (a, b)) }
}

/// Factorization with `|d_i(v) - d(v)/k| < 1` at every vertex and sizes
/// within one of `|E|/k`.
pub fn dewerra_factorize(h: &Multigraph, k: usize) -> Result<Factorization> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    sides_of(h)?;
    let d: Vec<i64> = h.degrees().iter().map(|&x| x as i64).collect();
    let ki = k as i64;
    let mut assignment = vec![k - 1; h.num_edges()];
    let mut rest: Vec<usize> = (0..h.num_edges()).collect();
    for color in 0..k - 1 {
        let j = (k - color) as i64;
        let (sub, back) = h.spanning_subgraph(&rest);
        let dr = sub.degrees();
        let (mut g, mut f) = (Vec::new(), Vec::new());
        for v in 0..h.n() {
            let dv = dr[v] as i64;
            g.push(floor_div(dv, j).max(floor_div(d[v], ki)));
            f.push(ceil_div(dv, j).min(ceil_div(d[v], ki)));
        }
        let picked = gf_factor(&sub, &DegreeSpec::new(g, f))?.ok_or_else(|| {
            Error::InternalContradiction("bipartite graph lacks an equitable factor".into())
        })?;
        let mut taken = vec![false; rest.len()];
        for &e in &picked {
            assignment[back[e]] = color;
            taken[e] = true;
        }
        rest = rest.iter().enumerate().filter(|&(i, _)| !taken[i]).map(|(_, &e)| e).collect();
    }
    let c = EdgeColoring { k, color: assignment, artificial: vec![false; h.num_edges()] };
    let out = Factorization::new(k, balance_sizes(h, &c)?.color)?;
    if !out.is_equitable(h) || !out.is_size_balanced() {
        return Err(Error::InternalContradiction("bipartite split misses its bounds".into()));
    }
    Ok(out)
}

/// Which item of the strongly equitable hypotheses holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrongCase {
    I,
    II,
}

/// Sides of `h` with `z1` on the first side (`false`) and `z2` on the second.
fn oriented_sides(h: &Multigraph, z1: usize, z2: usize) -> Result<Vec<bool>> {
    let mut side = sides_of(h)?;
    let comps = h.components();
    for c in comps {
        let flip = (c.contains(&z1) && side[z1]) || (c.contains(&z2) && !c.contains(&z1) && !side[z2]);
        if flip {
            for &v in &c {
                side[v] = !side[v];
            }
        }
    }
    if side[z1] || !side[z2] {
        return Err(Error::HypothesisUnmet("z1 and z2 must lie on opposite sides".into()));
    }
    Ok(side)
}

/// Checks the residue and cut hypotheses; returns the item that applies.
pub fn strongly_equitable_hypotheses(
    h: &Multigraph,
    k: usize,
    z1: usize,
    z2: usize,
    m: usize,
) -> Result<StrongCase> {
    if z1 >= h.n() || z2 >= h.n() || z1 == z2 {
        return Err(Error::InvalidInput("z1, z2 must be distinct vertices".into()));
    }
    if m == 0 || m > k {
        return Err(Error::HypothesisUnmet(format!("m = {m} outside 1..={k}")));
    }
    let side = oriented_sides(h, z1, z2)?;
    let (ki, mi) = (k as i64, m as i64);
    let d: Vec<i64> = h.degrees().iter().map(|&x| x as i64).collect();
    let r = |v: usize| rk(d[v], ki);
    for v in 0..h.n() {
        if v == z1 || v == z2 {
            continue;
        }
        let ok = if side[v] { r(v) >= mi || r(v) == 0 } else { r(v) <= ki - mi };
        if !ok {
            return Err(Error::HypothesisUnmet(format!("residue of vertex {v} out of range")));
        }
    }
    let sigma = d[z1] + d[z2];
    let rs = rk(sigma, ki);
    let base: i64 = (0..h.n())
        .filter(|&v| v != z1 && v != z2)
        .map(|v| if side[v] { rk(ki - d[v], ki) } else { r(v) })
        .sum();
    let case_i = r(z2) == ki - mi && rs <= ki - mi && rs + base != ki - 2 * mi;
    let case_ii = r(z1) == mi && (rs >= mi || rs == 0) && base + rk(ki - sigma, ki) != ki - 2 * mi;
    let case = match (case_i, case_ii) {
        (true, _) => StrongCase::I,
        (false, true) => StrongCase::II,
        _ => return Err(Error::HypothesisUnmet("neither item (i) nor item (ii) holds".into())),
    };
    if h.n() > SUBSET_CAP {
        return Err(Error::CapExceeded(format!("n = {} > {SUBSET_CAP}", h.n())));
    }
    let all = full_set(h.n());
    let zz = (1u64 << z1) | (1u64 << z2);
    // X ranges over proper supersets of {z1, z2} via its nonempty complement.
    let mut bad = None;
    for_each_cut(h, all & !zz, |rest, cut| {
        if bad.is_none() && cut + 1 < k {
            bad = Some(all & !rest);
        }
    });
    if let Some(x) = bad {
        return Err(Error::HypothesisUnmet(format!("cut of {x:#b} below k - 1")));
    }
    Ok(case)
}

/// The `(g, f)` bounds used by the strongly equitable construction.
pub fn strongly_equitable_bounds(
    h: &Multigraph,
    k: usize,
    z1: usize,
    z2: usize,
    m: usize,
    case: StrongCase,
) -> Result<DegreeSpec> {
    let (ki, mi) = (k as i64, m as i64);
    let d: Vec<i64> = h.degrees().iter().map(|&x| x as i64).collect();
    let exact = |num: i64| -> Result<i64> {
        if rk(num, ki) != 0 {
            return Err(Error::InternalContradiction("non-integral degree bound".into()));
        }
        Ok(num / ki)
    };
    let mut g = vec![0; h.n()];
    let mut f = vec![0; h.n()];
    for v in 0..h.n() {
        let r = rk(d[v], ki);
        let base = exact(mi * (d[v] - r))?;
        g[v] = (r - (ki - mi)).max(0) + base;
        f[v] = mi.min(r) + base;
    }
    let r = rk(d[z1] + d[z2], ki);
    match case {
        StrongCase::I => {
            let base = exact(mi * (d[z1] - mi - r))?;
            g[z1] = (r - (ki - mi)).max(0) + base + mi;
            f[z1] = mi.min(r) + base + mi;
            g[z2] = exact(mi * (d[z2] - (ki - mi)))?;
            f[z2] = g[z2];
        }
        StrongCase::II => {
            g[z1] = exact(mi * (d[z1] - mi))? + mi;
            f[z1] = g[z1];
            let base = exact(mi * (d[z2] - (ki - mi) - r))?;
            g[z2] = (r - (ki - mi)).max(0) + base;
            f[z2] = mi.min(r) + base;
        }
    }
    Ok(DegreeSpec::new(g, f))
}

/// Whether `fac` meets the three strongly equitable bounds.
pub fn strongly_equitable_holds(h: &Multigraph, fac: &Factorization, z1: usize, z2: usize) -> bool {
    let k = fac.k;
    let d = h.degrees();
    let deg = fac.degrees(h);
    fac.is_size_balanced()
        && deg.iter().all(|di| {
            (0..h.n())
                .filter(|&v| v != z1 && v != z2)
                .all(|v| strictly_within(di[v], d[v], k, 1))
                && strictly_within(di[z1] + di[z2], d[z1] + d[z2], k, 1)
        })
}

pub fn strongly_equitable_factorize(
    h: &Multigraph,
    k: usize,
    z1: usize,
    z2: usize,
    m: usize,
) -> Result<Factorization> {
    let case = strongly_equitable_hypotheses(h, k, z1, z2, m)?;
    let spec = strongly_equitable_bounds(h, k, z1, z2, m, case)?;
    let f_edges = gf_factor(h, &spec)?
        .ok_or_else(|| Error::InternalContradiction("no (g,f)-factor under the hypotheses".into()))?;
    let mut in_f = vec![false; h.num_edges()];
    for &e in &f_edges {
        in_f[e] = true;
    }
    let f0_edges: Vec<usize> = (0..h.num_edges()).filter(|&e| !in_f[e]).collect();
    let mut assignment = vec![0; h.num_edges()];
    let (fg, fback) = h.spanning_subgraph(&f_edges);
    let part = dewerra_factorize(&fg, m)?;
    for (e, &c) in part.assignment.iter().enumerate() {
        assignment[fback[e]] = c;
    }
    if k > m {
        let (cg, cback) = h.spanning_subgraph(&f0_edges);
        let part = dewerra_factorize(&cg, k - m)?;
        for (e, &c) in part.assignment.iter().enumerate() {
            assignment[cback[e]] = m + c;
        }
    } else if !f0_edges.is_empty() {
        return Err(Error::InternalContradiction("m = k leaves edges outside F".into()));
    }
    let mut color = assignment;
    let stubs = strong_stubs(h, &color, k, z1, z2, m);
    let artificial = vec![false; h.num_edges()];
    balance_on_stubs(&stubs, &mut color, &artificial, k)?;
    let out = Factorization::new(k, color)?;
    if !strongly_equitable_holds(h, &out, z1, z2) {
        return Err(Error::InternalContradiction("strongly equitable bounds fail".into()));
    }
    Ok(out)
}

/// Stub endpoints per edge: each vertex is cut into groups of edge ends with
/// distinct colours. When possible one group takes colours `0..m` from `z1`
/// and `m..k` from `z2`, so it carries every colour.
fn strong_stubs(h: &Multigraph, color: &[usize], k: usize, z1: usize, z2: usize, m: usize) -> Vec<(usize, usize)> {
    let mut reserved: Vec<[bool; 2]> = vec![[false, false]; h.num_edges()];
    let pick = |v: usize, range: std::ops::Range<usize>| -> Option<Vec<(usize, usize)>> {
        range
            .map(|c| {
                h.edges()
                    .find(|&(e, a, b)| color[e] == c && (a == v || b == v))
                    .map(|(e, a, _)| (e, if a == v { 0 } else { 1 }))
            })
            .collect()
    };
    let mut merged = None;
    if let (Some(p1), Some(p2)) = (pick(z1, 0..m), pick(z2, m..k)) {
        for &(e, end) in p1.iter().chain(&p2) {
            reserved[e][end] = true;
        }
        merged = Some(());
    }
    let mut stubs = generic_stubs(h, color, k, &reserved);
    if merged.is_some() {
        let id = stubs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|&x| x != usize::MAX)
            .max()
            .map_or(0, |x| x + 1);
        for (e, r) in reserved.iter().enumerate() {
            if r[0] {
                stubs[e].0 = id;
            }
            if r[1] {
                stubs[e].1 = id;
            }
        }
    }
    stubs
}

/// Groups each vertex's edge ends so that the `j`-th end of every colour lands
/// in group `j`. Reserved ends are skipped (the caller assigns them).
fn generic_stubs(h: &Multigraph, color: &[usize], k: usize, reserved: &[[bool; 2]]) -> Vec<(usize, usize)> {
    let mut stubs = vec![(usize::MAX, usize::MAX); h.num_edges()];
    let mut next = 0;
    for v in 0..h.n() {
        let mut count = vec![0usize; k];
        let mut local: Vec<usize> = Vec::new();
        for (e, a, b) in h.edges() {
            for (end, w) in [(0, a), (1, b)] {
                if w != v || reserved[e][end] {
                    continue;
                }
                let j = count[color[e]];
                count[color[e]] += 1;
                if j == local.len() {
                    local.push(next);
                    next += 1;
                }
                if end == 0 {
                    stubs[e].0 = local[j];
                } else {
                    stubs[e].1 = local[j];
                }
            }
        }
    }
    stubs
}

/// Recolours alternating two-coloured components until every real colour
/// class has size within 1 of the average. Stubs must see each colour at
/// most once.
pub(crate) fn balance_on_stubs(stubs: &[(usize, usize)], color: &mut [usize], artificial: &[bool], k: usize) -> Result<()> {
    let real = artificial.iter().filter(|&&a| !a).count();
    let nstubs = stubs.iter().flat_map(|&(a, b)| [a, b]).max().map_or(0, |x| x + 1);
    loop {
        let mut sizes = vec![0usize; k];
        for (e, &c) in color.iter().enumerate() {
            if !artificial[e] {
                sizes[c] += 1;
            }
        }
        if sizes.iter().all(|&s| strictly_within(s, real, k, 1)) {
            return Ok(());
        }
        let hi = (0..k).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap();
        let lo = (0..k).min_by_key(|&c| (sizes[c], c)).unwrap();
        let gap = sizes[hi] - sizes[lo];
        // components of the subgraph coloured hi or lo
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nstubs];
        for (e, &(a, b)) in stubs.iter().enumerate() {
            if color[e] == hi || color[e] == lo {
                adj[a].push(e);
                adj[b].push(e);
            }
        }
        let mut seen = vec![false; color.len()];
        let mut chosen = None;
        for start in 0..color.len() {
            if seen[start] || (color[start] != hi && color[start] != lo) {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let (a, b) = stubs[comp[i]];
                for s in [a, b] {
                    for &f in &adj[s] {
                        if !seen[f] {
                            seen[f] = true;
                            comp.push(f);
                        }
                    }
                }
                i += 1;
            }
            let diff: i64 = comp
                .iter()
                .filter(|&&e| !artificial[e])
                .map(|&e| if color[e] == hi { 1 } else { -1 })
                .sum();
            if diff >= 1 && (diff as usize) < gap {
                chosen = Some(comp);
                break;
            }
        }
        let comp = chosen.ok_or_else(|| {
            Error::InternalContradiction("no alternating component reduces the size gap".into())
        })?;
        for e in comp {
            color[e] = if color[e] == hi { lo } else { hi };
        }
    }
}

/// Balances colour-class sizes with alternating-path swaps, keeping every
/// vertex's per-colour counts inside the window they started in.
pub fn balance_sizes(h: &Multigraph, c: &EdgeColoring) -> Result<EdgeColoring> {
    if h.has_loops() {
        return Err(Error::InvalidInput("loops are not allowed".into()));
    }
    let reserved = vec![[false, false]; h.num_edges()];
    let stubs = generic_stubs(h, &c.color, c.k, &reserved);
    let mut color = c.color.clone();
    balance_on_stubs(&stubs, &mut color, &c.artificial, c.k)?;
    Ok(EdgeColoring { k: c.k, color, artificial: c.artificial.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use crate::graph::vset;

    #[test]
    fn konig_examples() {
        let c = konig_edge_coloring(&cycle(4), 2).unwrap();
        assert!(c.is_proper(&cycle(4)));
        assert_eq!(c.sizes(), vec![2, 2]);
        let s = konig_edge_coloring(&star(3), 3).unwrap();
        assert_eq!(s.sizes(), vec![1, 1, 1]);
        let p = konig_edge_coloring(&path(4), 2).unwrap();
        assert_eq!(p.color, vec![0, 1, 0]);
        assert!(konig_edge_coloring(&cycle(3), 3).is_err());
    }

    #[test]
    fn dewerra_examples() {
        let f = dewerra_factorize(&cycle(4), 2).unwrap();
        assert!(f.degrees(&cycle(4)).iter().all(|d| d.iter().all(|&x| x == 1)));
        let k33 = complete_bipartite(3, 3);
        let f = dewerra_factorize(&k33, 3).unwrap();
        assert!(f.degrees(&k33).iter().all(|d| d.iter().all(|&x| x == 1)));
        let b = bundle(5);
        let f = dewerra_factorize(&b, 2).unwrap();
        let mut s = f.sizes();
        s.sort();
        assert_eq!(s, vec![2, 3]);
    }

    #[test]
    fn gf_examples() {
        let p = path(3);
        assert_eq!(gf_factor(&p, &DegreeSpec::exact(vec![1, 2, 1])).unwrap(), Some(vec![0, 1]));
        let c4 = cycle(4);
        let m = gf_factor(&c4, &DegreeSpec::exact(vec![1; 4])).unwrap().unwrap();
        assert_eq!(c4.degrees_of(m.iter().copied()), vec![1; 4]);
        assert_eq!(gf_factor(&p, &DegreeSpec::exact(vec![1, 0, 1])).unwrap(), None);
    }

    #[test]
    fn oracle_examples() {
        let p = path(3);
        let ok = ff_oracle(&p, &DegreeSpec::exact(vec![1, 2, 1]), OracleMode::Plain).unwrap();
        assert!(ok.holds);
        let spec = DegreeSpec::exact(vec![1, 0, 1]);
        let bad = ff_oracle(&p, &spec, OracleMode::Plain).unwrap();
        assert_eq!(bad.witness, Some((vset(&[1]), vset(&[0, 2]))));
        let ratio = ff_oracle(&p, &spec, OracleMode::Ratio { m: 1, k: 3 }).unwrap();
        assert!(!ratio.holds);
        let c4 = ff_oracle(&cycle(4), &DegreeSpec::new(vec![0; 4], vec![2; 4]), OracleMode::Plain);
        assert!(c4.unwrap().holds);
    }

    #[test]
    fn strongly_equitable_triple_edge() {
        let h = bundle(3);
        let f = strongly_equitable_factorize(&h, 3, 0, 1, 3).unwrap();
        assert_eq!(f.sizes(), vec![1, 1, 1]);
    }

    #[test]
    fn strongly_equitable_pendant_path() {
        let mut h = bundle(4);
        h.add_vertex();
        h.add_vertex();
        h.add_edge(0, 2);
        h.add_edge(2, 3);
        assert_eq!(strongly_equitable_hypotheses(&h, 2, 0, 1, 1), Ok(StrongCase::II));
        let f = strongly_equitable_factorize(&h, 2, 0, 1, 1).unwrap();
        assert!(strongly_equitable_holds(&h, &f, 0, 1));
        // exhaustive: some 2-colouring meets the same bounds
        let found = (0u32..1 << 6).any(|mask| {
            let a = (0..6).map(|e| (mask >> e & 1) as usize).collect();
            strongly_equitable_holds(&h, &Factorization::new(2, a).unwrap(), 0, 1)
        });
        assert!(found);
    }

    #[test]
    fn strongly_equitable_rejects() {
        let h = bundle(2);
        assert!(matches!(
            strongly_equitable_factorize(&h, 2, 0, 1, 1),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn balance_examples() {
        let mut h = Multigraph::new(4);
        h.add_edge(0, 1);
        h.add_edge(2, 3);
        let c = EdgeColoring { k: 2, color: vec![0, 0], artificial: vec![false; 2] };
        assert_eq!(balance_sizes(&h, &c).unwrap().sizes(), vec![1, 1]);
        let p = path(5);
        let c = EdgeColoring { k: 2, color: vec![0, 1, 0, 1], artificial: vec![false; 4] };
        assert_eq!(balance_sizes(&p, &c).unwrap().color, vec![0, 1, 0, 1]);
        let s = star(3);
        let c = EdgeColoring { k: 3, color: vec![0, 1, 2], artificial: vec![false; 3] };
        assert_eq!(balance_sizes(&s, &c).unwrap().color, vec![0, 1, 2]);
    }
}
