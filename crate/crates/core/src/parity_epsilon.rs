//! Partial parity factors with ratio windows, and the almost-even
//! factorizations built from them.

use std::collections::HashSet;

use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::connectivity::{connectivity_profile, ConnectivityQuery, SUBSET_CAP};
use crate::degree_bounded::hilton_parity_factorize;
use crate::error::{Error, Preconditions, Result};
use crate::graph::{contains, cut, full_set, members, Multigraph, VSet};

pub type Rational = Ratio<i64>;

/// Default edge cap for the exact parity solver.
pub const PARITY_EDGE_CAP: usize = 40;
/// Vertex cap for the Kano–Matsuda oracle, which scans all `(A, B)`.
pub const KM_VERTEX_CAP: usize = 16;
const SOLVER_BUDGET: u64 = 5_000_000;

fn floor_r(x: Rational) -> i64 {
    x.floor().to_integer()
}

fn ceil_r(x: Rational) -> i64 {
    x.ceil().to_integer()
}

fn check_connected(g: &Multigraph) -> Result<()> {
    if g.n() > 0 && !g.is_connected() {
        return Err(Error::InvalidInput("graph must be connected".into()));
    }
    Ok(())
}

fn check_bounds(g: &Multigraph, v0: VSet, lo: &[i64], hi: &[i64]) -> Result<()> {
    let n = g.n();
    if lo.len() != n || hi.len() != n {
        return Err(Error::InvalidInput("one bound per vertex required".into()));
    }
    if v0 & !full_set(n) != 0 {
        return Err(Error::InvalidInput("V0 is not a vertex subset".into()));
    }
    if let Some(v) = (0..n).find(|&v| lo[v] > hi[v]) {
        return Err(Error::InvalidInput(format!("g > f at vertex {v}")));
    }
    Ok(())
}

/// Connected components of `G[X]` and whether each is bipartite.
fn induced_components(g: &Multigraph, x: VSet) -> Vec<(VSet, bool)> {
    let n = g.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_loop = vec![false; n];
    for &(u, v) in g.edge_list() {
        if contains(x, u) && contains(x, v) {
            if u == v {
                has_loop[u] = true;
            } else {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    let mut side = vec![u8::MAX; n];
    let mut out = Vec::new();
    for s in members(x) {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut comp: VSet = 1 << s;
        let mut bip = !has_loop[s];
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    comp |= 1 << w;
                    bip &= !has_loop[w];
                    stack.push(w);
                } else if side[w] == side[v] {
                    bip = false;
                }
            }
        }
        out.push((comp, bip));
    }
    out
}

fn between(g: &Multigraph, a: VSet, b: VSet) -> i64 {
    g.edge_list()
        .iter()
        .filter(|&&(u, v)| (contains(a, u) && contains(b, v)) || (contains(b, u) && contains(a, v)))
        .count() as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmOutcome {
    pub holds: bool,
    /// A violating `(A, B)` when the criterion fails.
    pub witness: Option<(VSet, VSet)>,
}

/// The Kano–Matsuda criterion for a `V0`-partial parity `(g, f)`-factor,
/// checked over every disjoint pair `(A, B)`.
pub fn km_oracle(g: &Multigraph, v0: VSet, lo: &[i64], hi: &[i64]) -> Result<KmOutcome> {
    let n = g.n();
    if n > KM_VERTEX_CAP {
        return Err(Error::CapExceeded(format!("n = {n} > {KM_VERTEX_CAP}")));
    }
    check_connected(g)?;
    check_bounds(g, v0, lo, hi)?;
    for v in 0..n {
        let ok = if contains(v0, v) { (hi[v] - lo[v]) % 2 == 0 } else { lo[v] < hi[v] };
        if !ok {
            return Err(Error::InvalidInput(format!("bounds at {v} break the parity convention")));
        }
    }
    let deg = g.degrees();
    let all = full_set(n);
    let mut digits = vec![0u8; n];
    loop {
        let a = (0..n).filter(|&v| digits[v] == 1).fold(0, |s, v| s | 1 << v);
        let b = (0..n).filter(|&v| digits[v] == 2).fold(0, |s, v| s | 1 << v);
        let rest = all & !(a | b);
        let mut omega = 0i64;
        for (x, bip) in induced_components(g, rest) {
            if x & !v0 != 0 {
                continue;
            }
            if bip && members(x).all(|v| lo[v] == hi[v]) {
                continue;
            }
            let fx: i64 = members(x).map(|v| hi[v]).sum();
            if (fx - between(g, x, b)).rem_euclid(2) == 1 {
                omega += 1;
            }
        }
        let rhs = 1 + members(a).map(|v| hi[v]).sum::<i64>()
            + members(b).map(|v| deg[v] as i64 - lo[v]).sum::<i64>()
            - between(g, a, b);
        if omega >= rhs {
            return Ok(KmOutcome { holds: false, witness: Some((a, b)) });
        }
        let mut i = 0;
        while i < n && digits[i] == 2 {
            digits[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        digits[i] += 1;
    }
    Ok(KmOutcome { holds: true, witness: None })
}

struct ParitySolver<'a> {
    g: &'a Multigraph,
    lo: &'a [i64],
    hi: &'a [i64],
    v0: VSet,
    last: Vec<usize>,
    frontier: Vec<Vec<usize>>,
    left: Vec<i64>,
    count: Vec<i64>,
    take: Vec<bool>,
    failed: HashSet<(usize, Vec<i64>)>,
    nodes: u64,
}

impl<'a> ParitySolver<'a> {
    fn new(g: &'a Multigraph, v0: VSet, lo: &'a [i64], hi: &'a [i64]) -> Self {
        let n = g.n();
        let m = g.num_edges();
        let mut first = vec![usize::MAX; n];
        let mut last = vec![usize::MAX; n];
        for (e, u, v) in g.edges() {
            for x in [u, v] {
                first[x] = first[x].min(e);
                last[x] = e;
            }
        }
        let frontier = (0..=m)
            .map(|i| (0..n).filter(|&v| first[v] < i && last[v] >= i).collect())
            .collect();
        ParitySolver {
            g,
            lo,
            hi,
            v0,
            last,
            frontier,
            left: g.degrees().iter().map(|&d| d as i64).collect(),
            count: vec![0; n],
            take: vec![false; m],
            failed: HashSet::new(),
            nodes: 0,
        }
    }

    fn settled_ok(&self, v: usize) -> bool {
        let c = self.count[v];
        c >= self.lo[v] && c <= self.hi[v] && (!contains(self.v0, v) || (c - self.hi[v]) % 2 == 0)
    }

    fn open_ok(&self, v: usize) -> bool {
        self.count[v] <= self.hi[v] && self.count[v] + self.left[v] >= self.lo[v]
    }

    fn dfs(&mut self, i: usize) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > SOLVER_BUDGET {
            return None;
        }
        if i == self.g.num_edges() {
            return Some(true);
        }
        let key = (i, self.frontier[i].iter().map(|&v| self.count[v]).collect::<Vec<_>>());
        if self.failed.contains(&key) {
            return Some(false);
        }
        let (u, w) = self.g.ends(i);
        self.left[u] -= 1;
        self.left[w] -= 1;
        for pick in [false, true] {
            if pick {
                self.count[u] += 1;
                self.count[w] += 1;
            }
            let ok = [u, w].iter().all(|&v| {
                if self.last[v] == i {
                    self.settled_ok(v)
                } else {
                    self.open_ok(v)
                }
            });
            if ok {
                self.take[i] = pick;
                match self.dfs(i + 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            if pick {
                self.count[u] -= 1;
                self.count[w] -= 1;
            }
        }
        self.left[u] += 1;
        self.left[w] += 1;
        self.failed.insert(key);
        Some(false)
    }
}

/// Exact search for `F` with `lo ≤ d_F ≤ hi` and `d_F ≡ hi (mod 2)` on `V0`.
pub fn parity_gf_solver(g: &Multigraph, v0: VSet, lo: &[i64], hi: &[i64]) -> Result<Option<Vec<usize>>> {
    parity_gf_solver_capped(g, v0, lo, hi, PARITY_EDGE_CAP)
}

pub fn parity_gf_solver_capped(
    g: &Multigraph,
    v0: VSet,
    lo: &[i64],
    hi: &[i64],
    edge_cap: usize,
) -> Result<Option<Vec<usize>>> {
    if g.num_edges() > edge_cap {
        return Err(Error::CapExceeded(format!("|E| = {} > {edge_cap}", g.num_edges())));
    }
    check_bounds(g, v0, lo, hi)?;
    let mut s = ParitySolver::new(g, v0, lo, hi);
    if (0..g.n()).any(|v| g.degree(v) == 0 && !s.settled_ok(v)) {
        return Ok(None);
    }
    match s.dfs(0) {
        Some(true) => Ok(Some((0..g.num_edges()).filter(|&e| s.take[e]).collect())),
        Some(false) => Ok(None),
        None => Err(Error::SearchExhausted(s.nodes)),
    }
}

/// Which side of the window the distinguished vertex is tightened on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZBias {
    /// `d_F(z) ≥ ⌈εd⌉ - 1`.
    Raise,
    /// `d_F(z) ≤ ⌊εd⌋ + 1`.
    Lower,
}

/// Ratio and role sets for a single parity factor. `V0`, `V1` and `V1'`
/// partition the vertex set; `fpar` is read on `V0` only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioSpec {
    pub eps: Rational,
    pub v0: VSet,
    pub v1: VSet,
    pub v1p: VSet,
    pub fpar: Vec<u8>,
    pub z: Option<(usize, ZBias)>,
}

impl RatioSpec {
    /// All vertices in `V1'`: the `⌊εd⌋ ..= ⌊εd⌋ + 1` window everywhere.
    pub fn floor_window(g: &Multigraph, eps: Rational) -> Self {
        RatioSpec { eps, v0: 0, v1: 0, v1p: full_set(g.n()), fpar: vec![0; g.n()], z: None }
    }

    fn validate(&self, g: &Multigraph) -> Result<()> {
        let all = full_set(g.n());
        if self.eps <= Rational::from(0) || self.eps >= Rational::from(1) {
            return Err(Error::SpecInvalid("ε must lie strictly between 0 and 1".into()));
        }
        if self.v0 & self.v1 != 0 || self.v0 & self.v1p != 0 || self.v1 & self.v1p != 0 {
            return Err(Error::SpecInvalid("role sets must be disjoint".into()));
        }
        if self.v0 | self.v1 | self.v1p != all {
            return Err(Error::SpecInvalid("role sets must cover V(G)".into()));
        }
        if self.fpar.len() != g.n() {
            return Err(Error::SpecInvalid("parity map needs one entry per vertex".into()));
        }
        if let Some((z, _)) = self.z {
            if !contains(self.v0, z) {
                return Err(Error::SpecInvalid("z must lie in V0".into()));
            }
        }
        Ok(())
    }

    /// The `(g0, f0)` bounds handed to the parity solver.
    pub fn bounds(&self, g: &Multigraph) -> (Vec<i64>, Vec<i64>) {
        let deg = g.degrees();
        let mut lo = Vec::with_capacity(g.n());
        let mut hi = Vec::with_capacity(g.n());
        for v in 0..g.n() {
            let x = self.eps * Rational::from(deg[v] as i64);
            let (fl, ce) = (floor_r(x), ceil_r(x));
            if contains(self.v0, v) {
                let f = self.fpar[v] as i64 % 2;
                let mut l = if (fl - f).rem_euclid(2) == 0 { fl } else { fl - 1 };
                let mut h = if (ce - f).rem_euclid(2) == 0 { ce } else { ce + 1 };
                if let Some((z, bias)) = self.z {
                    if z == v && !x.is_integer() {
                        match bias {
                            ZBias::Raise => l = if (fl - f).rem_euclid(2) == 0 { fl } else { fl + 1 },
                            ZBias::Lower => h = if (ce - f).rem_euclid(2) == 0 { ce } else { ce - 1 },
                        }
                    }
                }
                lo.push(l);
                hi.push(h);
            } else if contains(self.v1, v) {
                lo.push(ce - 1);
                hi.push(ce);
            } else {
                lo.push(fl);
                hi.push(fl + 1);
            }
        }
        (lo, hi)
    }
}

/// Checks the cut conditions per component; returns the first violating `X`.
pub fn epsilon_hypothesis_violation(g: &Multigraph, spec: &RatioSpec) -> Result<Option<VSet>> {
    let deg = g.degrees();
    let one = Rational::from(1);
    for (comp, _) in induced_components(g, full_set(g.n())) {
        let v0c = spec.v0 & comp;
        let f_sum: i64 = members(v0c).map(|v| spec.fpar[v] as i64).sum();
        if v0c == comp && f_sum % 2 == 1 {
            return Ok(Some(comp));
        }
        let vs: Vec<usize> = members(v0c).collect();
        if vs.len() > SUBSET_CAP {
            return Err(Error::CapExceeded(format!("|V0| = {} > {SUBSET_CAP}", vs.len())));
        }
        for mask in 1u64..(1 << vs.len()) {
            let x = vs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |s, (_, &v)| s | 1 << v);
            if x == comp {
                continue;
            }
            let parts = induced_components(g, x);
            if parts.len() != 1 {
                continue;
            }
            let exempt = parts[0].1
                && members(x).all(|v| {
                    let t = spec.eps * Rational::from(deg[v] as i64);
                    t.is_integer() && (t.to_integer() - spec.fpar[v] as i64).rem_euclid(2) == 0
                });
            if exempt {
                continue;
            }
            let dx = Rational::from(cut(g, x) as i64);
            let sf: i64 = members(x).map(|v| spec.fpar[v] as i64).sum();
            let sdf: i64 = members(x).map(|v| deg[v] as i64 - spec.fpar[v] as i64).sum();
            if (sf % 2 == 1 && spec.eps * dx < one) || (sdf.rem_euclid(2) == 1 && (one - spec.eps) * dx < one) {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

/// Whether `d_F` meets the role-set windows and the `V0` parities.
pub fn epsilon_windows_hold(g: &Multigraph, spec: &RatioSpec, factor: &[usize]) -> bool {
    let (lo, hi) = spec.bounds(g);
    let df = g.degrees_of(factor.iter().copied());
    (0..g.n()).all(|v| {
        let d = df[v] as i64;
        lo[v] <= d && d <= hi[v] && (!contains(spec.v0, v) || (d - hi[v]) % 2 == 0)
    })
}

/// A `V0`-partial parity factor within the ratio windows of `spec`.
pub fn epsilon_parity_factor(g: &Multigraph, spec: &RatioSpec, pre: Preconditions) -> Result<Vec<usize>> {
    spec.validate(g)?;
    if pre == Preconditions::Validate {
        if let Some(x) = epsilon_hypothesis_violation(g, spec)? {
            return Err(Error::HypothesisUnmet(format!("vertex set {x:#b} violates the cut condition")));
        }
    }
    let (lo, hi) = spec.bounds(g);
    let cap = g.num_edges().max(PARITY_EDGE_CAP);
    match parity_gf_solver_capped(g, spec.v0, &lo, &hi, cap)? {
        Some(f) => {
            if !epsilon_windows_hold(g, spec, &f) {
                return Err(Error::InternalContradiction("solver output misses the windows".into()));
            }
            Ok(f)
        }
        None if pre == Preconditions::Validate => {
            Err(Error::InternalContradiction("no parity factor despite the cut conditions".into()))
        }
        None => Err(Error::Infeasible("no parity factor within the windows".into())),
    }
}

fn all_edges(g: &Multigraph) -> Vec<usize> {
    (0..g.num_edges()).collect()
}

fn unit_interval(eps: Rational) -> Result<()> {
    if eps < Rational::from(0) || eps > Rational::from(1) {
        return Err(Error::SpecInvalid("ε must lie in [0, 1]".into()));
    }
    Ok(())
}

/// `|d_F(v) - εd(v)| < 1` on a bipartite graph.
pub fn hoffman_factor(g: &Multigraph, eps: Rational) -> Result<Vec<usize>> {
    unit_interval(eps)?;
    if g.bipartition().is_none() {
        return Err(Error::InvalidInput("graph is not bipartite".into()));
    }
    if eps == Rational::from(0) {
        return Ok(Vec::new());
    }
    if eps == Rational::from(1) {
        return Ok(all_edges(g));
    }
    let deg = g.degrees();
    let mut spec = RatioSpec::floor_window(g, eps);
    for v in 0..g.n() {
        let t = eps * Rational::from(deg[v] as i64);
        if t.is_integer() {
            spec.v0 |= 1 << v;
            spec.v1p &= !(1 << v);
            spec.fpar[v] = (t.to_integer() % 2) as u8;
        }
    }
    let f = epsilon_parity_factor(g, &spec, Preconditions::Assume)?;
    let df = g.degrees_of(f.iter().copied());
    let ok = (0..g.n()).all(|v| {
        let diff = Rational::from(df[v] as i64) - eps * Rational::from(deg[v] as i64);
        diff.abs() < Rational::from(1)
    });
    if !ok {
        return Err(Error::InternalContradiction("bipartite ratio bound fails".into()));
    }
    Ok(f)
}

/// `|d_F(v) - εd(v)| ≤ 1` on any graph.
pub fn kano_saito_factor(g: &Multigraph, eps: Rational) -> Result<Vec<usize>> {
    unit_interval(eps)?;
    if eps == Rational::from(0) {
        return Ok(Vec::new());
    }
    if eps == Rational::from(1) {
        return Ok(all_edges(g));
    }
    epsilon_parity_factor(g, &RatioSpec::floor_window(g, eps), Preconditions::Assume)
}

/// Even degrees on `V0` within two of `εd`, the floor window elsewhere.
pub fn even_factor(g: &Multigraph, eps: Rational, v0: VSet, pre: Preconditions) -> Result<Vec<usize>> {
    let spec = RatioSpec {
        eps,
        v0,
        v1: 0,
        v1p: full_set(g.n()) & !v0,
        fpar: vec![0; g.n()],
        z: None,
    };
    if pre == Preconditions::Validate {
        let lambda = ceil_r(Rational::from(1) / (Rational::from(1) - eps)) as usize;
        let prof = connectivity_profile(g, &ConnectivityQuery::odd(lambda).partial(v0))?;
        if !prof.holds {
            return Err(Error::HypothesisUnmet(format!("odd cut {:?} below {lambda}", prof.witness_cut)));
        }
    }
    epsilon_parity_factor(g, &spec, Preconditions::Assume)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoBound {
    Min(usize, usize),
    Max(usize, usize),
}

/// Two factors with `δ(G_i) ≥ δ_i`, or `Δ(G_i) ≤ Δ_i` in max mode.
pub fn split_two_bounded(g: &Multigraph, mode: TwoBound, pre: Preconditions) -> Result<(Vec<usize>, Vec<usize>)> {
    check_connected(g)?;
    let (b1, b2, lower) = match mode {
        TwoBound::Min(a, b) => (a, b, true),
        TwoBound::Max(a, b) => (a, b, false),
    };
    if b1 == 0 || b2 == 0 {
        return Err(Error::SpecInvalid("bounds must be positive".into()));
    }
    let total = b1 + b2;
    let deg = g.degrees();
    if lower && deg.iter().any(|&d| d < total) {
        return Err(Error::HypothesisUnmet(format!("δ(G) < {total}")));
    }
    if !lower && deg.iter().any(|&d| d > total) {
        return Err(Error::HypothesisUnmet(format!("Δ(G) > {total}")));
    }
    let n = g.n();
    let all = full_set(n);
    let v0 = (0..n).filter(|&v| deg[v] == total).fold(0, |s, v| s | 1 << v);
    let bullet = match (b1 % 2, b2 % 2) {
        (0, 0) => "both bounds even",
        (1, 1) => "both bounds odd",
        _ => "one bound odd",
    };
    if b1 % 2 == 1 && b2 % 2 == 1 && v0 == all && n % 2 == 1 {
        return Err(Error::HypothesisUnmet(format!("{bullet}: odd order with every degree {total}")));
    }
    let eps = Rational::new(b1 as i64, total as i64);
    let rest = all & !v0;
    let spec = RatioSpec {
        eps,
        v0,
        v1: if lower { 0 } else { rest },
        v1p: if lower { rest } else { 0 },
        fpar: vec![(b1 % 2) as u8; n],
        z: None,
    };
    if pre == Preconditions::Validate {
        if let Some(x) = epsilon_hypothesis_violation(g, &spec)? {
            return Err(Error::HypothesisUnmet(format!("{bullet}: cut around {x:#b} is too small")));
        }
    }
    let f1 = epsilon_parity_factor(g, &spec, Preconditions::Assume)?;
    let f2: Vec<usize> = (0..g.num_edges()).filter(|e| !f1.contains(e)).collect();
    let (d1, d2) = (g.degrees_of(f1.iter().copied()), g.degrees_of(f2.iter().copied()));
    let ok = if lower {
        d1.iter().all(|&x| x >= b1) && d2.iter().all(|&x| x >= b2)
    } else {
        d1.iter().all(|&x| x <= b1) && d2.iter().all(|&x| x <= b2)
    };
    if !ok {
        return Err(Error::InternalContradiction("two-part bounds fail".into()));
    }
    Ok((f1, f2))
}

fn sum_of(eps: &[Rational], set: &[usize]) -> Rational {
    set.iter().map(|&i| eps[i]).sum()
}

/// The subset `I ∋ min N` minimising `|ε(I) - ε(N ∖ I)|`, smallest mask on ties.
pub fn balanced_partition(eps: &[Rational], set: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let total = sum_of(eps, set);
    let mut best: Option<(Rational, u64)> = None;
    let r = set.len();
    for mask in 0u64..(1 << r) {
        if mask & 1 == 0 || mask == (1 << r) - 1 {
            continue;
        }
        let s: Rational = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| eps[set[i]]).sum();
        let diff = (s * 2 - total).abs();
        if best.is_none_or(|(b, _)| diff < b) {
            best = Some((diff, mask));
        }
    }
    let mask = best.map_or(1, |(_, m)| m);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, &x) in set.iter().enumerate() {
        if mask >> i & 1 == 1 {
            a.push(x);
        } else {
            b.push(x);
        }
    }
    (a, b)
}

fn validate_ratios(eps: &[Rational]) -> Result<()> {
    if eps.iter().any(|&e| e < Rational::from(0)) || eps.iter().copied().sum::<Rational>() != Rational::from(1) {
        return Err(Error::SpecInvalid("ratios must be nonnegative and sum to 1".into()));
    }
    Ok(())
}

/// Splits `edges` of `g` into `(F, rest)` with `d_F` in the floor window of
/// `ratio`, and even on `V0` where `d` restricted to `edges` is even.
fn eulerian_split(g: &Multigraph, edges: &[usize], ratio: Rational, v2: VSet) -> Result<(Vec<usize>, Vec<usize>)> {
    let (sub, back) = g.spanning_subgraph(edges);
    let dsub = sub.degrees();
    let v0 = (0..g.n()).filter(|&v| contains(v2, v) && dsub[v] % 2 == 0).fold(0, |s, v| s | 1 << v);
    let spec = RatioSpec {
        eps: ratio,
        v0,
        v1: 0,
        v1p: full_set(g.n()) & !v0,
        fpar: vec![0; g.n()],
        z: None,
    };
    let f = epsilon_parity_factor(&sub, &spec, Preconditions::Assume)?;
    let mut inf = vec![false; edges.len()];
    for &e in &f {
        inf[e] = true;
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, &e) in back.iter().enumerate() {
        if inf[i] {
            a.push(e);
        } else {
            b.push(e);
        }
    }
    Ok((a, b))
}

/// Factors `G_1..G_k` of `G ∖ E(G0)` from ratios `ε_0..ε_k`, built by
/// repeated balanced splits; `factors[i - 1]` is `G_i`.
pub fn tree_split_factorize(g: &Multigraph, eps: &[Rational], v2: VSet, g0: &[usize]) -> Result<Vec<Vec<usize>>> {
    validate_ratios(eps)?;
    if eps.len() < 2 {
        return Err(Error::SpecInvalid("need ε_0 and at least one more ratio".into()));
    }
    let n = g.n();
    let deg = g.degrees();
    let q = |v: usize| if contains(v2, v) { 2i64 } else { 1 };
    let mut in_g0 = vec![false; g.num_edges()];
    for &e in g0 {
        *in_g0.get_mut(e).ok_or_else(|| Error::InvalidInput(format!("edge {e} out of range")))? = true;
    }
    let d0 = g.degrees_of(g0.iter().copied());
    if let Some(v) = (0..n).find(|&v| {
        (Rational::from(d0[v] as i64) - eps[0] * Rational::from(deg[v] as i64)).abs() > Rational::from(q(v))
    }) {
        return Err(Error::InvalidInput(format!("G0 misses its bound at vertex {v}")));
    }
    let k = eps.len() - 1;
    let mut factors = vec![Vec::new(); k];
    let live: Vec<usize> = (1..=k).filter(|&i| eps[i] > Rational::from(0)).collect();
    let rest: Vec<usize> = (0..g.num_edges()).filter(|&e| !in_g0[e]).collect();
    if live.is_empty() {
        factors[0] = rest;
        return check_tree_split(g, eps, v2, &d0, factors);
    }
    let mut stack = vec![(live, rest)];
    while let Some((set, edges)) = stack.pop() {
        if set.len() == 1 {
            factors[set[0] - 1] = edges;
            continue;
        }
        let (a, b) = balanced_partition(eps, &set);
        let ratio = sum_of(eps, &a) / sum_of(eps, &set);
        let (ea, eb) = eulerian_split(g, &edges, ratio, v2)?;
        stack.push((b, eb));
        stack.push((a, ea));
    }
    check_tree_split(g, eps, v2, &d0, factors)
}

fn check_tree_split(g: &Multigraph, eps: &[Rational], v2: VSet, d0: &[usize], factors: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    let k = factors.len();
    let deg = g.degrees();
    let q = |v: usize| if contains(v2, v) { 2i64 } else { 1 };
    let fd: Vec<Vec<usize>> = factors.iter().map(|f| g.degrees_of(f.iter().copied())).collect();
    for v in 0..n {
        let total: usize = fd.iter().map(|d| d[v]).sum::<usize>() + d0[v];
        let within = (1..=k).all(|i| {
            (Rational::from(fd[i - 1][v] as i64) - eps[i] * Rational::from(deg[v] as i64)).abs()
                < Rational::from(3 * q(v))
        });
        let odd = fd.iter().filter(|d| d[v] % 2 == 1).count();
        if total != deg[v] || !within || (contains(v2, v) && odd > 1) {
            return Err(Error::InternalContradiction(format!("tree split fails at vertex {v}")));
        }
    }
    Ok(factors)
}

/// `k` factors of `G ∖ E(G0)` with `|d_i - (1-ε)d/k| < 2` and at most one
/// odd factor per vertex.
pub fn epsilon_uniform_refine(g: &Multigraph, g0: &[usize], eps: Rational, k: usize) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    unit_interval(eps)?;
    let n = g.n();
    let deg = g.degrees();
    let d0 = g.degrees_of(g0.iter().copied());
    let two = Rational::from(2);
    if let Some(v) = (0..n).find(|&v| (Rational::from(d0[v] as i64) - eps * Rational::from(deg[v] as i64)).abs() >= two) {
        return Err(Error::InvalidInput(format!("G0 misses its bound at vertex {v}")));
    }
    let mut in_g0 = vec![false; g.num_edges()];
    for &e in g0 {
        *in_g0.get_mut(e).ok_or_else(|| Error::InvalidInput(format!("edge {e} out of range")))? = true;
    }
    let rest: Vec<usize> = (0..g.num_edges()).filter(|&e| !in_g0[e]).collect();
    let (sub, back) = g.spanning_subgraph(&rest);
    let (f, _) = hilton_parity_factorize(&sub, k)?;
    let factors: Vec<Vec<usize>> = (0..k).map(|i| f.factor(i).into_iter().map(|e| back[e]).collect()).collect();
    let share = (Rational::from(1) - eps) / Rational::from(k as i64);
    let fd: Vec<Vec<usize>> = factors.iter().map(|x| g.degrees_of(x.iter().copied())).collect();
    let ok = (0..n).all(|v| {
        fd.iter().filter(|d| d[v] % 2 == 1).count() <= 1
            && fd
                .iter()
                .all(|d| (Rational::from(d[v] as i64) - share * Rational::from(deg[v] as i64)).abs() < two)
    });
    if !ok {
        return Err(Error::InternalContradiction("uniform refinement misses its bound".into()));
    }
    Ok(factors)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostEven {
    pub factors: Vec<Vec<usize>>,
    /// The odd factor at each odd-degree vertex.
    pub jv: Vec<Option<usize>>,
    /// Whether the first factor carries every odd parity.
    pub first_carries_odd: bool,
}

/// Factors with `|d_i - ε_i d| < 2` and at most one odd factor per vertex,
/// for ratios `ε_1` and `k - 1` equal others. With `require_first`, the
/// odd factor is `G_1` at every odd vertex.
pub fn almost_even_factorize(
    g: &Multigraph,
    eps: &[Rational],
    require_first: bool,
    pre: Preconditions,
) -> Result<AlmostEven> {
    validate_ratios(eps)?;
    let k = eps.len();
    if k == 0 {
        return Err(Error::SpecInvalid("need at least one ratio".into()));
    }
    if eps[1..].windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::SpecInvalid("ε_2..ε_k must be equal".into()));
    }
    let n = g.n();
    let deg = g.degrees();
    let e1 = eps[0];
    let zero = Rational::from(0);
    let one = Rational::from(1);
    let odd_conn = || -> Result<bool> {
        if e1 == zero {
            return Ok(false);
        }
        let lambda = ceil_r(one / e1) as usize;
        Ok(connectivity_profile(g, &ConnectivityQuery::odd(lambda))?.holds)
    };
    let strong = if e1 == zero || e1 == one {
        e1 == one
    } else if require_first {
        if pre == Preconditions::Validate && !odd_conn()? {
            return Err(Error::HypothesisUnmet(format!(
                "G_1 as the odd factor needs odd-{}-edge-connectivity",
                ceil_r(one / e1)
            )));
        }
        true
    } else {
        n <= SUBSET_CAP && odd_conn()?
    };
    let g0: Vec<usize> = if e1 == zero {
        Vec::new()
    } else if e1 == one {
        all_edges(g)
    } else if strong {
        let f = even_factor(g, one - e1, full_set(n), Preconditions::Assume)?;
        (0..g.num_edges()).filter(|e| !f.contains(e)).collect()
    } else {
        let evens = (0..n).filter(|&v| deg[v] % 2 == 0).fold(0, |s, v| s | 1 << v);
        even_factor(g, e1, evens, Preconditions::Assume)?
    };
    let mut factors = vec![g0.clone()];
    if k > 1 {
        factors.extend(epsilon_uniform_refine(g, &g0, e1, k - 1)?);
    }
    let fd: Vec<Vec<usize>> = factors.iter().map(|x| g.degrees_of(x.iter().copied())).collect();
    let mut jv = vec![None; n];
    for v in 0..n {
        let odd: Vec<usize> = (0..k).filter(|&i| fd[i][v] % 2 == 1).collect();
        let within = (0..k).all(|i| {
            (Rational::from(fd[i][v] as i64) - eps[i] * Rational::from(deg[v] as i64)).abs() < Rational::from(2)
        });
        if odd.len() > 1 || (deg[v] % 2 == 0 && !odd.is_empty()) || !within {
            return Err(Error::InternalContradiction(format!("almost-even bounds fail at {v}")));
        }
        jv[v] = odd.first().copied();
    }
    let first_carries_odd = (0..n).all(|v| deg[v] % 2 == 0 || jv[v] == Some(0));
    if strong && !first_carries_odd {
        return Err(Error::InternalContradiction("odd parities escaped G_1".into()));
    }
    Ok(AlmostEven { factors, jv, first_carries_odd })
}

/// Whether `(V0, X ∖ V0)` certifies that no factorization keeps every
/// `v ∈ X` within one of `d(v)/k`.
pub fn observation_check(g: &Multigraph, k: usize, x: VSet, v0: VSet) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let deg = g.degrees();
    if x & !full_set(g.n()) != 0 || v0 & !x != 0 {
        return Err(Error::InvalidInput("need V0 ⊆ X ⊆ V(G)".into()));
    }
    if let Some(v) = members(x).find(|&v| deg[v] % k == 0) {
        return Err(Error::InvalidInput(format!("vertex {v} has degree divisible by k")));
    }
    let mut parity = 0;
    let mut residue = 0;
    for v in members(x) {
        if contains(v0, v) {
            parity += deg[v] / k;
            residue += deg[v] % k;
        } else {
            parity += deg[v].div_ceil(k);
            residue += k - deg[v] % k;
        }
    }
    let dx = cut(g, x);
    Ok(x != 0 && parity % 2 == 1 && residue + dx < k)
}

/// The first bipartition of `X` (by `V0` mask) that passes the check.
pub fn observation_search(g: &Multigraph, k: usize, x: VSet) -> Result<Option<VSet>> {
    let vs: Vec<usize> = members(x).collect();
    if vs.len() > SUBSET_CAP {
        return Err(Error::CapExceeded(format!("|X| = {} > {SUBSET_CAP}", vs.len())));
    }
    for mask in 0u64..(1 << vs.len()) {
        let v0 = vs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |s, (_, &v)| s | 1 << v);
        if observation_check(g, k, x, v0)? {
            return Ok(Some(v0));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{bundle, complete, cube, cycle, path};
    use crate::graph::vset;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn km_examples() {
        let ones = |n| vec![1i64; n];
        assert!(km_oracle(&cycle(4), full_set(4), &ones(4), &ones(4)).unwrap().holds);
        let p = path(3);
        let o = km_oracle(&p, full_set(3), &ones(3), &ones(3)).unwrap();
        assert!(!o.holds && o.witness.is_some());
        assert!(km_oracle(&complete(4), full_set(4), &ones(4), &ones(4)).unwrap().holds);
    }

    #[test]
    fn solver_examples() {
        let ones = vec![1i64; 4];
        let f = parity_gf_solver(&cycle(4), full_set(4), &ones, &ones).unwrap().unwrap();
        assert_eq!(cycle(4).degrees_of(f), vec![1; 4]);
        assert!(parity_gf_solver(&path(3), full_set(3), &[1; 3], &[1; 3]).unwrap().is_none());
        let g = complete(4);
        let d: Vec<i64> = g.degrees().iter().map(|&x| x as i64).collect();
        let f = parity_gf_solver(&g, 0, &[0; 4], &d).unwrap().unwrap();
        assert!(f.len() <= 6);
        let f = parity_gf_solver(&g, 0, &d, &d).unwrap().unwrap();
        assert_eq!(f.len(), 6);
    }

    #[test]
    fn epsilon_examples() {
        let q3 = cube();
        let spec = RatioSpec { eps: r(1, 3), v0: full_set(8), v1: 0, v1p: 0, fpar: vec![1; 8], z: None };
        let f = epsilon_parity_factor(&q3, &spec, Preconditions::Validate).unwrap();
        assert_eq!(q3.degrees_of(f), vec![1; 8]);
        let c4 = cycle(4);
        let f = hoffman_factor(&c4, r(3, 10)).unwrap();
        assert!(c4.degrees_of(f).iter().all(|&x| x <= 1));
        let t = complete(3);
        let f = kano_saito_factor(&t, r(1, 2)).unwrap();
        assert!(t.degrees_of(f).iter().all(|&x| x <= 2));
    }

    #[test]
    fn two_part_examples() {
        let k4 = complete(4);
        let (a, b) = split_two_bounded(&k4, TwoBound::Min(1, 2), Preconditions::Validate).unwrap();
        assert_eq!(k4.degrees_of(a), vec![1; 4]);
        assert_eq!(k4.degrees_of(b), vec![2; 4]);
        let (a, b) = split_two_bounded(&k4, TwoBound::Max(1, 2), Preconditions::Validate).unwrap();
        assert!(k4.degrees_of(a).iter().all(|&x| x <= 1));
        assert!(k4.degrees_of(b).iter().all(|&x| x <= 2));
        assert!(matches!(
            split_two_bounded(&k4, TwoBound::Min(2, 2), Preconditions::Validate),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn tree_split_examples() {
        let c4 = cycle(4);
        let fs = tree_split_factorize(&c4, &[r(0, 1), r(1, 2), r(1, 2)], 0, &[]).unwrap();
        assert_eq!(fs.len(), 2);
        let g = bundle(6);
        let fs = tree_split_factorize(&g, &[r(1, 3), r(1, 3), r(1, 3)], full_set(2), &[0, 1]).unwrap();
        assert!(fs.iter().all(|f| f.len() == 2));
        assert!(tree_split_factorize(&g, &[r(1, 3), r(1, 3), r(1, 3)], 0, &[0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn refine_examples() {
        let g = bundle(6);
        let fs = epsilon_uniform_refine(&g, &[0, 1], r(1, 3), 2).unwrap();
        assert!(fs.iter().all(|f| g.degrees_of(f.iter().copied()) == vec![2, 2]));
        let fs = epsilon_uniform_refine(&g, &[0, 1], r(1, 3), 1).unwrap();
        assert_eq!(fs[0].len(), 4);
        let k4 = complete(4);
        let matching = [0, 5];
        assert_eq!(k4.degrees_of(matching), vec![1; 4]);
        let fs = epsilon_uniform_refine(&k4, &matching, r(1, 2), 1).unwrap();
        assert_eq!(fs[0].len(), 4);
    }

    #[test]
    fn almost_even_examples() {
        let k4 = complete(4);
        let a = almost_even_factorize(&k4, &[r(1, 2), r(1, 2)], true, Preconditions::Validate).unwrap();
        assert!(a.first_carries_odd);
        assert!(a.jv.iter().all(|&j| j == Some(0)));
        let c4 = cycle(4);
        let a = almost_even_factorize(&c4, &[r(1, 2), r(1, 2)], false, Preconditions::Validate).unwrap();
        assert!(a.jv.iter().all(Option::is_none));
        let g = bundle(6);
        let a = almost_even_factorize(&g, &[r(1, 3); 3], false, Preconditions::Validate).unwrap();
        assert!(a.factors.iter().all(|f| f.len() == 2));
    }

    #[test]
    fn observation_examples() {
        let mut g = Multigraph::new(1);
        g.add_edge(0, 0);
        g.add_edge(0, 0);
        assert!(observation_check(&g, 3, vset(&[0]), vset(&[0])).unwrap());
        assert!(!observation_check(&g, 3, vset(&[0]), 0).unwrap());
        assert_eq!(observation_search(&g, 3, vset(&[0])).unwrap(), Some(vset(&[0])));
        assert!(!observation_check(&cycle(4), 2, 0, 0).unwrap());
        assert!(!observation_check(&complete(3), 2, 0, 0).unwrap());
    }
}
