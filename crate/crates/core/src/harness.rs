//! Brute-force oracles, independent verification, conjecture search, the
//! tiny-instance corpus and the text graph format.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characterization::{decide_equitable, Decision};
use crate::connectivity::{connectivity_profile, is_tree_connected, ConnectivityQuery};
use crate::equitable::{almost_target, AlmostSpec};
use crate::error::{Error, Result};
use crate::factorization::Factorization;
use crate::graph::{contains, vset, Multigraph, VSet};
use crate::parity_epsilon::Rational;

/// Budget for the pruned factorization search.
pub const ORACLE_NODE_BUDGET: u64 = 20_000_000;
/// Plain enumeration cap for single-factor problems.
pub const SUBSET_ENUM_CAP: u64 = 10_000_000;

/// Parses `n <count>` followed by `e <u> <v>` lines; `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Multigraph> {
    let mut g: Option<Multigraph> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::InvalidInput(format!("line {}: cannot parse `{line}`", no + 1));
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match (toks.as_slice(), g.as_mut()) {
            (["n", c], None) => g = Some(Multigraph::new(num(c)?)),
            (["e", u, v], Some(h)) => {
                let (u, v) = (num(u)?, num(v)?);
                if u >= h.n() || v >= h.n() {
                    return Err(Error::InvalidInput(format!("line {}: vertex out of range", no + 1)));
                }
                h.add_edge(u, v);
            }
            _ => return Err(bad()),
        }
    }
    g.ok_or_else(|| Error::InvalidInput("missing `n <count>` line".into()))
}

pub fn format_graph(g: &Multigraph) -> String {
    let mut s = format!("n {}\n", g.n());
    for &(u, v) in g.edge_list() {
        s.push_str(&format!("e {u} {v}\n"));
    }
    s
}

/// Parses `0,2,5` into a vertex set; the empty string is the empty set.
pub fn parse_vertex_list(s: &str, n: usize) -> Result<VSet> {
    let mut out = 0;
    for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: usize = t.parse().map_err(|_| Error::InvalidInput(format!("bad vertex `{t}`")))?;
        if v >= n {
            return Err(Error::InvalidInput(format!("vertex {v} out of range")));
        }
        out |= 1 << v;
    }
    Ok(out)
}

/// Parses `1/3,2/3` (integers allowed) into rationals.
pub fn parse_rationals(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || Error::InvalidInput(format!("bad rational `{t}`"));
            match t.split_once('/') {
                Some((a, b)) => {
                    let (a, b): (i64, i64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                    if b == 0 {
                        return Err(bad());
                    }
                    Ok(Rational::new(a, b))
                }
                None => Ok(Rational::from(t.parse::<i64>().map_err(|_| bad())?)),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostClaim {
    pub s: Vec<usize>,
    pub z: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioClaim {
    /// One `"a/b"` string per factor.
    pub eps: Vec<String>,
    /// Strict bound on `|d_i - ε_i d|`.
    pub slack: i64,
}

/// Claims to recheck against a factorization; absent fields are skipped.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Claims {
    pub k: usize,
    pub equitable: bool,
    pub size_balanced: bool,
    pub interval_v0: Option<Vec<usize>>,
    pub almost: Option<AlmostClaim>,
    pub ratios: Option<RatioClaim>,
    pub at_most_one_odd: bool,
    pub jv: Option<Vec<Option<usize>>>,
    pub min_degrees: Option<Vec<usize>>,
    pub max_degrees: Option<Vec<usize>>,
}

impl Claims {
    pub fn equitable(k: usize) -> Self {
        Claims { k, equitable: true, size_balanced: true, ..Claims::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub pass: bool,
    pub vertex: Option<usize>,
    pub factor: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub checks: Vec<ClaimCheck>,
}

impl VerificationReport {
    /// First failing `(claim, vertex, factor)`.
    pub fn first_failure(&self) -> Option<&ClaimCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

fn check_each(name: &str, n: usize, k: usize, ok: impl Fn(usize, usize) -> bool) -> ClaimCheck {
    for v in 0..n {
        for i in 0..k {
            if !ok(v, i) {
                return ClaimCheck { claim: name.into(), pass: false, vertex: Some(v), factor: Some(i) };
            }
        }
    }
    ClaimCheck { claim: name.into(), pass: true, vertex: None, factor: None }
}

/// Recounts every factor degree from the raw assignment and checks `claims`.
pub fn verify_factorization(g: &Multigraph, f: &Factorization, claims: &Claims) -> Result<VerificationReport> {
    let n = g.n();
    let k = claims.k;
    if k == 0 || f.k != k {
        return Err(Error::InvalidInput(format!("claims are for k = {k}, factorization has k = {}", f.k)));
    }
    if f.assignment.len() != g.num_edges() || f.assignment.iter().any(|&c| c >= k) {
        return Err(Error::InvalidInput("assignment is not total on E(G)".into()));
    }
    let mut deg = vec![vec![0i64; n]; k];
    let mut size = vec![0i64; k];
    for (e, &c) in f.assignment.iter().enumerate() {
        let (u, v) = g.ends(e);
        deg[c][u] += 1;
        deg[c][v] += 1;
        size[c] += 1;
    }
    let d: Vec<i64> = (0..n).map(|v| (0..k).map(|i| deg[i][v]).sum()).collect();
    let kk = k as i64;
    let mut checks = Vec::new();
    if claims.equitable {
        checks.push(check_each("equitable", n, k, |v, i| (kk * deg[i][v] - d[v]).abs() < kk));
    }
    if claims.size_balanced {
        let m = g.num_edges() as i64;
        let bad = (0..k).find(|&i| (kk * size[i] - m).abs() >= kk);
        checks.push(ClaimCheck { claim: "size-balanced".into(), pass: bad.is_none(), vertex: None, factor: bad });
    }
    if let Some(list) = &claims.interval_v0 {
        let v0 = vset(list);
        checks.push(check_each("interval", n, k, |v, i| {
            let (x, fl, ce) = (deg[i][v], d[v].div_euclid(kk), (d[v] + kk - 1).div_euclid(kk));
            x == fl || x == ce || (contains(v0, v) && x == ce + 1) || (!contains(v0, v) && fl >= 1 && x == fl - 1)
        }));
    }
    if let Some(a) = &claims.almost {
        let z = vset(&a.z);
        let target: Vec<i64> = (0..n)
            .map(|v| if contains(z, v) || d[v] % kk == 0 { d[v] / kk } else { d[v] / kk + 1 })
            .collect();
        let mut count = vec![0usize; n];
        let mut fail = None;
        for (i, di) in deg.iter().enumerate() {
            let off: Vec<usize> = (0..n).filter(|&v| di[v] != target[v]).collect();
            match off[..] {
                [u] if (di[u] - target[u]).abs() == 1 => count[u] += 1,
                _ => {
                    fail = Some((off.first().copied(), i));
                    break;
                }
            }
        }
        if fail.is_none() && a.s.len() == n {
            if let Some(v) = (0..n).find(|&v| count[v] != a.s[v]) {
                fail = Some((Some(v), 0));
            }
        } else if fail.is_none() {
            fail = Some((None, 0));
        }
        checks.push(ClaimCheck {
            claim: "almost".into(),
            pass: fail.is_none(),
            vertex: fail.and_then(|f| f.0),
            factor: fail.map(|f| f.1),
        });
    }
    if let Some(r) = &claims.ratios {
        let eps = parse_rationals(&r.eps.join(","))?;
        if eps.len() != k {
            return Err(Error::InvalidInput("one ratio per factor required".into()));
        }
        checks.push(check_each("ratios", n, k, |v, i| {
            let diff = Rational::from(deg[i][v]) - eps[i] * Rational::from(d[v]);
            diff < Rational::from(r.slack) && -diff < Rational::from(r.slack)
        }));
    }
    if claims.at_most_one_odd {
        let bad = (0..n).find(|&v| {
            let odd = (0..k).filter(|&i| deg[i][v] % 2 == 1).count();
            odd > 1 || (d[v] % 2 == 0 && odd > 0)
        });
        checks.push(ClaimCheck { claim: "at-most-one-odd".into(), pass: bad.is_none(), vertex: bad, factor: None });
    }
    if let Some(jv) = &claims.jv {
        let bad = (0..n).find(|&v| {
            let odd: Vec<usize> = (0..k).filter(|&i| deg[i][v] % 2 == 1).collect();
            jv.get(v).copied().flatten() != odd.first().copied() || odd.len() > 1
        });
        checks.push(ClaimCheck { claim: "j-map".into(), pass: bad.is_none(), vertex: bad, factor: None });
    }
    if let Some(b) = &claims.min_degrees {
        checks.push(check_each("min-degrees", n, k, |v, i| b.get(i).is_some_and(|&x| deg[i][v] >= x as i64)));
    }
    if let Some(b) = &claims.max_degrees {
        checks.push(check_each("max-degrees", n, k, |v, i| b.get(i).is_some_and(|&x| deg[i][v] <= x as i64)));
    }
    Ok(VerificationReport { pass: checks.iter().all(|c| c.pass), checks })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    Equitable { k: usize },
    GfParity { v0: VSet, lo: Vec<i64>, hi: Vec<i64> },
    Interval { k: usize, v0: VSet },
    Almost { k: usize, spec: AlmostSpec },
    /// `|d_i - ε_i d| < 2` with at most one odd factor per vertex; with
    /// `first_odd` that factor is the first one.
    AlmostEven { eps: Vec<Rational>, first_odd: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    Factorization(Factorization),
    Factor(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleAnswer {
    pub exists: bool,
    pub witness: Option<Witness>,
}

struct Search<'a> {
    g: &'a Multigraph,
    k: usize,
    lo: Vec<Vec<i64>>,
    hi: Vec<Vec<i64>>,
    size: Option<(i64, i64)>,
    accept: &'a dyn Fn(&[Vec<i64>]) -> bool,
    deg: Vec<Vec<i64>>,
    sizes: Vec<i64>,
    left: Vec<i64>,
    color: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn feasible(&self, v: usize) -> bool {
        let mut need = 0;
        for i in 0..self.k {
            if self.deg[i][v] > self.hi[i][v] {
                return false;
            }
            need += (self.lo[i][v] - self.deg[i][v]).max(0);
        }
        need <= self.left[v]
    }

    fn sizes_ok(&self, edges_left: i64) -> bool {
        match self.size {
            None => true,
            Some((lo, hi)) => {
                self.sizes.iter().all(|&s| s <= hi)
                    && self.sizes.iter().map(|&s| (lo - s).max(0)).sum::<i64>() <= edges_left
            }
        }
    }

    fn run(&mut self, e: usize, used: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > ORACLE_NODE_BUDGET {
            return Err(Error::CapExceeded(format!("oracle budget of {ORACLE_NODE_BUDGET} nodes")));
        }
        let m = self.g.num_edges();
        if e == m {
            return Ok((self.accept)(&self.deg));
        }
        let (u, v) = self.g.ends(e);
        self.left[u] -= 1;
        self.left[v] -= 1;
        for c in 0..self.k.min(used + 1) {
            self.deg[c][u] += 1;
            self.deg[c][v] += 1;
            self.sizes[c] += 1;
            self.color[e] = c;
            if self.feasible(u) && self.feasible(v) && self.sizes_ok((m - e - 1) as i64) && self.run(e + 1, used.max(c + 1))? {
                return Ok(true);
            }
            self.deg[c][u] -= 1;
            self.deg[c][v] -= 1;
            self.sizes[c] -= 1;
        }
        self.left[u] += 1;
        self.left[v] += 1;
        Ok(false)
    }
}

/// Pruned search over colourings up to factor relabelling. Windows are
/// per factor and vertex; `accept` sees the final degree table.
fn search_factorization(
    g: &Multigraph,
    k: usize,
    lo: Vec<Vec<i64>>,
    hi: Vec<Vec<i64>>,
    size: Option<(i64, i64)>,
    symmetric: bool,
    accept: &dyn Fn(&[Vec<i64>]) -> bool,
) -> Result<Option<Factorization>> {
    let n = g.n();
    let mut s = Search {
        g,
        k,
        lo,
        hi,
        size,
        accept,
        deg: vec![vec![0; n]; k],
        sizes: vec![0; k],
        left: g.degrees().iter().map(|&d| d as i64).collect(),
        color: vec![0; g.num_edges()],
        nodes: 0,
    };
    if (0..n).any(|v| !s.feasible(v)) || !s.sizes_ok(g.num_edges() as i64) {
        return Ok(None);
    }
    let start = if symmetric { 0 } else { k };
    if s.run(0, start)? {
        Ok(Some(Factorization::new(k, s.color)?))
    } else {
        Ok(None)
    }
}

fn uniform(n: usize, k: usize, w: impl Fn(usize) -> i64) -> Vec<Vec<i64>> {
    vec![(0..n).map(w).collect(); k]
}

/// Exact existence by exhaustive search, with a witness when one exists.
pub fn brute_force_oracle(g: &Multigraph, problem: &Problem) -> Result<OracleAnswer> {
    let n = g.n();
    let d: Vec<i64> = g.degrees().iter().map(|&x| x as i64).collect();
    let m = g.num_edges() as i64;
    let found = |f: Option<Factorization>| OracleAnswer { exists: f.is_some(), witness: f.map(Witness::Factorization) };
    match problem {
        Problem::Equitable { k } => {
            let k = check_k(*k)?;
            let kk = k as i64;
            let lo = uniform(n, k, |v| d[v] / kk);
            let hi = uniform(n, k, |v| (d[v] + kk - 1) / kk);
            let size = Some((m / kk, (m + kk - 1) / kk));
            Ok(found(search_factorization(g, k, lo, hi, size, true, &|_| true)?))
        }
        Problem::Interval { k, v0 } => {
            let k = check_k(*k)?;
            let kk = k as i64;
            let lo = uniform(n, k, |v| if contains(*v0, v) { d[v] / kk } else { (d[v] / kk - 1).max(0) });
            let hi = uniform(n, k, |v| (d[v] + kk - 1) / kk + i64::from(contains(*v0, v)));
            let size = Some((m / kk, (m + kk - 1) / kk));
            let accept = |deg: &[Vec<i64>]| {
                deg.iter().all(|di| {
                    (0..n).all(|v| {
                        let (fl, ce) = (d[v] / kk, (d[v] + kk - 1) / kk);
                        di[v] == fl || di[v] == ce || (contains(*v0, v) && di[v] == ce + 1) || (!contains(*v0, v) && di[v] == fl - 1)
                    })
                })
            };
            Ok(found(search_factorization(g, k, lo, hi, size, true, &accept)?))
        }
        Problem::Almost { k, spec } => {
            let k = check_k(*k)?;
            if spec.s.len() != n {
                return Err(Error::InvalidInput("one count per vertex required".into()));
            }
            let f = almost_target(g, k, spec.z);
            let lo = uniform(n, k, |v| (f[v] - 1).max(0));
            let hi = uniform(n, k, |v| f[v] + 1);
            let accept = |deg: &[Vec<i64>]| {
                let mut count = vec![0usize; n];
                for di in deg {
                    let off: Vec<usize> = (0..n).filter(|&v| di[v] != f[v]).collect();
                    match off[..] {
                        [u] => count[u] += 1,
                        _ => return false,
                    }
                }
                count == spec.s
            };
            Ok(found(search_factorization(g, k, lo, hi, None, true, &accept)?))
        }
        Problem::AlmostEven { eps, first_odd } => {
            let k = check_k(eps.len())?;
            let two = Rational::from(2);
            let lo: Vec<Vec<i64>> = eps
                .iter()
                .map(|&e| (0..n).map(|v| ((e * Rational::from(d[v]) - two).floor().to_integer() + 1).max(0)).collect())
                .collect();
            let hi: Vec<Vec<i64>> = eps
                .iter()
                .map(|&e| (0..n).map(|v| (e * Rational::from(d[v]) + two).ceil().to_integer() - 1).collect())
                .collect();
            let accept = |deg: &[Vec<i64>]| {
                (0..n).all(|v| {
                    let odd: Vec<usize> = (0..k).filter(|&i| deg[i][v] % 2 == 1).collect();
                    odd.len() <= 1 && (!*first_odd || odd.iter().all(|&i| i == 0))
                })
            };
            Ok(found(search_factorization(g, k, lo, hi, None, false, &accept)?))
        }
        Problem::GfParity { v0, lo, hi } => {
            if lo.len() != n || hi.len() != n {
                return Err(Error::InvalidInput("one bound per vertex required".into()));
            }
            let e = g.num_edges();
            if e >= 64 || 1u64 << e > SUBSET_ENUM_CAP {
                return Err(Error::CapExceeded(format!("2^{e} subsets > {SUBSET_ENUM_CAP}")));
            }
            for mask in 0u64..1 << e {
                let df = g.degrees_of((0..e).filter(|&x| mask >> x & 1 == 1));
                let ok = (0..n).all(|v| {
                    let x = df[v] as i64;
                    lo[v] <= x && x <= hi[v] && (!contains(*v0, v) || (x - hi[v]).rem_euclid(2) == 0)
                });
                if ok {
                    let f = (0..e).filter(|&x| mask >> x & 1 == 1).collect();
                    return Ok(OracleAnswer { exists: true, witness: Some(Witness::Factor(f)) });
                }
            }
            Ok(OracleAnswer { exists: false, witness: None })
        }
    }
}

fn check_k(k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    Ok(k)
}

/// Every 2-vertex multigraph with at most 12 parallel edges and 2 loops per
/// vertex, then every 3-vertex loopless multigraph with at most 10 edges.
pub fn tiny_corpus() -> Vec<Multigraph> {
    let mut out = Vec::new();
    for mult in 0..=12 {
        for l0 in 0..=2 {
            for l1 in 0..=2 {
                let mut g = Multigraph::new(2);
                (0..mult).for_each(|_| {
                    g.add_edge(0, 1);
                });
                (0..l0).for_each(|_| {
                    g.add_edge(0, 0);
                });
                (0..l1).for_each(|_| {
                    g.add_edge(1, 1);
                });
                out.push(g);
            }
        }
    }
    for a in 0..=10 {
        for b in 0..=10 - a {
            for c in 0..=10 - a - b {
                let mut g = Multigraph::new(3);
                for (u, v, t) in [(0, 1, a), (0, 2, b), (1, 2, c)] {
                    (0..t).for_each(|_| {
                        g.add_edge(u, v);
                    });
                }
                out.push(g);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conjecture {
    /// On `k`-tree-connected graphs, the obstruction test decides existence.
    TreeConnected,
    /// Almost even factorizations for every ratio vector.
    AlmostEven,
}

impl std::str::FromStr for Conjecture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree-connected" => Ok(Conjecture::TreeConnected),
            "almost-even" => Ok(Conjecture::AlmostEven),
            _ => Err(Error::InvalidInput(format!("unknown conjecture `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub trials: usize,
    pub n_range: (usize, usize),
    pub mult_range: (usize, usize),
    pub k_range: (usize, usize),
    pub conjecture: Conjecture,
}

impl SearchConfig {
    pub fn new(seed: u64, trials: usize, conjecture: Conjecture) -> Self {
        SearchConfig { seed, trials, n_range: (2, 4), mult_range: (0, 3), k_range: (2, 2), conjecture }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.trials > 0
            && 2 <= self.n_range.0
            && self.n_range.0 <= self.n_range.1
            && self.n_range.1 <= 8
            && self.mult_range.0 <= self.mult_range.1
            && self.mult_range.1 > 0
            && 1 <= self.k_range.0
            && self.k_range.0 <= self.k_range.1;
        if !ok {
            return Err(Error::InvalidInput("invalid search configuration".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrialOutcome {
    Consistent,
    Counterexample(String),
    /// The oracle ran out of budget.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub k: usize,
    pub graph: String,
    pub outcome: TrialOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub trials: usize,
    pub consistent: usize,
    pub skipped: usize,
    /// Distinct sorted degree sequences seen.
    pub distinct: usize,
    pub counterexamples: Vec<TrialRecord>,
}

/// Compares the obstruction test with exhaustive search on one graph.
pub fn classify_tree_connected(g: &Multigraph, k: usize) -> Result<TrialOutcome> {
    let predicted = matches!(decide_equitable(g, k)?, Decision::Yes(_));
    match brute_force_oracle(g, &Problem::Equitable { k }) {
        Ok(a) if a.exists == predicted => Ok(TrialOutcome::Consistent),
        Ok(a) => Ok(TrialOutcome::Counterexample(format!("predicted {predicted}, exhaustive {}", a.exists))),
        Err(Error::CapExceeded(_)) => Ok(TrialOutcome::Skipped),
        Err(e) => Err(e),
    }
}

/// Checks that an almost even factorization exists, with the first factor
/// carrying the odd parities when the odd-edge-connectivity clause applies.
pub fn classify_almost_even(g: &Multigraph, eps: &[Rational]) -> Result<TrialOutcome> {
    let first_odd = eps[0] > Rational::from(0) && {
        let lambda = (Rational::from(1) / eps[0]).ceil().to_integer() as usize;
        connectivity_profile(g, &ConnectivityQuery::odd(lambda))?.holds
    };
    match brute_force_oracle(g, &Problem::AlmostEven { eps: eps.to_vec(), first_odd }) {
        Ok(a) if a.exists => Ok(TrialOutcome::Consistent),
        Ok(_) => Ok(TrialOutcome::Counterexample(format!("no factorization for ε = {eps:?} (first_odd = {first_odd})"))),
        Err(Error::CapExceeded(_)) => Ok(TrialOutcome::Skipped),
        Err(e) => Err(e),
    }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, mult: (usize, usize)) -> Multigraph {
    let mut g = Multigraph::new(n);
    for u in 0..n {
        for v in u..n {
            let t = if u == v { rng.gen_range(0..=1) } else { rng.gen_range(mult.0..=mult.1) };
            (0..t).for_each(|_| {
                g.add_edge(u, v);
            });
        }
    }
    g
}

const GENERATION_RETRIES: usize = 1000;

fn run_trial(c: &SearchConfig, trial: usize) -> Result<(TrialRecord, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    rng.set_stream(trial as u64);
    let k = rng.gen_range(c.k_range.0..=c.k_range.1);
    for _ in 0..GENERATION_RETRIES {
        let n = rng.gen_range(c.n_range.0..=c.n_range.1);
        let g = random_graph(&mut rng, n, c.mult_range);
        if g.num_edges() == 0 || !g.is_connected() {
            continue;
        }
        let outcome = match c.conjecture {
            Conjecture::TreeConnected => {
                if !is_tree_connected(&g, k) {
                    continue;
                }
                classify_tree_connected(&g, k)?
            }
            Conjecture::AlmostEven => {
                let w: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=4)).collect();
                let total: i64 = w.iter().sum();
                let eps: Vec<Rational> = if total == 0 {
                    (0..k).map(|i| Rational::from(i64::from(i == 0))).collect()
                } else {
                    w.iter().map(|&x| Rational::new(x, total)).collect()
                };
                classify_almost_even(&g, &eps)?
            }
        };
        let mut seq = g.degrees();
        seq.sort_unstable();
        return Ok((TrialRecord { trial, k, graph: format_graph(&g), outcome }, seq));
    }
    Err(Error::InvalidInput(format!("trial {trial}: no graph met the hypothesis in {GENERATION_RETRIES} draws")))
}

/// Random search for counterexamples; trials run in parallel and each has
/// its own generator stream, so the report depends only on the config.
pub fn conjecture_search(c: &SearchConfig) -> Result<SearchReport> {
    c.validate()?;
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(c.trials);
    let mut results: Vec<Result<(TrialRecord, Vec<usize>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| s.spawn(move || (w..c.trials).step_by(workers).map(|t| run_trial(c, t)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("search worker panicked")).collect()
    });
    results.sort_by_key(|r| r.as_ref().map_or(0, |(t, _)| t.trial));
    let mut report = SearchReport { trials: c.trials, consistent: 0, skipped: 0, distinct: 0, counterexamples: Vec::new() };
    let mut seqs = BTreeSet::new();
    for r in results {
        let (rec, seq) = r?;
        seqs.insert(seq);
        match rec.outcome {
            TrialOutcome::Consistent => report.consistent += 1,
            TrialOutcome::Skipped => report.skipped += 1,
            TrialOutcome::Counterexample(_) => report.counterexamples.push(rec),
        }
    }
    report.distinct = seqs.len();
    Ok(report)
}
