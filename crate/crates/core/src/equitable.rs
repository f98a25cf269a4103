//! Equitable and almost-equitable factorizations built from orientations.
//!
//! Every route here orients the graph with prescribed out-degree residues,
//! splits each vertex into an out-copy and an in-copy, cuts those copies into
//! stubs of degree at most `k` and edge-colours the stub graph.

use serde::{Deserialize, Serialize};

use crate::bipartite::{balance_on_stubs, konig_with_artificial, strongly_equitable_factorize};
use crate::characterization::{checksum, find_min_z, z_residue, ObstructionCertificate};
use crate::connectivity::{connectivity_profile, is_tree_connected, ConnectivityQuery, SUBSET_CAP};
use crate::error::{Error, Preconditions, Result};
use crate::factorization::{strictly_within, Factorization};
use crate::graph::{contains, full_set, rk, transform, Multigraph, Orientation, Transform, VSet};
use crate::orientation::{find_mod_k_orientation, OrientationTarget};
use crate::split::split_tree_connected;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectedVariant {
    SizeBalanced,
    ExactTripartition,
}

/// `parts[v] = [I0, I1, I2]`, factor indices `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tripartition {
    pub parts: Vec<[Vec<usize>; 3]>,
}

impl Tripartition {
    pub fn sizes(&self, v: usize) -> [usize; 3] {
        let p = &self.parts[v];
        [p[0].len(), p[1].len(), p[2].len()]
    }
}

/// `(|I0|, |I1|, |I2|)` forced by the exact construction.
pub fn exact_sizes(k: usize, out_deg: usize, in_deg: usize) -> [usize; 3] {
    let (a, b) = (out_deg % k, in_deg % k);
    [(k - a).min(k - b), a.abs_diff(b), a.min(b)]
}

/// Whether the orientation-modulo hypothesis holds: `(2k-2)`-tree-connected
/// or `(3k-3)`-edge-connected.
pub fn modulo_hypothesis(g: &Multigraph, k: usize) -> bool {
    if is_tree_connected(g, 2 * k - 2) {
        return true;
    }
    g.n() <= SUBSET_CAP
        && connectivity_profile(g, &ConnectivityQuery::edge(3 * k - 3)).is_ok_and(|p| p.holds)
}

/// Stub endpoints per edge, plus the exceptional stub of each copy.
struct Stubs {
    ends: Vec<(usize, usize)>,
    exceptional: Vec<(usize, usize)>,
}

fn build_stubs(g: &Multigraph, d: &Orientation, k: usize) -> Stubs {
    let n = g.n();
    let mut out_seen = vec![0usize; n];
    let mut in_seen = vec![0usize; n];
    let outd = d.out_degrees(g);
    let ind = d.in_degrees(g);
    // Stub ids: out-copies first, in-copies after; each copy owns
    // ceil(deg/k) stubs, the last being the exceptional one.
    let mut out_base = vec![0usize; n];
    let mut in_base = vec![0usize; n];
    let mut next = 0;
    for v in 0..n {
        out_base[v] = next;
        next += outd[v] / k + 1;
    }
    for v in 0..n {
        in_base[v] = next;
        next += ind[v] / k + 1;
    }
    let mut ends = Vec::with_capacity(g.num_edges());
    for e in 0..g.num_edges() {
        let t = d.tail(e);
        let h = d.head(g, e);
        let a = out_base[t] + out_seen[t] / k;
        let b = in_base[h] + in_seen[h] / k;
        out_seen[t] += 1;
        in_seen[h] += 1;
        ends.push((a, b));
    }
    let exceptional = (0..n).map(|v| (out_base[v] + outd[v] / k, in_base[v] + ind[v] / k)).collect();
    Stubs { ends, exceptional }
}

fn stub_graph(stubs: &Stubs) -> Multigraph {
    let n = stubs
        .exceptional
        .iter()
        .map(|&(a, b)| a.max(b) + 1)
        .chain(stubs.ends.iter().map(|&(a, b)| a.max(b) + 1))
        .max()
        .unwrap_or(0);
    let mut h = Multigraph::new(n);
    for &(a, b) in &stubs.ends {
        h.add_edge(a, b);
    }
    h
}

/// `Σ_v Σ_i (k·d_i(v) - d(v))²`.
fn spread(g: &Multigraph, color: &[usize], k: usize) -> i64 {
    let fac = Factorization { k, assignment: color.to_vec() };
    let d = g.degrees();
    fac.degrees(g)
        .iter()
        .flat_map(|di| di.iter().zip(&d).map(|(&x, &dv)| (k as i64 * x as i64 - dv as i64).pow(2)))
        .sum()
}

/// Components of the subgraph of the stub graph coloured `a` or `b`.
fn two_colour_components(ends: &[(usize, usize)], color: &[usize], a: usize, b: usize) -> Vec<Vec<usize>> {
    let nstubs = ends.iter().map(|&(x, y)| x.max(y) + 1).max().unwrap_or(0);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nstubs];
    for (e, &(x, y)) in ends.iter().enumerate() {
        if color[e] == a || color[e] == b {
            adj[x].push(e);
            adj[y].push(e);
        }
    }
    let mut seen = vec![false; ends.len()];
    let mut comps = Vec::new();
    for s in 0..ends.len() {
        if seen[s] || (color[s] != a && color[s] != b) {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let (x, y) = ends[comp[i]];
            for st in [x, y] {
                for &f in &adj[st] {
                    if !seen[f] {
                        seen[f] = true;
                        comp.push(f);
                    }
                }
            }
            i += 1;
        }
        comps.push(comp);
    }
    comps
}

/// Swaps alternating components (alone when size-neutral, in opposite
/// pairs otherwise) while that lowers the factor degree spread in `g`.
fn smooth(g: &Multigraph, ends: &[(usize, usize)], color: &mut [usize], k: usize) {
    let mut best = spread(g, color, k);
    'outer: loop {
        for a in 0..k {
            for b in a + 1..k {
                let comps = two_colour_components(ends, color, a, b);
                let diff = |c: &Vec<usize>| -> i64 {
                    c.iter().map(|&e| if color[e] == a { 1 } else { -1 }).sum()
                };
                let diffs: Vec<i64> = comps.iter().map(diff).collect();
                let mut tries: Vec<Vec<usize>> = Vec::new();
                for i in 0..comps.len() {
                    if diffs[i] == 0 {
                        tries.push(vec![i]);
                    }
                    for j in i + 1..comps.len() {
                        if diffs[i] != 0 && diffs[i] == -diffs[j] {
                            tries.push(vec![i, j]);
                        }
                    }
                }
                for t in tries {
                    let flip = |color: &mut [usize]| {
                        for &ci in &t {
                            for &e in &comps[ci] {
                                color[e] = if color[e] == a { b } else { a };
                            }
                        }
                    };
                    flip(color);
                    let s = spread(g, color, k);
                    if s < best {
                        best = s;
                        continue 'outer;
                    }
                    flip(color);
                }
            }
        }
        return;
    }
}

/// `I_q(v)` from factor out- and in-degrees relative to their floors.
fn tripartition_of(g: &Multigraph, d: &Orientation, fac: &Factorization) -> Result<Tripartition> {
    let k = fac.k;
    let n = g.n();
    let outd = d.out_degrees(g);
    let ind = d.in_degrees(g);
    let mut out_i = vec![vec![0usize; n]; k];
    let mut in_i = vec![vec![0usize; n]; k];
    for e in 0..g.num_edges() {
        let c = fac.assignment[e];
        out_i[c][d.tail(e)] += 1;
        in_i[c][d.head(g, e)] += 1;
    }
    let mut parts = Vec::with_capacity(n);
    for v in 0..n {
        let mut p: [Vec<usize>; 3] = Default::default();
        for i in 0..k {
            let (o, q) = (out_i[i][v], in_i[i][v]);
            let (fo, fi) = (outd[v] / k, ind[v] / k);
            if o < fo || q < fi || o > fo + 1 || q > fi + 1 {
                return Err(Error::InternalContradiction(format!(
                    "factor {i} leaves the directed window at vertex {v}"
                )));
            }
            p[o - fo + q - fi].push(i);
        }
        parts.push(p);
    }
    Ok(Tripartition { parts })
}

/// Splits a directed graph into `k` factors whose out- and in-degrees stay
/// within one of `d±/k`; the exact variant also fixes every `|I_q(v)|`.
pub fn directed_factorize(
    g: &Multigraph,
    d: &Orientation,
    k: usize,
    variant: DirectedVariant,
) -> Result<(Factorization, Tripartition)> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if d.tails().len() != g.num_edges() {
        return Err(Error::InvalidInput("orientation does not cover E(G)".into()));
    }
    let stubs = build_stubs(g, d, k);
    let h = stub_graph(&stubs);
    let real = g.num_edges();
    let color = match variant {
        DirectedVariant::ExactTripartition => {
            let outd = d.out_degrees(g);
            let ind = d.in_degrees(g);
            let mut hx = h.clone();
            let mut artificial = vec![false; real];
            for v in 0..g.n() {
                let (a, b) = (outd[v] % k, ind[v] % k);
                if a > 0 && b > 0 {
                    let (sa, sb) = stubs.exceptional[v];
                    for _ in 0..k - a.max(b) {
                        hx.add_edge(sa, sb);
                        artificial.push(true);
                    }
                }
            }
            let c = konig_with_artificial(&hx, k, artificial)?;
            c.color[..real].to_vec()
        }
        DirectedVariant::SizeBalanced => {
            let c = konig_with_artificial(&h, k, vec![false; real])?;
            let mut color = c.color;
            balance_on_stubs(&stubs.ends, &mut color, &vec![false; real], k)?;
            smooth(g, &stubs.ends, &mut color, k);
            color
        }
    };
    let fac = Factorization::new(k, color)?;
    let tri = tripartition_of(g, d, &fac)?;
    let outd = d.out_degrees(g);
    let ind = d.in_degrees(g);
    let ok = match variant {
        DirectedVariant::ExactTripartition => {
            (0..g.n()).all(|v| tri.sizes(v) == exact_sizes(k, outd[v], ind[v]))
        }
        DirectedVariant::SizeBalanced => {
            fac.is_size_balanced()
                && (0..g.n()).all(|v| {
                    let [i0, _, i2] = tri.sizes(v);
                    let [e0, _, e2] = exact_sizes(k, outd[v], ind[v]);
                    i0 <= e0 && i2 <= e2
                })
        }
    };
    if !ok {
        return Err(Error::InternalContradiction("directed factorization misses its bounds".into()));
    }
    Ok((fac, tri))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Trivial,
    /// `m = 0`: residue orientation then the size-balanced directed split.
    Directed,
    /// One vertex outside `Z` absorbs the residue `m`.
    ZSlack,
    /// Cut-guaranteed split followed by the strongly equitable bipartite split.
    SplitStrong,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquitableOutcome {
    Factorized { factorization: Factorization, route: Route },
    Obstructed(ObstructionCertificate),
}

/// `|d_i(v) - d(v)/k| < 1` everywhere and `||E_i| - |E|/k| < 1`.
pub fn is_equitable_factorization(g: &Multigraph, f: &Factorization) -> bool {
    f.assignment.len() == g.num_edges() && f.is_equitable(g) && f.is_size_balanced()
}

fn orient(g: &Multigraph, k: usize, p: &[i64]) -> Result<Orientation> {
    find_mod_k_orientation(g, &OrientationTarget::exact(k, p)?)
}

fn residue_targets(g: &Multigraph, z: VSet) -> Vec<i64> {
    g.degrees()
        .iter()
        .enumerate()
        .map(|(v, &d)| if contains(z, v) { d as i64 } else { 0 })
        .collect()
}

pub fn equitable_factorize(g: &Multigraph, k: usize, pre: Preconditions) -> Result<EquitableOutcome> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if k == 1 {
        return Ok(EquitableOutcome::Factorized {
            factorization: Factorization::new(1, vec![0; g.num_edges()])?,
            route: Route::Trivial,
        });
    }
    let zc = find_min_z(g, k)?;
    let done = |f: Factorization, route| -> Result<EquitableOutcome> {
        if !is_equitable_factorization(g, &f) {
            return Err(Error::InternalContradiction(format!("{route:?} route broke the bounds")));
        }
        Ok(EquitableOutcome::Factorized { factorization: f, route })
    };
    let hyp = modulo_hypothesis(g, k);
    if zc.m == 0 {
        if pre == Preconditions::Validate && !hyp {
            return Err(Error::HypothesisUnmet(format!(
                "needs (2k-2)-tree- or (3k-3)-edge-connectivity for k = {k}"
            )));
        }
        let d = orient(g, k, &residue_targets(g, zc.z))?;
        let (f, _) = directed_factorize(g, &d, k, DirectedVariant::SizeBalanced)?;
        return done(f, Route::Directed);
    }
    if zc.checksum + 2 * zc.m == k {
        let cert = ObstructionCertificate { k, z: zc.z, m: zc.m, checksum: zc.checksum };
        if !cert.verify(g) {
            return Err(Error::InternalContradiction("certificate fails its own check".into()));
        }
        return Ok(EquitableOutcome::Obstructed(cert));
    }
    if let Some(z) = (0..g.n()).find(|&v| !contains(zc.z, v)).filter(|_| hyp) {
        let mut p = residue_targets(g, zc.z);
        p[z] = zc.m as i64;
        if let Ok(d) = orient(g, k, &p) {
            let (f, _) = directed_factorize(g, &d, k, DirectedVariant::SizeBalanced)?;
            if is_equitable_factorization(g, &f) {
                return done(f, Route::ZSlack);
            }
        }
    }
    let lambda = k - 1;
    if pre == Preconditions::Validate && !is_tree_connected(g, 5 * lambda) {
        return Err(Error::HypothesisUnmet(format!("graph is not {}-tree-connected", 5 * lambda)));
    }
    let z = 0;
    let mut p = residue_targets(g, zc.z);
    p[z] += zc.m as i64;
    let h = split_tree_connected(g, k, &p, lambda, z, pre)?;
    let (z1, z2) = h.image[z];
    let hf = strongly_equitable_factorize(&h.host, k, z1, z2, zc.m)?;
    let mut assignment = vec![0; g.num_edges()];
    for (old, &new) in h.edge_map.iter().enumerate() {
        assignment[old] = hf.assignment[new];
    }
    done(Factorization::new(k, assignment)?, Route::SplitStrong)
}

/// Factors with `||E_i| - |E|/k| < 1`, equitable on `V0`, and within
/// `⌊(d+1)/k⌋ - 1 ..= ⌈(d-1)/k⌉ + 1` elsewhere.
pub fn factorize_partial_v0(g: &Multigraph, k: usize, v0: VSet, pre: Preconditions) -> Result<Factorization> {
    let n = g.n();
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let all = full_set(n);
    if v0 & !all != 0 || v0 == all {
        return Err(Error::InvalidInput("V0 must be a proper subset of V(G)".into()));
    }
    let v1 = all & !v0;
    let t = transform(g, &Transform::Contract(v1))?;
    let gc = &t.graph;
    if pre == Preconditions::Validate && !modulo_hypothesis(gc, k) {
        return Err(Error::HypothesisUnmet("contracted graph misses the modulo hypothesis".into()));
    }
    let w = t.vertex_map[v1.trailing_zeros() as usize].expect("contracted vertex survives");
    let mut p = vec![0i64; gc.n()];
    p[w] = gc.num_edges() as i64;
    let dc = orient(gc, k, &p)?;
    let mut tails: Vec<usize> = (0..g.num_edges()).map(|e| g.ends(e).0).collect();
    let back: Vec<usize> = (0..gc.n())
        .map(|x| (0..n).find(|&v| t.vertex_map[v] == Some(x)).expect("onto"))
        .collect();
    for (e, img) in t.edge_map.iter().enumerate() {
        if let Some(ne) = img {
            let tail_c = dc.tail(*ne);
            let (a, b) = g.ends(e);
            tails[e] = if tail_c == w {
                if contains(v1, a) {
                    a
                } else {
                    b
                }
            } else if back[tail_c] == a {
                a
            } else {
                b
            };
        }
    }
    let d = Orientation::new(g, tails)?;
    let (f, _) = directed_factorize(g, &d, k, DirectedVariant::SizeBalanced)?;
    let deg = g.degrees();
    let fd = f.degrees(g);
    let ok = f.is_size_balanced()
        && (0..n).all(|v| {
            (0..k).all(|i| {
                let (x, dv) = (fd[i][v] as i64, deg[v] as i64);
                let ki = k as i64;
                if contains(v0, v) {
                    strictly_within(fd[i][v], deg[v], k, 1)
                } else {
                    (dv + 1).div_euclid(ki) - 1 <= x && x <= (dv - 1 + ki - 1).div_euclid(ki) + 1
                }
            })
        });
    if !ok {
        return Err(Error::InternalContradiction("partial factorization misses its window".into()));
    }
    Ok(f)
}

/// How many factors each vertex is exceptional in, and the set `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostSpec {
    pub s: Vec<usize>,
    pub z: VSet,
}

/// `f(v) = ⌊d/k⌋` on `Z`, `⌈d/k⌉` off it.
pub fn almost_target(g: &Multigraph, k: usize, z: VSet) -> Vec<i64> {
    g.degrees()
        .iter()
        .enumerate()
        .map(|(v, &d)| if contains(z, v) { (d / k) as i64 } else { d.div_ceil(k) as i64 })
        .collect()
}

/// The unique vertex where factor `i` deviates from `f`, if exactly one.
pub fn exceptional_vertex(g: &Multigraph, fac: &Factorization, f: &[i64], i: usize) -> Option<usize> {
    let di = &fac.degrees(g)[i];
    let off: Vec<usize> = (0..g.n()).filter(|&v| di[v] as i64 != f[v]).collect();
    match off[..] {
        [u] if (di[u] as i64 - f[u]).abs() == 1 => Some(u),
        _ => None,
    }
}

fn validate_almost(g: &Multigraph, k: usize, spec: &AlmostSpec) -> Result<(VSet, usize)> {
    let n = g.n();
    if spec.s.len() != n {
        return Err(Error::SpecInvalid("one count per vertex required".into()));
    }
    let total: usize = spec.s.iter().sum();
    if total != k {
        return Err(Error::SpecInvalid(format!("counts sum to {total}, not k = {k}")));
    }
    let deg = g.degrees();
    for v in 0..n {
        let need = if contains(spec.z, v) { deg[v] % k } else { (k - deg[v] % k) % k };
        if spec.s[v] < need || (spec.s[v] - need) % 2 != 0 {
            return Err(Error::SpecInvalid(format!(
                "s({v}) = {} must exceed {need} by a nonnegative even amount",
                spec.s[v]
            )));
        }
    }
    let zeros = (0..n).filter(|&v| deg[v] % k == 0).fold(0, |s, v| s | 1 << v);
    let z = spec.z | zeros;
    let m = z_residue(g, k, z);
    if m == 0 || checksum(g, k, z) + 2 * m != k {
        return Err(Error::SpecInvalid("Z is not an obstruction set (m > 0, checksum k - 2m)".into()));
    }
    Ok((z, m))
}

/// Factors that are `u`-almost `f`-factors, each vertex `v` being the
/// exceptional vertex of exactly `s(v)` of them.
pub fn almost_equitable_factorize(
    g: &Multigraph,
    k: usize,
    spec: &AlmostSpec,
    pre: Preconditions,
) -> Result<Factorization> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let (z, _) = validate_almost(g, k, spec)?;
    if pre == Preconditions::Validate && !modulo_hypothesis(g, k) {
        return Err(Error::HypothesisUnmet("needs (2k-2)-tree- or (3k-3)-edge-connectivity".into()));
    }
    let deg = g.degrees();
    let p: Vec<i64> = (0..g.n())
        .map(|v| {
            let r = deg[v] % k;
            if contains(z, v) {
                (deg[v] + (spec.s[v] - r) / 2) as i64
            } else {
                ((spec.s[v] - (k - r) % k) / 2) as i64
            }
        })
        .collect();
    let d = orient(g, k, &p)?;
    let (fac, _) = directed_factorize(g, &d, k, DirectedVariant::SizeBalanced)?;
    let f = almost_target(g, k, z);
    let mut count = vec![0usize; g.n()];
    for i in 0..k {
        match exceptional_vertex(g, &fac, &f, i) {
            Some(u) => count[u] += 1,
            None => {
                return Err(Error::InternalContradiction(format!(
                    "factor {i} is not almost an f-factor"
                )))
            }
        }
    }
    if count != spec.s {
        return Err(Error::InternalContradiction("exceptional counts differ from s".into()));
    }
    Ok(fac)
}

/// `k - m` edge-disjoint equitable factors of an obstructed graph, as edge
/// lists.
pub fn max_equitable_subfamily(g: &Multigraph, k: usize, pre: Preconditions) -> Result<Vec<Vec<usize>>> {
    let zc = find_min_z(g, k)?;
    if zc.m == 0 || zc.checksum + 2 * zc.m != k {
        return Err(Error::NotApplicable("graph is not obstructed".into()));
    }
    if zc.checksum == 0 {
        return Err(Error::NotApplicable("k - 2m = 0".into()));
    }
    let deg = g.degrees();
    let z = (0..g.n()).find(|&v| deg[v] % k != 0).expect("checksum > 0 needs a nonzero residue");
    let mut s: Vec<usize> = (0..g.n())
        .map(|v| if contains(zc.z, v) { deg[v] % k } else { (k - deg[v] % k) % k })
        .collect();
    s[z] += 2 * zc.m;
    let fac = almost_equitable_factorize(g, k, &AlmostSpec { s, z: zc.z }, pre)?;
    let f = almost_target(g, k, zc.z);
    let fd = fac.degrees(g);
    let in_z = contains(zc.z, z);
    let dropped = |i: usize| {
        exceptional_vertex(g, &fac, &f, i) == Some(z)
            && if in_z { fd[i][z] as i64 == f[z] - 1 } else { fd[i][z] as i64 == f[z] + 1 }
    };
    let keep: Vec<usize> = (0..k).filter(|&i| !dropped(i)).collect();
    if keep.len() != k - zc.m {
        return Err(Error::InternalContradiction(format!(
            "{} factors survive, expected {}",
            keep.len(),
            k - zc.m
        )));
    }
    let out: Vec<Vec<usize>> = keep.iter().map(|&i| fac.factor(i)).collect();
    let ok = keep.iter().all(|&i| (0..g.n()).all(|v| strictly_within(fd[i][v], deg[v], k, 1)));
    if !ok {
        return Err(Error::InternalContradiction("a kept factor is not equitable".into()));
    }
    Ok(out)
}

/// A set `Z ⊆ allowed` with `Σ_Z d ≡ target (mod k)`, smallest bitmask first.
pub fn find_z_with_sum(g: &Multigraph, k: usize, allowed: VSet, target: i64) -> Option<VSet> {
    let n = g.n();
    let r: Vec<usize> = g.degrees().iter().map(|&d| d % k).collect();
    let mut reach = vec![vec![false; k]; n + 1];
    reach[0][0] = true;
    for v in 0..n {
        for s in 0..k {
            if reach[v][s] {
                reach[v + 1][s] = true;
                if contains(allowed, v) {
                    reach[v + 1][(s + r[v]) % k] = true;
                }
            }
        }
    }
    let mut t = rk(target, k as i64) as usize;
    if !reach[n][t] {
        return None;
    }
    let mut z = 0;
    for v in (0..n).rev() {
        if !reach[v][t] {
            z |= 1 << v;
            t = (t + k - r[v]) % k;
        }
    }
    Some(z)
}

/// Equitable off `V0`; on `V0` within two of `d/k` with prescribed parity
/// (that of `d(v)` for odd `k`, `fpar(v)` for even `k`).
pub fn parity_constrained_equitable(
    g: &Multigraph,
    k: usize,
    v0: VSet,
    fpar: &[u8],
    pre: Preconditions,
) -> Result<Factorization> {
    let n = g.n();
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if v0 & !full_set(n) != 0 {
        return Err(Error::InvalidInput("V0 is not a vertex subset".into()));
    }
    let deg = g.degrees();
    let ki = k as i64;
    let mut p = vec![0i64; n];
    for v in (0..n).filter(|&v| contains(v0, v)) {
        let d = deg[v] as i64;
        p[v] = if k % 2 == 1 {
            (d + ki * (d % 2)) / 2
        } else {
            if d % 2 != 0 {
                return Err(Error::HypothesisUnmet(format!("vertex {v} in V0 has odd degree")));
            }
            let f = *fpar.get(v).ok_or_else(|| Error::InvalidInput("parity map too short".into()))?;
            d / 2 + (f as i64 % 2) * ki / 2
        };
    }
    let fixed: i64 = p.iter().sum();
    let z = find_z_with_sum(g, k, full_set(n) & !v0, g.num_edges() as i64 - fixed)
        .ok_or_else(|| Error::NoValidZ("no Z outside V0 balances |E| mod k".into()))?;
    for v in (0..n).filter(|&v| contains(z, v)) {
        p[v] = deg[v] as i64;
    }
    if pre == Preconditions::Validate && !modulo_hypothesis(g, k) {
        return Err(Error::HypothesisUnmet("needs (2k-2)-tree- or (3k-3)-edge-connectivity".into()));
    }
    let d = orient(g, k, &p)?;
    let (fac, _) = directed_factorize(g, &d, k, DirectedVariant::ExactTripartition)?;
    let fd = fac.degrees(g);
    let ok = (0..n).all(|v| {
        (0..k).all(|i| {
            if contains(v0, v) {
                let want = if k % 2 == 1 { deg[v] % 2 } else { fpar[v] as usize % 2 };
                strictly_within(fd[i][v], deg[v], k, 2) && fd[i][v] % 2 == want
            } else {
                strictly_within(fd[i][v], deg[v], k, 1)
            }
        })
    });
    if !ok {
        return Err(Error::InternalContradiction("parity-constrained bounds fail".into()));
    }
    Ok(fac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{bundle, complete, cycle};
    use crate::graph::vset;

    fn directed_c4() -> (Multigraph, Orientation) {
        let g = cycle(4);
        let d = Orientation::as_listed(&g);
        (g, d)
    }

    #[test]
    fn exact_c4_and_loop() {
        let (g, d) = directed_c4();
        let (f, t) = directed_factorize(&g, &d, 2, DirectedVariant::ExactTripartition).unwrap();
        assert!((0..4).all(|v| t.sizes(v) == [1, 0, 1]));
        let mut sizes = f.sizes();
        sizes.sort();
        assert_eq!(sizes, vec![0, 4]);

        let mut l = Multigraph::new(1);
        l.add_edge(0, 0);
        let d = Orientation::as_listed(&l);
        let (f, t) = directed_factorize(&l, &d, 2, DirectedVariant::ExactTripartition).unwrap();
        assert_eq!(f.assignment, vec![0]);
        assert_eq!(t.sizes(0), [1, 0, 1]);
    }

    #[test]
    fn balanced_c4_gives_matchings() {
        let (g, d) = directed_c4();
        let (f, t) = directed_factorize(&g, &d, 2, DirectedVariant::SizeBalanced).unwrap();
        assert_eq!(f.sizes(), vec![2, 2]);
        assert!(f.degrees(&g).iter().all(|di| di.iter().all(|&x| x == 1)));
        assert!((0..4).all(|v| t.sizes(v) == [0, 2, 0]));
    }

    #[test]
    fn equitable_examples() {
        let g = bundle(6);
        match equitable_factorize(&g, 3, Preconditions::Validate).unwrap() {
            EquitableOutcome::Factorized { factorization, .. } => {
                assert_eq!(factorization.sizes(), vec![2, 2, 2])
            }
            o => panic!("{o:?}"),
        }
        match equitable_factorize(&complete(3), 2, Preconditions::Validate).unwrap() {
            EquitableOutcome::Obstructed(c) => {
                assert_eq!((c.z, c.m, c.checksum), (full_set(3), 1, 0))
            }
            o => panic!("{o:?}"),
        }
        let g = bundle(7);
        match equitable_factorize(&g, 3, Preconditions::Validate).unwrap() {
            EquitableOutcome::Factorized { factorization, .. } => {
                let mut s = factorization.sizes();
                s.sort();
                assert_eq!(s, vec![2, 2, 3]);
                assert!(factorization.degrees(&g).iter().flatten().all(|&x| x == 2 || x == 3));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn partial_examples() {
        let c5 = cycle(5);
        let f = factorize_partial_v0(&c5, 2, 0, Preconditions::Validate).unwrap();
        assert!(f.degrees(&c5).iter().flatten().all(|&x| x <= 2));
        factorize_partial_v0(&complete(3), 2, 0, Preconditions::Validate).unwrap();
        let g = bundle(4);
        let f = factorize_partial_v0(&g, 2, vset(&[0]), Preconditions::Validate).unwrap();
        assert!(f.degrees(&g).iter().all(|di| di[0] == 2));
        assert!(factorize_partial_v0(&g, 2, vset(&[0, 1]), Preconditions::Validate).is_err());
    }

    #[test]
    fn almost_examples() {
        let t = complete(3);
        let spec = AlmostSpec { s: vec![2, 0, 0], z: full_set(3) };
        let f = almost_equitable_factorize(&t, 2, &spec, Preconditions::Assume).unwrap();
        let mut parts: Vec<Vec<usize>> = (0..2).map(|i| f.factor(i)).collect();
        parts.sort();
        assert_eq!(parts, vec![vec![0, 1], vec![2]]);
        let bad = AlmostSpec { s: vec![1, 1, 1], z: full_set(3) };
        assert!(matches!(
            almost_equitable_factorize(&t, 2, &bad, Preconditions::Assume),
            Err(Error::SpecInvalid(_))
        ));
    }

    #[test]
    fn subfamily_examples() {
        let g = Multigraph::from_edges(
            3,
            &[(0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2), (1, 2), (1, 2)],
        )
        .unwrap();
        let fam = max_equitable_subfamily(&g, 3, Preconditions::Validate).unwrap();
        assert_eq!(fam.len(), 2);
        for f in &fam {
            assert_eq!(g.degrees_of(f.iter().copied()), vec![2, 2, 2]);
        }
        assert!(matches!(
            max_equitable_subfamily(&complete(3), 2, Preconditions::Assume),
            Err(Error::NotApplicable(_))
        ));
        assert!(matches!(
            max_equitable_subfamily(&bundle(6), 3, Preconditions::Assume),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn parity_examples() {
        let g = bundle(6);
        let f = parity_constrained_equitable(&g, 3, vset(&[0]), &[], Preconditions::Validate).unwrap();
        assert!(f.degrees(&g).iter().all(|di| di == &vec![2, 2]));
        let g = bundle(4);
        let f = parity_constrained_equitable(&g, 2, vset(&[0]), &[0, 0], Preconditions::Validate)
            .unwrap();
        assert!(f.degrees(&g).iter().all(|di| di[0] == 2));
        let g = bundle(3);
        assert!(matches!(
            parity_constrained_equitable(&g, 2, vset(&[0]), &[0, 0], Preconditions::Assume),
            Err(Error::HypothesisUnmet(_))
        ));
    }
}
