//! Deciding from degrees alone whether a highly connected graph has a
//! `k`-equitable factorization, with certificates either way.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{contains, rk, Multigraph, VSet};

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > 64 {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..=64")));
    }
    Ok(())
}

fn residues(g: &Multigraph, k: usize) -> Vec<usize> {
    g.degrees().iter().map(|&d| d % k).collect()
}

/// `Σ_Z [d]_k + Σ_{V∖Z} [k - d]_k`.
pub fn checksum(g: &Multigraph, k: usize, z: VSet) -> usize {
    residues(g, k)
        .iter()
        .enumerate()
        .map(|(v, &r)| if contains(z, v) { r } else { (k - r) % k })
        .sum()
}

/// `[|E| - Σ_Z d]_k`.
pub fn z_residue(g: &Multigraph, k: usize, z: VSet) -> usize {
    let d = g.degrees();
    let sz: i64 = (0..g.n()).filter(|&v| contains(z, v)).map(|v| d[v] as i64).sum();
    rk(g.num_edges() as i64 - sz, k as i64) as usize
}

fn zero_set(r: &[usize]) -> VSet {
    r.iter().enumerate().filter(|(_, &x)| x == 0).fold(0, |s, (v, _)| s | 1 << v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZChoice {
    pub z: VSet,
    pub m: usize,
    pub checksum: usize,
}

/// A set `Z` containing every zero-residue vertex that minimizes
/// `m = [|E| - Σ_Z d]_k`; among those, the one with the smallest bitmask.
pub fn find_min_z(g: &Multigraph, k: usize) -> Result<ZChoice> {
    check_k(k)?;
    let n = g.n();
    if n > 64 {
        return Err(Error::CapExceeded(format!("n = {n} > 64")));
    }
    let r = residues(g, k);
    // reach[i]: sums mod k achievable with vertices 0..i.
    let mut reach = vec![vec![false; k]; n + 1];
    reach[0][0] = true;
    for v in 0..n {
        for s in 0..k {
            if reach[v][s] {
                reach[v + 1][s] = true;
                reach[v + 1][(s + r[v]) % k] = true;
            }
        }
    }
    let e = g.num_edges() % k;
    let m = (0..k).find(|&m| reach[n][(e + k - m) % k]).expect("the empty sum is reachable");
    let mut t = (e + k - m) % k;
    let mut z = zero_set(&r);
    for v in (0..n).rev() {
        if r[v] != 0 && !reach[v][t] {
            z |= 1 << v;
            t = (t + k - r[v]) % k;
        }
    }
    let out = ZChoice { z, m, checksum: checksum(g, k, z) };
    debug_assert_eq!(z_residue(g, k, z), m);
    let lemma = 2 * m <= k
        && (0..n).all(|v| if contains(z, v) { r[v] + 2 * m <= k } else { r[v] >= 2 * m });
    if !lemma {
        return Err(Error::InternalContradiction("minimal Z breaks the residue bounds".into()));
    }
    Ok(out)
}

/// Full subset scan for the minimal `m`; oracle for [`find_min_z`].
pub fn min_z_by_scan(g: &Multigraph, k: usize) -> Result<usize> {
    check_k(k)?;
    if g.n() > 20 {
        return Err(Error::CapExceeded(format!("n = {} > 20", g.n())));
    }
    Ok((0..1u64 << g.n()).map(|z| z_residue(g, k, z)).min().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub k: usize,
    pub z: VSet,
    pub m: usize,
    pub checksum: usize,
}

impl ObstructionCertificate {
    /// Recomputes `m` and the checksum and checks `m > 0`, `checksum = k - 2m`.
    pub fn verify(&self, g: &Multigraph) -> bool {
        let zeros = zero_set(&residues(g, self.k));
        self.z & zeros == zeros
            && self.m > 0
            && z_residue(g, self.k, self.z) == self.m
            && checksum(g, self.k, self.z) == self.checksum
            && self.checksum + 2 * self.m == self.k
    }
}

/// `x[i][v] ∈ {0, 1}`, factor indices `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryWitness {
    pub k: usize,
    pub x: Vec<Vec<u8>>,
}

impl BinaryWitness {
    fn floor_parity(g: &Multigraph, k: usize) -> usize {
        g.degrees().iter().map(|&d| d / k).sum::<usize>() % 2
    }

    pub fn row_sums_ok(&self, g: &Multigraph) -> bool {
        let r = residues(g, self.k);
        self.x.len() == self.k
            && self.x.iter().all(|row| row.len() == g.n() && row.iter().all(|&b| b <= 1))
            && (0..g.n()).all(|v| self.x.iter().map(|row| row[v] as usize).sum::<usize>() == r[v])
    }

    /// Indices whose column parity differs from `Σ ⌊d/k⌋`.
    pub fn bad_indices(&self, g: &Multigraph) -> Vec<usize> {
        let p = Self::floor_parity(g, self.k);
        (0..self.k)
            .filter(|&i| self.x[i].iter().map(|&b| b as usize).sum::<usize>() % 2 != p)
            .collect()
    }

    pub fn is_valid(&self, g: &Multigraph) -> bool {
        self.row_sums_ok(g) && self.bad_indices(g).is_empty()
    }

    /// Any witness candidate with the right row sums, spread round-robin.
    pub fn initial(g: &Multigraph, k: usize) -> Self {
        let r = residues(g, k);
        let mut x = vec![vec![0u8; g.n()]; k];
        let mut next = 0;
        for v in 0..g.n() {
            for _ in 0..r[v] {
                x[next % k][v] = 1;
                next += 1;
            }
        }
        BinaryWitness { k, x }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Yes(BinaryWitness),
    No(ObstructionCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstacleAnalysis {
    pub bad: Vec<usize>,
    /// Neither swap move applies.
    pub minimal: bool,
    /// `(Z, m)` read off a minimal candidate with `bad` nonempty.
    pub obstruction: Option<(VSet, usize)>,
}

/// Applies one parity-reducing swap if possible.
fn reduce_once(x: &mut [Vec<u8>], bad: &[usize]) -> bool {
    let n = x.first().map_or(0, |r| r.len());
    for (a, &i) in bad.iter().enumerate() {
        for &j in &bad[a + 1..] {
            if let Some(v) = (0..n).find(|&v| x[i][v] != x[j][v]) {
                x[i][v] ^= 1;
                x[j][v] ^= 1;
                return true;
            }
        }
    }
    if bad.len() >= 2 {
        let (j, j0) = (bad[0], bad[1]);
        for i in (0..x.len()).filter(|i| !bad.contains(i)) {
            let diff: Vec<usize> = (0..n).filter(|&v| x[i][v] != x[j][v]).collect();
            if let [v, w, ..] = diff[..] {
                x[i][v] ^= 1;
                x[i][w] ^= 1;
                x[j][v] ^= 1;
                x[j0][w] ^= 1;
                return true;
            }
        }
    }
    false
}

pub fn minimal_obstacle_analysis(g: &Multigraph, w: &BinaryWitness) -> Result<ObstacleAnalysis> {
    check_k(w.k)?;
    if !w.row_sums_ok(g) {
        return Err(Error::InvalidInput("witness rows must sum to the degree residues".into()));
    }
    let bad = w.bad_indices(g);
    let minimal = !reduce_once(&mut w.x.clone(), &bad);
    let obstruction = (minimal && !bad.is_empty()).then(|| {
        let j = bad[0];
        let z = (0..g.n()).filter(|&v| w.x[j][v] == 0).fold(0, |s, v| s | 1 << v);
        (z, bad.len() / 2)
    });
    Ok(ObstacleAnalysis { bad, minimal, obstruction })
}

/// Drives a candidate to a local minimum of the bad-index count.
pub fn minimize_witness(g: &Multigraph, mut w: BinaryWitness) -> BinaryWitness {
    loop {
        let bad = w.bad_indices(g);
        if !reduce_once(&mut w.x, &bad) {
            return w;
        }
    }
}

pub fn decide_equitable(g: &Multigraph, k: usize) -> Result<Decision> {
    check_k(k)?;
    if g.n() > 64 {
        return Err(Error::CapExceeded(format!("n = {} > 64", g.n())));
    }
    let w = minimize_witness(g, BinaryWitness::initial(g, k));
    let a = minimal_obstacle_analysis(g, &w)?;
    match a.obstruction {
        None => Ok(Decision::Yes(w)),
        Some((z, m)) => {
            let cert = ObstructionCertificate { k, z, m, checksum: checksum(g, k, z) };
            if !cert.verify(g) {
                return Err(Error::InternalContradiction(
                    "minimal witness does not yield an obstruction".into(),
                ));
            }
            Ok(Decision::No(cert))
        }
    }
}

/// Every zero-including `Z` with `m > 0` and checksum `k - 2m`; oracle for
/// the uniqueness lemma.
pub fn obstructions_by_scan(g: &Multigraph, k: usize) -> Result<Vec<ObstructionCertificate>> {
    check_k(k)?;
    if g.n() > 20 {
        return Err(Error::CapExceeded(format!("n = {} > 20", g.n())));
    }
    let zeros = zero_set(&residues(g, k));
    Ok((0..1u64 << g.n())
        .filter(|z| z & zeros == zeros)
        .map(|z| ObstructionCertificate {
            k,
            z,
            m: z_residue(g, k, z),
            checksum: checksum(g, k, z),
        })
        .filter(|c| c.m > 0 && c.checksum + 2 * c.m == k)
        .collect())
}

/// A residue multiset (nonzero entries, sorted) and whether it is obstructed
/// only when `Σ ⌊d/k⌋` is odd.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BadSequence {
    pub residues: Vec<usize>,
    pub star: bool,
}

fn obstructed(res: &[usize], k: usize, e: usize) -> bool {
    (0..1u32 << res.len()).any(|z| {
        let (mut s, mut check) = (0, 0);
        for (i, &r) in res.iter().enumerate() {
            if z >> i & 1 == 1 {
                s += r;
                check += r;
            } else {
                check += k - r;
            }
        }
        let m = (e + k * res.len() - s % k) % k;
        m > 0 && check + 2 * m == k
    })
}

/// Residue multisets with at most `max_nonzero` entries for which some
/// realization is obstructed. `|E| mod k` is `(k·p + Σr)/2` where `p` is
/// the parity of `Σ ⌊d/k⌋`; rows with `p = 1` are starred.
pub fn enumerate_bad_sequences(k: usize, max_nonzero: usize) -> Result<BTreeSet<BadSequence>> {
    if !(2..=7).contains(&k) {
        return Err(Error::InvalidInput(format!("k = {k} outside 2..=7")));
    }
    let mut out = BTreeSet::new();
    let mut cur = Vec::new();
    collect(k, max_nonzero, 1, &mut cur, &mut out);
    Ok(out)
}

fn collect(k: usize, left: usize, from: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<BadSequence>) {
    let sum: usize = cur.iter().sum();
    for p in 0..2 {
        if (k * p + sum) % 2 != 0 {
            continue;
        }
        let e = ((k * p + sum) / 2) % k;
        if obstructed(cur, k, e) {
            out.insert(BadSequence { residues: cur.clone(), star: k % 2 == 0 && p == 1 });
        }
    }
    if left == 0 {
        return;
    }
    for r in from..k {
        cur.push(r);
        collect(k, left - 1, r, cur, out);
        cur.pop();
    }
}

/// Parses the Table 1 transcription: `k residues... [*]` per line, `#`
/// comments, zero residues dropped.
pub fn parse_table(text: &str) -> Result<Vec<(usize, BadSequence)>> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks: Vec<&str> = line.split_whitespace().collect();
        let star = toks.last() == Some(&"*");
        if star {
            toks.pop();
        }
        let nums: Vec<usize> = toks
            .iter()
            .map(|t| t.parse().map_err(|_| Error::InvalidInput(format!("bad token {t:?}"))))
            .collect::<Result<_>>()?;
        let (&k, rest) =
            nums.split_first().ok_or_else(|| Error::InvalidInput("empty table row".into()))?;
        let mut residues: Vec<usize> = rest.iter().copied().filter(|&r| r != 0).collect();
        residues.sort_unstable();
        rows.push((k, BadSequence { residues, star }));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::{bundle, complete, cycle};
    use crate::graph::full_set;

    fn deg_466() -> Multigraph {
        Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2), (1, 2), (1, 2)])
            .unwrap()
    }

    #[test]
    fn min_z_examples() {
        let t = find_min_z(&complete(3), 2).unwrap();
        assert_eq!((t.z, t.m), (full_set(3), 1));
        assert_eq!(find_min_z(&bundle(6), 3).unwrap().m, 0);
        let g = deg_466();
        assert_eq!(g.degrees(), vec![4, 6, 6]);
        let c = find_min_z(&g, 3).unwrap();
        assert_eq!((c.z, c.m), (full_set(3), 1));
        for g in [complete(3), deg_466(), complete(4), cycle(5)] {
            for k in 2..6 {
                assert_eq!(find_min_z(&g, k).unwrap().m, min_z_by_scan(&g, k).unwrap());
            }
        }
    }

    #[test]
    fn decide_examples() {
        match decide_equitable(&complete(3), 2).unwrap() {
            Decision::No(c) => assert_eq!((c.z, c.m, c.checksum), (full_set(3), 1, 0)),
            d => panic!("{d:?}"),
        }
        match decide_equitable(&cycle(4), 2).unwrap() {
            Decision::Yes(w) => assert!(w.x.iter().flatten().all(|&b| b == 0)),
            d => panic!("{d:?}"),
        }
        assert!(matches!(decide_equitable(&complete(4), 2).unwrap(), Decision::Yes(_)));
        assert!(obstructions_by_scan(&complete(4), 2).unwrap().is_empty());
    }

    #[test]
    fn obstacle_examples() {
        let tri = complete(3);
        let w = BinaryWitness { k: 2, x: vec![vec![0; 3]; 2] };
        let a = minimal_obstacle_analysis(&tri, &w).unwrap();
        assert_eq!(a.bad, vec![0, 1]);
        assert_eq!(a.obstruction, Some((full_set(3), 1)));
        let w = BinaryWitness { k: 2, x: vec![vec![0; 4]; 2] };
        assert!(minimal_obstacle_analysis(&cycle(4), &w).unwrap().bad.is_empty());
        let w = BinaryWitness { k: 2, x: vec![vec![1; 4], vec![0; 4]] };
        assert!(minimal_obstacle_analysis(&complete(4), &w).unwrap().bad.is_empty());
        let bad = BinaryWitness { k: 2, x: vec![vec![1; 3], vec![0; 3]] };
        assert!(minimal_obstacle_analysis(&tri, &bad).is_err());
    }

    #[test]
    fn small_tables() {
        let k2 = enumerate_bad_sequences(2, 3).unwrap();
        assert_eq!(k2.into_iter().collect::<Vec<_>>(), vec![BadSequence { residues: vec![], star: true }]);
        let k3 = enumerate_bad_sequences(3, 3).unwrap();
        let rows: Vec<(Vec<usize>, bool)> = k3.into_iter().map(|b| (b.residues, b.star)).collect();
        assert_eq!(rows, vec![(vec![1], false), (vec![2], false)]);
        let k4 = enumerate_bad_sequences(4, 4).unwrap();
        assert_eq!(k4.len(), 6);
        assert!(k4.contains(&BadSequence { residues: vec![1, 1], star: true }));
        assert!(k4.contains(&BadSequence { residues: vec![1, 3], star: false }));
        assert!(enumerate_bad_sequences(8, 3).is_err());
    }
}

#[cfg(test)]
mod table_tests {
    use super::*;

    #[test]
    fn table_matches_fixture() {
        let text = include_str!("../fixtures/table1.txt");
        let rows = parse_table(text).unwrap();
        for k in 2..=7 {
            let want: BTreeSet<BadSequence> =
                rows.iter().filter(|(kk, _)| *kk == k).map(|(_, b)| b.clone()).collect();
            let got = enumerate_bad_sequences(k, 6).unwrap();
            let missing: Vec<_> = want.difference(&got).collect();
            let extra: Vec<_> = got.difference(&want).collect();
            assert!(missing.is_empty() && extra.is_empty(), "k={k} missing {missing:?} extra {extra:?}");
        }
    }
}
