//! Edge decompositions into `k` factors and the bounds they are checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// Total map from edge ids to factor indices `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl Factorization {
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&i| i >= k) {
            return Err(Error::InvalidInput(format!("factor index {bad} outside 0..{k}")));
        }
        Ok(Factorization { k, assignment })
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &i in &self.assignment {
            s[i] += 1;
        }
        s
    }

    /// `degrees(g)[i][v]` is the degree of `v` in factor `i`.
    pub fn degrees(&self, g: &Multigraph) -> Vec<Vec<usize>> {
        let mut d = vec![vec![0; g.n()]; self.k];
        for (e, u, v) in g.edges() {
            let i = self.assignment[e];
            d[i][u] += 1;
            d[i][v] += 1;
        }
        d
    }

    pub fn factor(&self, i: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&e| self.assignment[e] == i).collect()
    }

    /// `|d_i(v) - d(v)/k| < 1` for every factor and vertex.
    pub fn is_equitable(&self, g: &Multigraph) -> bool {
        let d = g.degrees();
        self.degrees(g)
            .iter()
            .all(|di| di.iter().zip(&d).all(|(&x, &dv)| strictly_within(x, dv, self.k, 1)))
    }

    /// `||E_i| - |E|/k| < 1` for every factor.
    pub fn is_size_balanced(&self) -> bool {
        let total = self.assignment.len();
        self.sizes().iter().all(|&s| strictly_within(s, total, self.k, 1))
    }

    /// Relabels factors so that index `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Factorization {
        Factorization { k: self.k, assignment: self.assignment.iter().map(|&i| perm[i]).collect() }
    }
}

/// `|x - total/k| < slack`, exactly.
pub fn strictly_within(x: usize, total: usize, k: usize, slack: usize) -> bool {
    ((k * x) as i64 - total as i64).unsigned_abs() < (slack * k) as u64
}

pub fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

pub fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_is_strict() {
        assert!(strictly_within(2, 5, 2, 1));
        assert!(strictly_within(3, 5, 2, 1));
        assert!(!strictly_within(1, 5, 2, 1));
        assert!(!strictly_within(3, 6, 3, 1));
        assert!(strictly_within(3, 6, 3, 2));
    }

    #[test]
    fn sizes_and_degrees() {
        let g = crate::graph::families::cycle(4);
        let f = Factorization::new(2, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(f.sizes(), vec![2, 2]);
        assert!(f.is_equitable(&g));
        assert!(Factorization::new(2, vec![2]).is_err());
        assert_eq!((ceil_div(5, 2), floor_div(-3, 2)), (3, -2));
    }
}
