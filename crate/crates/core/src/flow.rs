//! Dinic max-flow and feasible flows with lower bounds.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Clone, Debug)]
pub struct FlowNet {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNet {
    pub fn new(n: usize) -> Self {
        FlowNet { arcs: Vec::new(), out: vec![Vec::new(); n], level: vec![], iter: vec![] }
    }

    /// Adds `from -> to` and returns the arc id (its residual twin is `id ^ 1`).
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    /// Flow currently carried by arc `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.arcs[id ^ 1].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level = vec![-1; self.out.len()];
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.out[u] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    q.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.out[u].len() {
            let a = self.out[u][self.iter[u]];
            let Arc { to, cap } = self.arcs[a];
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.iter = vec![0; self.out.len()];
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

/// Network whose arcs carry `[lo, hi]` bounds; solved by the usual
/// reduction to a max-flow from a super source.
#[derive(Clone, Debug)]
pub struct BoundedNet {
    n: usize,
    arcs: Vec<(usize, usize, i64, i64)>,
}

impl BoundedNet {
    pub fn new(n: usize) -> Self {
        BoundedNet { n, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, lo: i64, hi: i64) -> usize {
        self.arcs.push((from, to, lo, hi));
        self.arcs.len() - 1
    }

    /// A feasible circulation as per-arc flows, if one exists.
    pub fn circulation(&self) -> Option<Vec<i64>> {
        if self.arcs.iter().any(|&(_, _, lo, hi)| lo > hi) {
            return None;
        }
        let s = self.n;
        let t = self.n + 1;
        let mut net = FlowNet::new(self.n + 2);
        let mut excess = vec![0i64; self.n];
        let mut ids = Vec::with_capacity(self.arcs.len());
        for &(u, v, lo, hi) in &self.arcs {
            ids.push(net.add_arc(u, v, hi - lo));
            excess[v] += lo;
            excess[u] -= lo;
        }
        let mut need = 0;
        for (v, &x) in excess.iter().enumerate() {
            if x > 0 {
                net.add_arc(s, v, x);
                need += x;
            } else if x < 0 {
                net.add_arc(v, t, -x);
            }
        }
        if net.max_flow(s, t) != need {
            return None;
        }
        Some(
            self.arcs
                .iter()
                .zip(&ids)
                .map(|(&(_, _, lo, _), &id)| lo + net.flow(id))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_max_flow() {
        let mut f = FlowNet::new(4);
        f.add_arc(0, 1, 3);
        f.add_arc(0, 2, 2);
        f.add_arc(1, 2, 1);
        f.add_arc(1, 3, 2);
        f.add_arc(2, 3, 3);
        assert_eq!(f.max_flow(0, 3), 5);
    }

    #[test]
    fn circulation_respects_bounds() {
        let mut b = BoundedNet::new(3);
        b.add_arc(0, 1, 2, 4);
        b.add_arc(1, 2, 0, 3);
        b.add_arc(2, 0, 1, 5);
        let c = b.circulation().unwrap();
        assert!(c[0] >= 2 && c[0] <= 3 && c[0] == c[1] && c[1] == c[2]);

        let mut bad = BoundedNet::new(2);
        bad.add_arc(0, 1, 2, 2);
        bad.add_arc(1, 0, 0, 1);
        assert!(bad.circulation().is_none());
    }
}
