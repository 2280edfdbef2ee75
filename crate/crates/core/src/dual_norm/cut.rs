//! Integer-metric flat norm as a maximum-weight closure, solved by min cut.
//!
//! With integer distances the optimal `f` takes values in `{-1, 0, 1}`.
//! Encode `a_i = [f_i >= 0]`, `b_i = [f_i >= 1]`; then `f_i = a_i + b_i - 1`
//! and the constraints are the implications `b_i -> a_i` and, for every pair
//! at distance one, `b_i -> a_j`, `b_j -> a_i`.

use std::collections::VecDeque;

use crate::weight::Weight;

struct Edge<W> {
    to: usize,
    cap: W,
}

struct Dinic<W> {
    edges: Vec<Edge<W>>,
    adj: Vec<Vec<usize>>,
    level: Vec<i64>,
    iter: Vec<usize>,
}

impl<W: Weight> Dinic<W> {
    fn new(n: usize) -> Self {
        Dinic { edges: Vec::new(), adj: vec![Vec::new(); n], level: vec![0; n], iter: vec![0; n] }
    }

    fn add_edge(&mut self, u: usize, v: usize, cap: W) {
        self.adj[u].push(self.edges.len());
        self.edges.push(Edge { to: v, cap });
        self.adj[v].push(self.edges.len());
        self.edges.push(Edge { to: u, cap: W::zero() });
    }

    fn bfs(&mut self, s: usize) {
        let tol = W::tolerance();
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if self.edges[e].cap > tol && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    q.push_back(v);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, limit: W) -> W {
        if u == t {
            return limit;
        }
        let tol = W::tolerance();
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let v = self.edges[e].to;
            if self.edges[e].cap > tol && self.level[v] == self.level[u] + 1 {
                let push = W::min_of(limit.clone(), self.edges[e].cap.clone());
                let got = self.dfs(v, t, push);
                if got > tol {
                    self.edges[e].cap = self.edges[e].cap.clone() - got.clone();
                    self.edges[e ^ 1].cap = self.edges[e ^ 1].cap.clone() + got.clone();
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        W::zero()
    }

    fn max_flow(&mut self, s: usize, t: usize, inf: &W) -> W {
        let mut flow = W::zero();
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, inf.clone());
                if f <= W::tolerance() {
                    break;
                }
                flow = flow + f;
            }
        }
    }
}

/// `c`: weights; `edges`: pairs at distance exactly one. Returns value and `f`.
pub(crate) fn solve<W: Weight>(c: &[W], edges: &[(usize, usize)]) -> (W, Vec<W>) {
    let n = c.len();
    let s = 2 * n;
    let t = 2 * n + 1;
    let inf = c.iter().fold(W::one(), |acc, w| acc + w.abs() + w.abs());
    let mut g = Dinic::new(2 * n + 2);
    let mut positive = W::zero();
    for (i, w) in c.iter().enumerate() {
        for node in [2 * i, 2 * i + 1] {
            if w.is_positive() {
                g.add_edge(s, node, w.clone());
                positive = positive + w.clone();
            } else if w.is_negative() {
                g.add_edge(node, t, -w.clone());
            }
        }
        g.add_edge(2 * i + 1, 2 * i, inf.clone());
    }
    for &(i, j) in edges {
        g.add_edge(2 * i + 1, 2 * j, inf.clone());
        g.add_edge(2 * j + 1, 2 * i, inf.clone());
    }
    let cut = g.max_flow(s, t, &inf);
    g.bfs(s);
    let total = c.iter().fold(W::zero(), |a, w| a + w.clone());
    let value = positive - cut - total;
    let f = (0..n)
        .map(|i| {
            let a = (g.level[2 * i] >= 0) as i64;
            let b = (g.level[2 * i + 1] >= 0) as i64;
            W::from_int(a + b - 1)
        })
        .collect();
    (value, f)
}
