//! Independent reference computations shared by integration tests.
#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::Rng;
use walkbench_core::metric::Metric;
use walkbench_core::weight::{rat, Rational};

/// Metric on `0..n` given by a full distance matrix.
pub struct IndexMetric(pub Vec<Vec<Rational>>);

impl Metric<usize> for IndexMetric {
    fn distance(&self, x: &usize, y: &usize) -> Rational {
        self.0[*x][*y].clone()
    }

    fn kind(&self) -> String {
        "index".into()
    }

    fn integer_valued(&self) -> bool {
        self.0.iter().flatten().all(|d| d.is_integer())
    }

    fn is_pseudometric(&self) -> bool {
        (0..self.0.len()).any(|i| (0..self.0.len()).any(|j| i != j && self.0[i][j].is_zero()))
    }
}

/// Shortest-path closure of random rational edge lengths with denominators up to 4.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Rational>> {
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rat(rng.gen_range(1..=12), rng.gen_range(1..=4));
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

pub fn random_signed<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=6))).collect()
}

/// Labelled trees on `0..k` from their Prufer codes.
fn spanning_trees(k: usize) -> Vec<Vec<(usize, usize)>> {
    if k == 1 {
        return vec![Vec::new()];
    }
    if k == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = k - 2;
    let total = k.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    for mut code_ix in 0..total {
        let mut code = vec![0; len];
        for slot in code.iter_mut() {
            *slot = code_ix % k;
            code_ix /= k;
        }
        let mut degree = vec![1usize; k];
        for &v in &code {
            degree[v] += 1;
        }
        let mut edges = Vec::with_capacity(k - 1);
        for &v in &code {
            let leaf = (0..k).find(|&u| degree[u] == 1).expect("leaf");
            edges.push((leaf, v));
            degree[leaf] -= 1;
            degree[v] -= 1;
        }
        let rest: Vec<usize> = (0..k).filter(|&u| degree[u] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// `max sum c_i f_i` over `|f_i| <= 1`, `f_i - f_j <= d_ij`, by enumerating every
/// vertex of the polytope. Node `n` is a ground with `f = 0`; a basis is
/// nonsingular exactly when its tight constraints form a spanning tree there,
/// and each tree edge is tight in one of two directions.
pub fn vertex_oracle(c: &[Rational], d: &[Vec<Rational>]) -> Rational {
    let n = c.len();
    if n == 0 {
        return Rational::zero();
    }
    let ground = n;
    // Tight edge (u, v) in direction `up` means f_u - f_v = len(u, v).
    let len = |u: usize, v: usize| -> Rational {
        if u == ground || v == ground {
            Rational::one()
        } else {
            d[u][v].clone()
        }
    };
    let feasible =
        |f: &[Rational]| (0..n).all(|i| f[i].abs() <= Rational::one() && (0..n).all(|j| &f[i] - &f[j] <= d[i][j]));
    let mut best: Option<Rational> = None;
    for tree in spanning_trees(n + 1) {
        for mask in 0u32..(1 << n) {
            let mut adj: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n + 1];
            for (e, &(u, v)) in tree.iter().enumerate() {
                let (hi, lo) = if mask >> e & 1 == 1 { (u, v) } else { (v, u) };
                let l = len(hi, lo);
                adj[lo].push((hi, l.clone()));
                adj[hi].push((lo, -l));
            }
            let mut f: Vec<Option<Rational>> = vec![None; n + 1];
            f[ground] = Some(Rational::zero());
            let mut stack = vec![ground];
            while let Some(u) = stack.pop() {
                let fu = f[u].clone().expect("visited");
                for (v, delta) in &adj[u] {
                    if f[*v].is_none() {
                        f[*v] = Some(&fu + delta);
                        stack.push(*v);
                    }
                }
            }
            let f: Vec<Rational> = f.into_iter().take(n).map(|x| x.expect("spanning")).collect();
            if feasible(&f) {
                let v = c.iter().zip(&f).map(|(a, b)| a * b).fold(Rational::zero(), |a, v| a + v);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    }
    best.expect("the box has vertices")
}

/// Two-point value `min(2, d) * |c|` for `c (delta_x - delta_y)`.
pub fn two_point(c: &Rational, d: &Rational) -> Rational {
    c.abs() * d.clone().min(rat(2, 1))
}
