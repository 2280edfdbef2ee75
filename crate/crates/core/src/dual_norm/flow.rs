//! Flat norm through its dual: uncapacitated min-cost flow with a ground node.
//!
//! Supplies are the atom weights; moving mass from `i` to `j` costs `d(i,j)`,
//! and any atom may exchange mass with the ground at cost one.

use std::collections::BTreeMap;

use crate::weight::Weight;

/// `dist[i][j]` capped distances (`None` for pairs at distance >= 2).
pub(crate) fn solve<W: Weight>(c: &[W], dist: &[Vec<Option<W>>]) -> (W, Vec<W>) {
    let n = c.len();
    let ground = n;
    let v = n + 1;
    let tol = W::tolerance();
    let cost = |u: usize, w: usize| -> Option<W> {
        if u == w {
            None
        } else if u == ground || w == ground {
            Some(W::one())
        } else {
            dist[u][w].clone()
        }
    };
    let mut excess: Vec<W> = c.to_vec();
    excess.push(-c.iter().fold(W::zero(), |a, w| a + w.clone()));
    let mut flow: BTreeMap<(usize, usize), W> = BTreeMap::new();
    let mut pot = vec![W::zero(); v];
    let mut total_cost = W::zero();
    while let Some(s) = (0..v).find(|&i| excess[i] > tol) {
        // Dense Dijkstra on reduced costs.
        let mut dist_to: Vec<Option<W>> = vec![None; v];
        let mut prev: Vec<Option<(usize, bool)>> = vec![None; v];
        let mut done = vec![false; v];
        dist_to[s] = Some(W::zero());
        loop {
            let mut best: Option<usize> = None;
            for i in 0..v {
                if done[i] {
                    continue;
                }
                if let Some(di) = &dist_to[i] {
                    if best.is_none_or(|b| *di < dist_to[b].clone().unwrap()) {
                        best = Some(i);
                    }
                }
            }
            let Some(u) = best else { break };
            done[u] = true;
            let du = dist_to[u].clone().unwrap();
            for w in 0..v {
                if done[w] {
                    continue;
                }
                let mut cand: Option<(W, bool)> = None;
                if let Some(cw) = cost(u, w) {
                    cand = Some((cw + pot[u].clone() - pot[w].clone(), true));
                }
                if flow.get(&(w, u)).is_some_and(|x| *x > tol) {
                    let back = -cost(w, u).unwrap() + pot[u].clone() - pot[w].clone();
                    if cand.as_ref().is_none_or(|(cv, _)| back < *cv) {
                        cand = Some((back, false));
                    }
                }
                if let Some((rc, fwd)) = cand {
                    let rc = W::max_of(rc, W::zero());
                    let nd = du.clone() + rc;
                    if dist_to[w].as_ref().is_none_or(|d| nd < *d) {
                        dist_to[w] = Some(nd);
                        prev[w] = Some((u, fwd));
                    }
                }
            }
        }
        let t = (0..v)
            .filter(|&i| excess[i] < -tol.clone())
            .min_by(|&a, &b| {
                let (da, db) = (dist_to[a].clone().unwrap(), dist_to[b].clone().unwrap());
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            })
            .expect("supplies balance");
        for i in 0..v {
            pot[i] = pot[i].clone() + dist_to[i].clone().expect("every node reachable");
        }
        let mut delta = W::min_of(excess[s].clone(), -excess[t].clone());
        let mut path = Vec::new();
        let mut cur = t;
        while cur != s {
            let (p, fwd) = prev[cur].unwrap();
            if !fwd {
                delta = W::min_of(delta, flow[&(cur, p)].clone());
            }
            path.push((p, cur, fwd));
            cur = p;
        }
        for (p, q, fwd) in path {
            if fwd {
                let e = flow.entry((p, q)).or_insert_with(W::zero);
                *e = e.clone() + delta.clone();
                total_cost = total_cost + delta.clone() * cost(p, q).unwrap();
            } else {
                let e = flow.get_mut(&(q, p)).unwrap();
                *e = e.clone() - delta.clone();
                total_cost = total_cost - delta.clone() * cost(q, p).unwrap();
                if *e <= tol {
                    flow.remove(&(q, p));
                }
            }
        }
        excess[s] = excess[s].clone() - delta.clone();
        excess[t] = excess[t].clone() + delta;
    }
    let f = (0..n).map(|i| pot[ground].clone() - pot[i].clone()).collect();
    (total_cost, f)
}
