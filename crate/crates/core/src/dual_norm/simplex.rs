//! Dense dictionary simplex with Bland's rule for `max c.x, A x <= b, x >= 0, b >= 0`.

use crate::weight::Weight;

pub(crate) struct Lp<W> {
    /// Row `r`: `sum_k a[r][k] x_k <= b[r]`.
    pub a: Vec<Vec<W>>,
    pub b: Vec<W>,
    pub c: Vec<W>,
}

/// Returns the optimum and an optimal `x`. The origin must be feasible.
pub(crate) fn solve<W: Weight>(lp: Lp<W>) -> (W, Vec<W>) {
    let n = lp.c.len();
    let m = lp.b.len();
    let tol = W::tolerance();
    // Variables 0..n are structural, n..n+m slacks.
    let mut nonbasic: Vec<usize> = (0..n).collect();
    let mut basic: Vec<usize> = (n..n + m).collect();
    let mut a = lp.a;
    let mut b = lp.b;
    let mut c = lp.c;
    let mut z = W::zero();
    loop {
        let entering = (0..n).filter(|&k| c[k] > tol).min_by_key(|&k| nonbasic[k]);
        let Some(k) = entering else { break };
        let mut leave: Option<(usize, W)> = None;
        for r in 0..m {
            if a[r][k] > tol {
                let ratio = b[r].clone() / a[r][k].clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < best.clone() - tol.clone() || (W::eq_tol(&ratio, best) && basic[r] < basic[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (r, _) = leave.expect("flat-norm LP is bounded");
        let p = a[r][k].clone();
        for j in 0..n {
            if j != k {
                a[r][j] = a[r][j].clone() / p.clone();
            }
        }
        a[r][k] = W::one() / p.clone();
        b[r] = b[r].clone() / p;
        let row_r = a[r].clone();
        let br = b[r].clone();
        for i in 0..m {
            if i == r || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                if j != k && !row_r[j].is_zero() {
                    a[i][j] = a[i][j].clone() - f.clone() * row_r[j].clone();
                }
            }
            a[i][k] = -(f.clone() * row_r[k].clone());
            b[i] = b[i].clone() - f * br.clone();
        }
        let ck = c[k].clone();
        for j in 0..n {
            if j != k && !row_r[j].is_zero() {
                c[j] = c[j].clone() - ck.clone() * row_r[j].clone();
            }
        }
        c[k] = -(ck.clone() * row_r[k].clone());
        z = z + ck * br;
        std::mem::swap(&mut nonbasic[k], &mut basic[r]);
    }
    let mut x = vec![W::zero(); n];
    for (r, &v) in basic.iter().enumerate() {
        if v < n {
            x[v] = b[r].clone();
        }
    }
    (z, x)
}
