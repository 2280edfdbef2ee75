//! The bounded-Lipschitz (flat) norm of finitely supported signed measures,
//! right-invariant metrics on groups, and invariance-deficiency profiles.

mod cut;
mod flow;
mod simplex;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Mutex;

use crate::actions::Action;
use crate::groups::Group;
use crate::measures::{capped_powers, convolve_signed, translate, FinMeasure, MeasureError, SignedFinMeasure};
use crate::metric::Metric;
use crate::parallel::par_map;
use crate::weight::{rat, rat_int, Rational, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Empty support after merging.
    Trivial,
    Simplex,
    MinCut,
    MinCostFlow,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Trivial => "trivial",
            Backend::Simplex => "simplex",
            Backend::MinCut => "min-cut",
            Backend::MinCostFlow => "min-cost-flow",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatNormOptions {
    /// Largest merged support handed to the dense simplex.
    pub simplex_limit: usize,
    /// Overrides the automatic choice.
    pub force: Option<Backend>,
}

impl Default for FlatNormOptions {
    fn default() -> Self {
        FlatNormOptions { simplex_limit: 48, force: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatNorm<P, W> {
    pub value: W,
    /// Optimal test function on the support.
    pub witness: Vec<(P, W)>,
    pub backend: Backend,
    pub pseudometric: bool,
}

/// `sup { |m(f)| : |f| <= 1, f 1-Lipschitz }`, exactly in exact mode.
pub fn flat_norm<P, W, M>(m: &SignedFinMeasure<P, W>, d: &M, opts: &FlatNormOptions) -> FlatNorm<P, W>
where
    P: Clone + Ord,
    W: Weight,
    M: Metric<P> + ?Sized,
{
    let pts: Vec<&P> = m.atoms().keys().collect();
    let ws: Vec<&W> = m.atoms().values().collect();
    let pseudo = d.is_pseudometric();
    // Merge atoms at distance zero.
    let mut class_of: Vec<usize> = (0..pts.len()).collect();
    let mut reps: Vec<usize> = Vec::new();
    if pseudo {
        for i in 0..pts.len() {
            match reps.iter().find(|&&r| d.capped_distance(pts[r], pts[i]).numer().sign() == num_bigint::Sign::NoSign) {
                Some(&r) => class_of[i] = class_of[r],
                None => {
                    class_of[i] = reps.len();
                    reps.push(i);
                }
            }
        }
    } else {
        reps = (0..pts.len()).collect();
    }
    let mut cw: Vec<W> = vec![W::zero(); reps.len()];
    for (i, w) in ws.iter().enumerate() {
        cw[class_of[i]] = cw[class_of[i]].clone() + (*w).clone();
    }
    let live: Vec<usize> = (0..reps.len()).filter(|&k| !cw[k].is_zero()).collect();
    let c: Vec<W> = live.iter().map(|&k| cw[k].clone()).collect();
    let lp: Vec<&P> = live.iter().map(|&k| pts[reps[k]]).collect();
    let n = c.len();

    let backend = if n == 0 {
        Backend::Trivial
    } else if let Some(b) = opts.force {
        b
    } else if n <= opts.simplex_limit {
        Backend::Simplex
    } else if d.integer_valued() {
        Backend::MinCut
    } else {
        Backend::MinCostFlow
    };

    let (value, f_live): (W, Vec<W>) = match backend {
        Backend::Trivial => (W::zero(), Vec::new()),
        Backend::MinCut => {
            let edges = unit_pairs(&lp, d);
            cut::solve(&c, &edges)
        }
        Backend::Simplex => solve_simplex(&c, &dense_distances(&lp, d)),
        Backend::MinCostFlow => flow::solve(&c, &dense_distances(&lp, d)),
    };

    let mut f_class = vec![W::zero(); reps.len()];
    for (idx, &k) in live.iter().enumerate() {
        f_class[k] = f_live[idx].clone();
    }
    let witness = pts.iter().enumerate().map(|(i, p)| ((*p).clone(), f_class[class_of[i]].clone())).collect();
    FlatNorm { value, witness, backend, pseudometric: pseudo }
}

fn dense_distances<P, W: Weight, M: Metric<P> + ?Sized>(pts: &[&P], d: &M) -> Vec<Vec<Option<W>>> {
    let two = rat_int(2);
    let n = pts.len();
    let mut out = vec![vec![None; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = d.capped_distance(pts[i], pts[j]);
            if dij < two {
                let w = W::from_rational(&dij);
                out[i][j] = Some(w.clone());
                out[j][i] = Some(w);
            }
        }
    }
    out
}

fn unit_pairs<P: Ord, M: Metric<P> + ?Sized>(pts: &[&P], d: &M) -> Vec<(usize, usize)> {
    let one = rat_int(1);
    let mut edges = Vec::new();
    let probe = pts.first().and_then(|p| d.unit_neighbors(p));
    if probe.is_some() {
        let index: BTreeMap<&P, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        for (i, p) in pts.iter().enumerate() {
            for q in d.unit_neighbors(p).unwrap_or_default() {
                if let Some(&j) = index.get(&q) {
                    let key = (i.min(j), i.max(j));
                    if i != j && !seen.contains(&key) && d.capped_distance(p, &q) == one {
                        seen.insert(key);
                        edges.push(key);
                    }
                }
            }
        }
        edges.sort();
    } else {
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if d.capped_distance(pts[i], pts[j]) == one {
                    edges.push((i, j));
                }
            }
        }
    }
    edges
}

/// Variables `u_i = f_i + 1` in `[0, 2]`.
fn solve_simplex<W: Weight>(c: &[W], dist: &[Vec<Option<W>>]) -> (W, Vec<W>) {
    let n = c.len();
    let mut a: Vec<Vec<W>> = Vec::new();
    let mut b: Vec<W> = Vec::new();
    for i in 0..n {
        let mut row = vec![W::zero(); n];
        row[i] = W::one();
        a.push(row);
        b.push(W::from_int(2));
    }
    for i in 0..n {
        for j in 0..n {
            let Some(dij) = &dist[i][j] else { continue };
            let implied = (0..n).any(|k| {
                k != i
                    && k != j
                    && matches!((&dist[i][k], &dist[k][j]), (Some(x), Some(y)) if W::le_tol(&(x.clone() + y.clone()), dij))
            });
            if implied {
                continue;
            }
            let mut row = vec![W::zero(); n];
            row[i] = W::one();
            row[j] = -W::one();
            a.push(row);
            b.push(dij.clone());
        }
    }
    let (z, u) = simplex::solve(simplex::Lp { a, b, c: c.to_vec() });
    let total = c.iter().fold(W::zero(), |s, w| s + w.clone());
    (z - total, u.into_iter().map(|x| x - W::one()).collect())
}

/// Word metric `d(x, y) = |x y^-1|_S` for a symmetric generating set `S`.
pub struct WordMetric<G: Group> {
    group: G,
    gens: Vec<G::Elem>,
    closed_form: bool,
    ball2: HashMap<G::Elem, u64>,
    memo: Mutex<BfsState<G::Elem>>,
}

/// Distances found so far, the outer sphere and its radius.
type BfsState<E> = (HashMap<E, u64>, Vec<E>, u64);

/// Radius beyond which uncapped word distances are reported as this bound.
pub const WORD_RADIUS_LIMIT: u64 = 64;

impl<G: Group> WordMetric<G> {
    /// Uses `gens` together with their inverses.
    pub fn new(group: G, gens: &[G::Elem]) -> Self {
        let mut s: Vec<G::Elem> = Vec::new();
        for g in gens.iter().cloned().chain(gens.iter().map(|g| group.inv(g))) {
            if !s.contains(&g) && g != group.identity() {
                s.push(g);
            }
        }
        let standard: HashSet<G::Elem> = group.symmetric_generators().into_iter().collect();
        let mine: HashSet<G::Elem> = s.iter().cloned().collect();
        let closed_form = standard == mine && group.word_length(&group.identity()).is_some();
        let mut ball2 = HashMap::new();
        ball2.insert(group.identity(), 0);
        for x in &s {
            ball2.entry(x.clone()).or_insert(1);
        }
        for x in &s {
            for y in &s {
                ball2.entry(group.mul(x, y)).or_insert(2);
            }
        }
        let e = group.identity();
        let memo = Mutex::new((HashMap::from([(e.clone(), 0)]), vec![e], 0));
        WordMetric { group, gens: s, closed_form, ball2, memo }
    }

    pub fn standard(group: G) -> Self {
        let gens = group.generators();
        Self::new(group, &gens)
    }

    pub fn generators(&self) -> &[G::Elem] {
        &self.gens
    }

    /// Word length of `h`, or `WORD_RADIUS_LIMIT + 1` if not found within the limit.
    pub fn length(&self, h: &G::Elem) -> u64 {
        if self.closed_form {
            if let Some(l) = self.group.word_length(h) {
                return l;
            }
        }
        if let Some(&l) = self.ball2.get(h) {
            return l;
        }
        let mut guard = self.memo.lock().expect("word metric memo");
        let (seen, frontier, radius) = &mut *guard;
        loop {
            if let Some(&l) = seen.get(h) {
                return l;
            }
            if *radius >= WORD_RADIUS_LIMIT || frontier.is_empty() {
                return WORD_RADIUS_LIMIT + 1;
            }
            *radius += 1;
            let mut next = Vec::new();
            for x in frontier.iter() {
                for s in &self.gens {
                    let y = self.group.mul(s, x);
                    if !seen.contains_key(&y) {
                        seen.insert(y.clone(), *radius);
                        next.push(y);
                    }
                }
            }
            *frontier = next;
        }
    }
}

impl<G: Group> Metric<G::Elem> for WordMetric<G> {
    fn distance(&self, x: &G::Elem, y: &G::Elem) -> Rational {
        rat_int(self.length(&self.group.mul(x, &self.group.inv(y))) as i64)
    }

    fn capped_distance(&self, x: &G::Elem, y: &G::Elem) -> Rational {
        let h = self.group.mul(x, &self.group.inv(y));
        let l = if self.closed_form {
            self.group.word_length(&h).unwrap_or(2).min(2)
        } else {
            self.ball2.get(&h).copied().unwrap_or(2)
        };
        rat_int(l as i64)
    }

    fn kind(&self) -> String {
        let names: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        if names.iter().any(|n| n.len() > 24) {
            format!("word({} generators)", names.len())
        } else {
            format!("word({})", names.join(" "))
        }
    }

    fn integer_valued(&self) -> bool {
        true
    }

    fn unit_neighbors(&self, x: &G::Elem) -> Option<Vec<G::Elem>> {
        Some(self.gens.iter().map(|s| self.group.mul(s, x)).collect())
    }
}

/// `d(x, y) = sum_i 2^-i [x y^-1 . p_i != p_i]` over base points `p_1..p_K`.
/// A pseudometric: it only separates elements that move some base point.
pub struct DisplacementMetric<A: Action> {
    action: A,
    base: Vec<A::Point>,
}

impl<A: Action> DisplacementMetric<A> {
    pub fn new(action: A, base: Vec<A::Point>) -> Self {
        DisplacementMetric { action, base }
    }

    pub fn base_points(&self) -> &[A::Point] {
        &self.base
    }
}

/// `0, 1, -1, 1/2, -1/2, 2, -2, 1/4`.
pub fn default_line_base_points() -> Vec<crate::Dyadic> {
    ["0", "1", "-1", "1/2^1", "-1/2^1", "2", "-2", "1/2^2"].iter().map(|s| s.parse().unwrap()).collect()
}

impl<A: Action> Metric<<A::G as Group>::Elem> for DisplacementMetric<A> {
    fn distance(&self, x: &<A::G as Group>::Elem, y: &<A::G as Group>::Elem) -> Rational {
        let g = self.action.group();
        let h = g.mul(x, &g.inv(y));
        let mut total = rat(0, 1);
        let mut w = rat(1, 2);
        for p in &self.base {
            let moved = self.action.act(&h, p).map(|q| &q != p).unwrap_or(true);
            if moved {
                total += w.clone();
            }
            w /= rat_int(2);
        }
        total
    }

    fn kind(&self) -> String {
        format!("displacement(K={})", self.base.len())
    }

    fn is_pseudometric(&self) -> bool {
        true
    }
}

/// Explicit distance table; unlisted distinct pairs get `default`.
pub struct TableMetric<P: Ord> {
    table: BTreeMap<(P, P), Rational>,
    default: Rational,
}

impl<P: Ord + Clone> TableMetric<P> {
    pub fn new(entries: Vec<(P, P, Rational)>, default: Rational) -> Self {
        let mut table = BTreeMap::new();
        for (x, y, d) in entries {
            table.insert((x.clone(), y.clone()), d.clone());
            table.insert((y, x), d);
        }
        TableMetric { table, default }
    }
}

impl<P: Ord + Clone + Send + Sync> Metric<P> for TableMetric<P> {
    fn distance(&self, x: &P, y: &P) -> Rational {
        if x == y {
            return rat(0, 1);
        }
        self.table.get(&(x.clone(), y.clone())).cloned().unwrap_or_else(|| self.default.clone())
    }

    fn kind(&self) -> String {
        "table".into()
    }

    fn is_pseudometric(&self) -> bool {
        self.table.values().any(|d| d.numer().sign() == num_bigint::Sign::NoSign)
    }
}

/// `p_d(g mu - mu)`.
pub fn deficiency<G: Group, W: Weight, M: Metric<G::Elem> + ?Sized>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    g: &G::Elem,
    d: &M,
    opts: &FlatNormOptions,
) -> FlatNorm<G::Elem, W> {
    let m = translate(group, g, mu).to_signed().sub(&mu.to_signed());
    flat_norm(&m, d, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow<W> {
    pub n: u64,
    /// Index into the test set.
    pub g: usize,
    pub value: W,
    pub pruning_deficiency: W,
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeficiencyProfile<W> {
    pub elements: Vec<String>,
    pub rows: Vec<ProfileRow<W>>,
    /// Per test element: values non-increasing in `n`.
    pub monotone: Vec<bool>,
    pub metric_kind: String,
    pub pseudometric: bool,
}

impl<W: Weight> DeficiencyProfile<W> {
    pub fn series(&self, g: usize) -> Vec<W> {
        self.rows.iter().filter(|r| r.g == g).map(|r| r.value.clone()).collect()
    }

    /// Sup over the test set for each `n`.
    pub fn sup_series(&self) -> Vec<W> {
        let mut by_n: BTreeMap<u64, W> = BTreeMap::new();
        for r in &self.rows {
            let e = by_n.entry(r.n).or_insert_with(W::zero);
            *e = W::max_of(e.clone(), r.value.clone());
        }
        by_n.into_values().collect()
    }
}

/// `p_d(g mu^n - mu^n)` for `n = 1..=n_max` and every `g` in `es`.
#[allow(clippy::too_many_arguments)]
pub fn deficiency_profile<G: Group, W: Weight, M: Metric<G::Elem> + ?Sized>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    es: &[G::Elem],
    n_max: u64,
    d: &M,
    prune: W,
    opts: &FlatNormOptions,
    workers: usize,
) -> DeficiencyProfile<W> {
    deficiency_profile_capped(group, mu, es, n_max, d, prune, opts, usize::MAX, workers).expect("no cap")
}

/// [`deficiency_profile`] that gives up once a power's support exceeds `cap`.
#[allow(clippy::too_many_arguments)]
pub fn deficiency_profile_capped<G: Group, W: Weight, M: Metric<G::Elem> + ?Sized>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    es: &[G::Elem],
    n_max: u64,
    d: &M,
    prune: W,
    opts: &FlatNormOptions,
    cap: usize,
    workers: usize,
) -> Result<DeficiencyProfile<W>, MeasureError> {
    let mut rows = Vec::new();
    for item in capped_powers(group, mu, n_max, prune, cap, workers) {
        let (n, pow) = item?;
        let vals = par_map(es, workers, |g| deficiency(group, &pow, g, d, opts));
        for (gi, v) in vals.into_iter().enumerate() {
            rows.push(ProfileRow {
                n,
                g: gi,
                value: v.value,
                pruning_deficiency: pow.deficiency().clone(),
                backend: v.backend,
            });
        }
    }
    let monotone = (0..es.len())
        .map(|gi| {
            let s: Vec<&W> = rows.iter().filter(|r| r.g == gi).map(|r| &r.value).collect();
            s.windows(2).all(|w| W::le_tol(w[1], w[0]))
        })
        .collect();
    Ok(DeficiencyProfile {
        elements: es.iter().map(|g| g.to_string()).collect(),
        rows,
        monotone,
        metric_kind: d.kind(),
        pseudometric: d.is_pseudometric(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport<W> {
    /// `p_d(m nu)`.
    pub convolved: W,
    /// `p_d(m)`.
    pub original: W,
    pub holds: bool,
}

/// Checks `p_d(m nu) <= p_d(m)`.
pub fn contraction_check<G: Group, W: Weight, M: Metric<G::Elem> + ?Sized>(
    group: &G,
    m: &SignedFinMeasure<G::Elem, W>,
    nu: &FinMeasure<G::Elem, W>,
    d: &M,
    opts: &FlatNormOptions,
) -> ContractionReport<W> {
    let lhs = flat_norm(&convolve_signed(group, m, nu), d, opts).value;
    let rhs = flat_norm(m, d, opts).value;
    let holds = W::le_tol(&lhs, &rhs);
    ContractionReport { convolved: lhs, original: rhs, holds }
}
