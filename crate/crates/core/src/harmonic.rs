//! Transfer operators, harmonicity residuals, iterated averaging, Lipschitz
//! test functions, Liouville scans and Monte Carlo estimators.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::actions::{Action, ActionError};
use crate::groups::{FreeGroup, FreeWord, Group};
use crate::measures::{capped_powers, mixture, pushforward_inverse, ConvolutionPowers, FinMeasure, MeasureError};
use crate::metric::Metric;
use crate::parallel::par_map;
use crate::weight::{Rational, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarmonicError {
    #[error("anchor value {value} exceeds the cap {cap}")]
    AnchorAboveCap { value: String, cap: String },
    #[error("anchors {a} and {b} are not {lip}-Lipschitz within slack {slack}")]
    Incompatible { a: String, b: String, lip: String, slack: String },
    #[error("no anchors")]
    NoAnchors,
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// `F(x) = min(inf_s (v_s + l d(s, x)), r)`.
pub struct TestFunction<P, M> {
    anchors: Vec<(P, Rational)>,
    lip: Rational,
    cap: Rational,
    metric: M,
}

impl<P: Clone, M: Metric<P>> TestFunction<P, M> {
    pub fn anchors(&self) -> &[(P, Rational)] {
        &self.anchors
    }

    pub fn lipschitz(&self) -> &Rational {
        &self.lip
    }

    pub fn cap(&self) -> &Rational {
        &self.cap
    }

    pub fn eval(&self, x: &P) -> Rational {
        let inf = self
            .anchors
            .iter()
            .map(|(s, v)| v + &self.lip * self.metric.distance(s, x))
            .min()
            .expect("anchors are non-empty");
        inf.min(self.cap.clone())
    }

    pub fn eval_w<W: Weight>(&self, x: &P) -> W {
        W::from_rational(&self.eval(x))
    }
}

/// Builds the McShane extension; anchors must be `l`-compatible up to `slack`.
pub fn mcshane_extend<P: Clone + std::fmt::Display, M: Metric<P>>(
    anchors: Vec<(P, Rational)>,
    lip: Rational,
    cap: Rational,
    metric: M,
    slack: &Rational,
) -> Result<TestFunction<P, M>, HarmonicError> {
    if anchors.is_empty() {
        return Err(HarmonicError::NoAnchors);
    }
    for (_, v) in &anchors {
        if num_traits::Signed::abs(v) > cap {
            return Err(HarmonicError::AnchorAboveCap { value: v.to_string(), cap: cap.to_string() });
        }
    }
    for (i, (s, vs)) in anchors.iter().enumerate() {
        for (t, vt) in &anchors[i + 1..] {
            let gap = num_traits::Signed::abs(&(vs - vt));
            if gap > &lip * metric.distance(s, t) + slack {
                return Err(HarmonicError::Incompatible {
                    a: s.to_string(),
                    b: t.to_string(),
                    lip: lip.to_string(),
                    slack: slack.to_string(),
                });
            }
        }
    }
    Ok(TestFunction { anchors, lip, cap, metric })
}

/// `Phi_mu f (g) = sum_s mu(s) f(g s)`.
pub fn transfer_on_group<G: Group, W: Weight, F: Fn(&G::Elem) -> W + ?Sized>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    f: &F,
    g: &G::Elem,
) -> W {
    mu.iter().fold(W::zero(), |acc, (s, w)| acc + w.clone() * f(&group.mul(g, s)))
}

/// `P_mu f (x) = sum_g mu(g) f(g . x)`.
pub fn transfer_on_action<A: Action, W: Weight, F: Fn(&A::Point) -> W + ?Sized>(
    action: &A,
    mu: &FinMeasure<<A::G as Group>::Elem, W>,
    f: &F,
    x: &A::Point,
) -> Result<W, ActionError> {
    let mut acc = W::zero();
    for (g, w) in mu.iter() {
        acc = acc + w.clone() * f(&action.act(g, x)?);
    }
    Ok(acc)
}

/// `g -> f(g^-1 . x)`.
pub fn restrict_to_orbit<'a, A: Action, W, F: Fn(&A::Point) -> W + ?Sized>(
    action: &'a A,
    f: &'a F,
    x: &'a A::Point,
) -> impl Fn(&<A::G as Group>::Elem) -> Result<W, ActionError> + 'a {
    move |g| {
        let h = action.group().inv(g);
        Ok(f(&action.act(&h, x)?))
    }
}

/// `max_x |f(x) - P_mu f(x)|` over the sample.
pub fn harmonic_residual_action<A: Action, W: Weight, F: Fn(&A::Point) -> W + ?Sized>(
    action: &A,
    mu: &FinMeasure<<A::G as Group>::Elem, W>,
    f: &F,
    sample: &[A::Point],
) -> Result<W, ActionError> {
    let mut worst = W::zero();
    for x in sample {
        let r = (f(x) - transfer_on_action(action, mu, f, x)?).abs();
        worst = W::max_of(worst, r);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRow<W> {
    pub h: String,
    /// `|f|x(h) - Phi_{mu*}(f|x)(h)|`.
    pub group_side: W,
    /// `|f(h^-1 x) - P_mu f(h^-1 x)|`.
    pub action_side: W,
    pub equal: bool,
}

/// Compares the residual of `f` restricted to the orbit of `x` under the
/// reflected measure with the residual of `f` itself at `h^-1 x`.
pub fn harmonic_transfer_check<A: Action, W: Weight, F: Fn(&A::Point) -> W + ?Sized>(
    action: &A,
    mu: &FinMeasure<<A::G as Group>::Elem, W>,
    f: &F,
    x: &A::Point,
    hs: &[<A::G as Group>::Elem],
) -> Result<Vec<TransferRow<W>>, ActionError> {
    let group = action.group();
    let star = pushforward_inverse(group, mu);
    let restricted = restrict_to_orbit(action, f, x);
    let mut rows = Vec::new();
    for h in hs {
        let mut avg = W::zero();
        for (s, w) in star.iter() {
            avg = avg + w.clone() * restricted(&group.mul(h, s))?;
        }
        let group_side = (restricted(h)? - avg).abs();
        let y = action.act(&group.inv(h), x)?;
        let action_side = (f(&y) - transfer_on_action(action, mu, f, &y)?).abs();
        let equal = W::eq_tol(&group_side, &action_side);
        rows.push(TransferRow { h: h.to_string(), group_side, action_side, equal });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiRow<W> {
    pub n: u64,
    pub point: usize,
    pub value: W,
    pub pruning_deficiency: W,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiReport<W> {
    pub points: Vec<String>,
    pub rows: Vec<PiRow<W>>,
    /// `n` at which the final run of steps moving by at most `tol` reached three.
    pub converged_at: Vec<Option<u64>>,
    pub tol: W,
}

impl<W: Weight> PiReport<W> {
    pub fn series(&self, point: usize) -> Vec<W> {
        self.rows.iter().filter(|r| r.point == point).map(|r| r.value.clone()).collect()
    }

    pub fn last(&self, point: usize) -> Option<W> {
        self.series(point).pop()
    }
}

/// `Phi_{mu^n} f (g)` for `n = 1..=n_max` at each point.
#[allow(clippy::too_many_arguments)]
pub fn iterate_pi<G: Group, W: Weight, F: Fn(&G::Elem) -> W + Sync + ?Sized>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    f: &F,
    points: &[G::Elem],
    n_max: u64,
    tol: W,
    prune: W,
    workers: usize,
) -> PiReport<W> {
    iterate_pi_capped(group, mu, f, points, n_max, tol, prune, usize::MAX, workers).expect("no cap")
}

/// [`iterate_pi`] that gives up once a power's support exceeds `cap`.
#[allow(clippy::too_many_arguments)]
pub fn iterate_pi_capped<G: Group, W: Weight, F: Fn(&G::Elem) -> W + Sync + ?Sized>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    f: &F,
    points: &[G::Elem],
    n_max: u64,
    tol: W,
    prune: W,
    cap: usize,
    workers: usize,
) -> Result<PiReport<W>, MeasureError> {
    let mut rows = Vec::new();
    let mut prev: Vec<W> = points.iter().map(f).collect();
    let mut streak = vec![0u32; points.len()];
    let mut converged_at = vec![None; points.len()];
    for item in capped_powers(group, mu, n_max, prune, cap, workers) {
        let (n, pow) = item?;
        let vals = par_map(points, workers, |g| transfer_on_group(group, &pow, f, g));
        for (i, v) in vals.into_iter().enumerate() {
            if W::le_tol(&(v.clone() - prev[i].clone()).abs(), &tol) {
                streak[i] += 1;
            } else {
                streak[i] = 0;
                converged_at[i] = None;
            }
            if streak[i] >= 3 && converged_at[i].is_none() {
                converged_at[i] = Some(n);
            }
            prev[i] = v.clone();
            rows.push(PiRow { n, point: i, value: v, pruning_deficiency: pow.deficiency().clone() });
        }
    }
    Ok(PiReport { points: points.iter().map(|g| g.to_string()).collect(), rows, converged_at, tol })
}

/// `iterate_pi` of the pointwise product `f1 f2`.
#[allow(clippy::too_many_arguments)]
pub fn poisson_product<G, W, F1, F2>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    f1: &F1,
    f2: &F2,
    points: &[G::Elem],
    n_max: u64,
    tol: W,
    prune: W,
    workers: usize,
) -> PiReport<W>
where
    G: Group,
    W: Weight,
    F1: Fn(&G::Elem) -> W + Sync + ?Sized,
    F2: Fn(&G::Elem) -> W + Sync + ?Sized,
{
    let prod = |g: &G::Elem| f1(g) * f2(g);
    iterate_pi(group, mu, &prod, points, n_max, tol, prune, workers)
}

/// `(1/n) sum_{k=1..n} mu^k`.
pub fn cesaro_average<G: Group, W: Weight>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    n: u64,
    prune: W,
    workers: usize,
) -> Result<FinMeasure<G::Elem, W>, MeasureError> {
    if n == 0 {
        return Err(MeasureError::ZeroPower);
    }
    let parts: Vec<_> = ConvolutionPowers::new(group, mu, prune, workers).take(n as usize).map(|(_, m)| m).collect();
    let w = W::from_ratio(1, n as i64);
    mixture(&vec![w; parts.len()], &parts)
}

/// Streaming mean and variance; merges are order-sensitive only in rounding.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Welford) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *o;
            return;
        }
        let n = (self.count + o.count) as f64;
        let d = o.mean - self.mean;
        self.mean += d * o.count as f64 / n;
        self.m2 += o.m2 + d * d * self.count as f64 * o.count as f64 / n;
        self.count += o.count;
    }

    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for trial `index`: ChaCha8 seeded with `splitmix64(master ^ splitmix64(index))`.
pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master ^ splitmix64(index)))
}

/// Trials per deterministic work unit.
pub const TRIAL_CHUNK: u64 = 256;

/// Draws from the normalized measure.
#[derive(Debug, Clone)]
pub struct StepSampler<E> {
    atoms: Vec<E>,
    cumulative: Vec<f64>,
    /// Missing mass of the underlying measure.
    pub missing_mass: f64,
}

impl<E: Clone> StepSampler<E> {
    pub fn new<W: Weight>(mu: &FinMeasure<E, W>) -> Self
    where
        E: Ord,
    {
        let total: f64 = mu.iter().map(|(_, w)| w.to_f64()).sum();
        let mut acc = 0.0;
        let mut atoms = Vec::with_capacity(mu.len());
        let mut cumulative = Vec::with_capacity(mu.len());
        for (p, w) in mu.iter() {
            acc += w.to_f64() / total;
            atoms.push(p.clone());
            cumulative.push(acc);
        }
        StepSampler { atoms, cumulative, missing_mass: mu.deficiency().to_f64() }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> &E {
        let u: f64 = rng.gen();
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
        &self.atoms[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig<E: Ord, W> {
    pub step: FinMeasure<E, W>,
    pub length: u64,
    pub trials: u64,
    pub seed: u64,
}

/// Path `g_0 = start, g_k = g_{k-1} s_k` for one trial.
pub fn sample_walk<G: Group, W: Weight>(
    group: &G,
    cfg: &WalkConfig<G::Elem, W>,
    start: &G::Elem,
    trial: u64,
) -> Vec<G::Elem> {
    let sampler = StepSampler::new(&cfg.step);
    let mut rng = trial_rng(cfg.seed, trial);
    let mut path = Vec::with_capacity(cfg.length as usize + 1);
    path.push(start.clone());
    for _ in 0..cfg.length {
        let s = sampler.sample(&mut rng);
        let next = group.mul(path.last().expect("non-empty"), s);
        path.push(next);
    }
    path
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    /// Bound on the bias from sampling the normalized truncation.
    pub bias_bound: f64,
}

impl Estimate {
    fn from_welford(w: &Welford, bias_bound: f64) -> Self {
        Estimate { mean: w.mean, stderr: w.stderr(), trials: w.count, bias_bound }
    }
}

/// Monte Carlo estimate of `Phi_{mu^n} f (g)`.
pub fn empirical_transfer<G: Group, W: Weight, F: Fn(&G::Elem) -> f64 + Sync + ?Sized>(
    group: &G,
    cfg: &WalkConfig<G::Elem, W>,
    f: &F,
    g: &G::Elem,
    workers: usize,
) -> Estimate {
    let sampler = StepSampler::new(&cfg.step);
    let chunks: Vec<u64> = (0..cfg.trials.div_ceil(TRIAL_CHUNK)).collect();
    let parts = par_map(&chunks, workers, |&c| {
        let mut acc = Welford::default();
        for t in c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(cfg.trials) {
            let mut rng = trial_rng(cfg.seed, t);
            let mut x = g.clone();
            for _ in 0..cfg.length {
                x = group.mul(&x, sampler.sample(&mut rng));
            }
            acc.push(f(&x));
        }
        acc
    });
    let mut total = Welford::default();
    for p in &parts {
        total.merge(p);
    }
    let sup = 1.0;
    Estimate::from_welford(&total, 2.0 * cfg.length as f64 * sampler.missing_mass * sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    Exact,
    MonteCarlo,
}

impl ScanMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanMethod::Exact => "exact",
            ScanMethod::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanValues<W> {
    Exact(Vec<W>),
    Estimated(Vec<Estimate>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow<W> {
    pub n: u64,
    pub function: usize,
    pub values: ScanValues<W>,
    /// Exact oscillation, when available.
    pub oscillation: Option<W>,
    pub oscillation_f64: f64,
}

impl<W: Weight> ScanRow<W> {
    pub fn method(&self) -> ScanMethod {
        match self.values {
            ScanValues::Exact(_) => ScanMethod::Exact,
            ScanValues::Estimated(_) => ScanMethod::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleScan<W> {
    pub sample: Vec<String>,
    pub rows: Vec<ScanRow<W>>,
    /// Largest `n` computed exactly.
    pub exact_depth: u64,
    pub functions: usize,
}

impl<W: Weight> LiouvilleScan<W> {
    pub fn oscillations(&self, function: usize) -> Vec<f64> {
        self.rows.iter().filter(|r| r.function == function).map(|r| r.oscillation_f64).collect()
    }

    pub fn exact_oscillations(&self, function: usize) -> Vec<W> {
        self.rows.iter().filter(|r| r.function == function).filter_map(|r| r.oscillation.clone()).collect()
    }

    /// Exact rows never increase.
    pub fn exact_monotone(&self, function: usize) -> bool {
        self.exact_oscillations(function).windows(2).all(|w| W::le_tol(&w[1], &w[0]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub n_max: u64,
    /// Largest region held for exact iteration.
    pub domain_cap: usize,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { n_max: 20, domain_cap: 200_000, trials: 4096, seed: 0, workers: 1 }
    }
}

pub type PointFn<'a, P, W> = &'a (dyn Fn(&P) -> W + Sync);

/// Oscillation `max - min` of `P_mu^n f` over the sample for `n = 0..=n_max`.
/// Exact while the `n`-step region fits in `domain_cap`, Monte Carlo beyond.
pub fn liouville_scan<A: Action, W: Weight>(
    action: &A,
    mu: &FinMeasure<<A::G as Group>::Elem, W>,
    family: &[PointFn<'_, A::Point, W>],
    sample: &[A::Point],
    opts: &ScanOptions,
) -> Result<LiouvilleScan<W>, ActionError> {
    let gens: Vec<_> = mu.support();
    // Layered region: layer k holds points first reached after k steps.
    let mut index: HashMap<A::Point, usize> = HashMap::new();
    let mut pts: Vec<A::Point> = Vec::new();
    let mut layer_end: Vec<usize> = Vec::new();
    for x in sample {
        if !index.contains_key(x) {
            index.insert(x.clone(), pts.len());
            pts.push(x.clone());
        }
    }
    layer_end.push(pts.len());
    let mut nbrs: Vec<Vec<usize>> = Vec::new();
    let mut depth = 0u64;
    while depth < opts.n_max {
        let start = nbrs.len();
        let end = *layer_end.last().expect("layer");
        let mut grown = pts.len();
        let mut new_nbrs = Vec::with_capacity(end - start);
        let mut overflow = false;
        for i in start..end {
            let mut row = Vec::with_capacity(gens.len());
            for g in &gens {
                let y = action.act(g, &pts[i])?;
                let j = match index.get(&y) {
                    Some(&j) => j,
                    None => {
                        index.insert(y.clone(), pts.len());
                        pts.push(y);
                        grown += 1;
                        pts.len() - 1
                    }
                };
                row.push(j);
            }
            new_nbrs.push(row);
            if grown > opts.domain_cap {
                overflow = true;
                break;
            }
        }
        if overflow {
            pts.truncate(end);
            break;
        }
        nbrs.extend(new_nbrs);
        layer_end.push(pts.len());
        depth += 1;
    }
    let exact_depth = depth;
    let wrefs: Vec<&W> = gens.iter().map(|g| mu.get(g).expect("support atom")).collect();
    let (mlin, q) = W::linearize(&wrefs);
    let ns = index_len(sample, &index);
    let mut rows = Vec::new();
    for (fi, f) in family.iter().enumerate() {
        let total = layer_end[exact_depth as usize];
        let vals: Vec<W> = pts[..total].iter().map(f).collect();
        let refs: Vec<&W> = vals.iter().collect();
        let (mut cur, mut den) = W::linearize(&refs);
        for n in 0..=exact_depth {
            let vals: Vec<W> = ns.iter().map(|&i| W::delinearize(cur[i].clone(), &den)).collect();
            rows.push(exact_row(n, fi, vals));
            if n == exact_depth {
                break;
            }
            let live = layer_end[(exact_depth - n - 1) as usize];
            let mut next = Vec::with_capacity(live);
            for row in &nbrs[..live] {
                let mut acc = W::lin_zero();
                for (k, &j) in row.iter().enumerate() {
                    W::lin_fma(&mut acc, &mlin[k], &cur[j]);
                }
                next.push(acc);
            }
            cur = next;
            let mut d = W::lin_zero();
            W::lin_fma(&mut d, &den, &q);
            den = d;
        }
    }
    if exact_depth < opts.n_max {
        let mc = monte_carlo_scan(action, mu, family, sample, exact_depth + 1, opts)?;
        rows.extend(mc);
        rows.sort_by_key(|r| (r.function, r.n));
    }
    Ok(LiouvilleScan {
        sample: sample.iter().map(|p| p.to_string()).collect(),
        rows,
        exact_depth,
        functions: family.len(),
    })
}

fn index_len<P: std::hash::Hash + Eq>(sample: &[P], index: &HashMap<P, usize>) -> Vec<usize> {
    sample.iter().map(|p| index[p]).collect()
}

fn exact_row<W: Weight>(n: u64, function: usize, vals: Vec<W>) -> ScanRow<W> {
    let osc = oscillation(&vals);
    ScanRow { n, function, oscillation_f64: osc.to_f64(), oscillation: Some(osc), values: ScanValues::Exact(vals) }
}

pub fn oscillation<W: Weight>(vals: &[W]) -> W {
    let mut it = vals.iter();
    let Some(first) = it.next() else { return W::zero() };
    let (mut lo, mut hi) = (first.clone(), first.clone());
    for v in it {
        lo = W::min_of(lo, v.clone());
        hi = W::max_of(hi, v.clone());
    }
    hi - lo
}

fn monte_carlo_scan<A: Action, W: Weight>(
    action: &A,
    mu: &FinMeasure<<A::G as Group>::Elem, W>,
    family: &[PointFn<'_, A::Point, W>],
    sample: &[A::Point],
    n_from: u64,
    opts: &ScanOptions,
) -> Result<Vec<ScanRow<W>>, ActionError> {
    let sampler = StepSampler::new(mu);
    let steps = opts.n_max as usize;
    let slots = |n: usize, p: usize, f: usize| (n * sample.len() + p) * family.len() + f;
    let chunks: Vec<u64> = (0..opts.trials.div_ceil(TRIAL_CHUNK)).collect();
    let parts = par_map(&chunks, opts.workers, |&c| -> Result<Vec<Welford>, ActionError> {
        let mut acc = vec![Welford::default(); (steps + 1) * sample.len() * family.len()];
        for t in c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(opts.trials) {
            let mut rng = trial_rng(opts.seed, t);
            let incs: Vec<_> = (0..steps).map(|_| sampler.sample(&mut rng).clone()).collect();
            for (pi, x0) in sample.iter().enumerate() {
                let mut x = x0.clone();
                for (k, g) in incs.iter().enumerate() {
                    x = action.act(g, &x)?;
                    if (k + 1) as u64 >= n_from {
                        for (fi, f) in family.iter().enumerate() {
                            acc[slots(k + 1, pi, fi)].push(f(&x).to_f64());
                        }
                    }
                }
            }
        }
        Ok(acc)
    });
    let mut total = vec![Welford::default(); (steps + 1) * sample.len() * family.len()];
    for p in parts {
        for (t, w) in total.iter_mut().zip(p?.iter()) {
            t.merge(w);
        }
    }
    let mut rows = Vec::new();
    for fi in 0..family.len() {
        for n in n_from..=opts.n_max {
            let ests: Vec<Estimate> = (0..sample.len())
                .map(|pi| {
                    let bias = 2.0 * n as f64 * sampler.missing_mass;
                    Estimate::from_welford(&total[slots(n as usize, pi, fi)], bias)
                })
                .collect();
            let hi = ests.iter().map(|e| e.mean).fold(f64::NEG_INFINITY, f64::max);
            let lo = ests.iter().map(|e| e.mean).fold(f64::INFINITY, f64::min);
            rows.push(ScanRow {
                n,
                function: fi,
                values: ScanValues::Estimated(ests),
                oscillation: None,
                oscillation_f64: hi - lo,
            });
        }
    }
    Ok(rows)
}

/// `F_w(x) = min(-1 + |x| / w, 1)` on the integers: single anchor `(0, -1)`, slope `1/w`.
pub fn valley(w: i64) -> impl Fn(i64) -> Rational + Sync {
    move |x: i64| {
        let v = Rational::new(BigInt::from(x.abs() - w), BigInt::from(w));
        v.min(Rational::one())
    }
}

/// `min(1, max(-1, x))`.
pub fn clamped_identity(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x.clamp(-1, 1)))
}

/// Exact `Phi_{mu^n} f` on a free group for `mu` uniform on the symmetric
/// generators and `f` the indicator that the reduced word starts with `letter`.
/// Rows are `n = 0..=n_max`, columns follow `sample`.
pub fn free_first_letter_profile(group: &FreeGroup, letter: i8, sample: &[FreeWord], n_max: u64) -> Vec<Vec<Rational>> {
    let r = group.rank() as i64;
    let deg = 2 * r;
    let letters: Vec<i8> = (1..=r as i8).flat_map(|l| [l, -l]).collect();
    let branch = BigInt::from(deg - 1);
    let sphere = |l: usize| -> BigInt {
        if l == 0 {
            BigInt::one()
        } else {
            BigInt::from(deg) * num_traits::pow(branch.clone(), l - 1)
        }
    };
    // Words w of length l with x w reduced starting with `letter`.
    let count = |l: usize, x: &[i8]| -> BigInt {
        let k = x.len();
        let mut tot = BigInt::zero();
        for j in 0..=k.min(l) {
            let rest = l - j;
            let allowed =
                letters.iter().filter(|&&c| !(j < k && c == -x[k - j - 1]) && !(j >= 1 && c == x[k - j])).count();
            if rest == 0 {
                if k > j && x[0] == letter {
                    tot += 1;
                }
            } else {
                let tail = num_traits::pow(branch.clone(), rest - 1);
                if k > j {
                    if x[0] == letter {
                        tot += BigInt::from(allowed) * tail;
                    }
                } else {
                    let ok = letters
                        .iter()
                        .any(|&c| c == letter && !(j < k && c == -x[k - j - 1]) && !(j >= 1 && c == x[k - j]));
                    if ok {
                        tot += tail;
                    }
                }
            }
        }
        tot
    };
    let up = Rational::new(BigInt::from(deg - 1), BigInt::from(deg));
    let down = Rational::new(BigInt::one(), BigInt::from(deg));
    let mut radial: Vec<Rational> = vec![Rational::one()];
    let mut out = Vec::new();
    for n in 0..=n_max {
        if n > 0 {
            let mut next = vec![Rational::zero(); radial.len() + 1];
            for (l, p) in radial.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                if l == 0 {
                    next[1] += p;
                } else {
                    next[l + 1] += p * &up;
                    next[l - 1] += p * &down;
                }
            }
            radial = next;
        }
        let row = sample
            .iter()
            .map(|x| {
                radial
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(l, p)| p * Rational::new(count(l, x.letters()), sphere(l)))
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect();
        out.push(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{CappedAbs, SelfAction};
    use crate::groups::{LatticeGroup, LatticePoint};
    use crate::measures::convolution_power;
    use crate::weight::rat;

    fn z(n: i64) -> LatticePoint {
        LatticeGroup::int(n)
    }

    fn lazy() -> FinMeasure<LatticePoint, Rational> {
        FinMeasure::from_atoms([(z(-1), rat(1, 4)), (z(0), rat(1, 2)), (z(1), rat(1, 4))]).unwrap()
    }

    struct IntAbs;
    impl Metric<i64> for IntAbs {
        fn distance(&self, x: &i64, y: &i64) -> Rational {
            rat((x - y).abs(), 1)
        }
        fn kind(&self) -> String {
            "abs".into()
        }
    }

    #[test]
    fn mcshane_examples() {
        let f =
            mcshane_extend(vec![(0i64, rat(0, 1)), (2, rat(1, 1))], rat(1, 1), rat(1, 1), IntAbs, &rat(0, 1)).unwrap();
        assert_eq!(f.eval(&1), rat(1, 1));
        assert_eq!(f.eval(&0), rat(0, 1));
        assert_eq!(f.eval(&2), rat(1, 1));
        let g = mcshane_extend(vec![(3i64, rat(-1, 2))], rat(1, 4), rat(1, 1), IntAbs, &rat(0, 1)).unwrap();
        assert_eq!(g.eval(&5), rat(0, 1));
        assert_eq!(g.eval(&100), rat(1, 1));
        let bad = mcshane_extend(vec![(0i64, rat(-1, 1)), (1, rat(1, 1))], rat(1, 1), rat(1, 1), IntAbs, &rat(0, 1));
        assert!(matches!(bad, Err(HarmonicError::Incompatible { .. })));
        assert!(
            mcshane_extend(vec![(0i64, rat(-1, 1)), (1, rat(1, 1))], rat(1, 1), rat(1, 1), IntAbs, &rat(1, 1)).is_ok()
        );
        let valley3 = mcshane_extend(vec![(0i64, rat(-1, 1))], rat(1, 3), rat(1, 1), IntAbs, &rat(0, 1)).unwrap();
        let v = valley(3);
        for x in -10..=10 {
            assert_eq!(valley3.eval(&x), v(x));
        }
    }

    #[test]
    fn transfer_examples() {
        let zg = LatticeGroup::new(1);
        let f = |p: &LatticePoint| rat(p.0[0] * p.0[0], 1);
        assert_eq!(transfer_on_group(&zg, &FinMeasure::dirac(z(2)), &f, &z(1)), rat(9, 1));
        assert_eq!(transfer_on_group(&zg, &lazy(), &|_: &LatticePoint| rat(3, 7), &z(5)), rat(3, 7));
        assert_eq!(transfer_on_group(&zg, &lazy(), &f, &z(2)), rat(9 + 2 * 4 + 1, 4));
        let act = SelfAction::new(zg.clone());
        let srw: FinMeasure<_, Rational> = FinMeasure::uniform([z(1), z(-1)]).unwrap();
        let id = |p: &LatticePoint| rat(p.0[0], 1);
        let sample: Vec<_> = (-5..=5).map(z).collect();
        assert_eq!(harmonic_residual_action(&act, &srw, &id, &sample).unwrap(), rat(0, 1));
        let sq = |p: &LatticePoint| rat(p.0[0] * p.0[0], 1);
        assert_eq!(harmonic_residual_action(&act, &srw, &sq, &sample).unwrap(), rat(1, 1));
        let restricted = restrict_to_orbit(&act, &id, &sample[7]);
        assert_eq!(restricted(&z(0)).unwrap(), rat(2, 1));
        assert_eq!(restricted(&z(5)).unwrap(), rat(-3, 1));
    }

    #[test]
    fn transfer_check_identity() {
        let zg = LatticeGroup::new(1);
        let act = SelfAction::new(zg.clone());
        let mu: FinMeasure<_, Rational> =
            FinMeasure::from_atoms([(z(2), rat(1, 3)), (z(-1), rat(1, 2)), (z(0), rat(1, 6))]).unwrap();
        let f = |p: &LatticePoint| rat(p.0[0].pow(3) % 7, 5);
        let rows = harmonic_transfer_check(&act, &mu, &f, &z(3), &[z(0), z(4), z(-2)]).unwrap();
        assert!(rows.iter().all(|r| r.equal));
        assert!(rows.iter().any(|r| r.group_side > rat(0, 1)));
    }

    #[test]
    fn pi_examples() {
        let zg = LatticeGroup::new(1);
        let pts = [z(0), z(3)];
        let c = iterate_pi(&zg, &lazy(), &|_: &LatticePoint| rat(2, 3), &pts, 5, rat(0, 1), rat(0, 1), 1);
        assert_eq!(c.converged_at, vec![Some(3), Some(3)]);
        let lin = |p: &LatticePoint| rat(p.0[0], 1);
        let h = iterate_pi(&zg, &lazy(), &lin, &pts, 6, rat(0, 1), rat(0, 1), 1);
        assert_eq!(h.series(1), vec![rat(3, 1); 6]);
        let one = |_: &LatticePoint| rat(1, 1);
        let p = poisson_product(&zg, &lazy(), &one, &one, &pts, 4, rat(0, 1), rat(0, 1), 1);
        assert!(p.rows.iter().all(|r| r.value == rat(1, 1)));
    }

    #[test]
    fn cesaro() {
        let zg = LatticeGroup::new(1);
        let c = cesaro_average(&zg, &lazy(), 2, rat(0, 1), 1).unwrap();
        assert_eq!(c.total_mass(), rat(1, 1));
        assert_eq!(c.get(&z(0)).cloned(), Some(rat(1, 2) * rat(1, 2) + rat(1, 2) * rat(3, 8)));
    }

    #[test]
    fn scan_matches_exact_powers() {
        let zg = LatticeGroup::new(1);
        let act = SelfAction::new(zg.clone());
        let v = valley(2);
        let f = move |p: &LatticePoint| v(p.0[0]);
        let sample: Vec<_> = (-3..=3).map(z).collect();
        let scan =
            liouville_scan(&act, &lazy(), &[&f], &sample, &ScanOptions { n_max: 6, ..Default::default() }).unwrap();
        assert_eq!(scan.exact_depth, 6);
        for n in 1..=6u64 {
            let pow = convolution_power(&zg, &lazy(), n, rat(0, 1), 1).unwrap();
            let want: Vec<Rational> = sample.iter().map(|x| transfer_on_group(&zg, &pow, &f, x)).collect();
            let row = &scan.rows[n as usize];
            assert_eq!(row.values, ScanValues::Exact(want));
        }
        assert!(scan.exact_monotone(0));
        let _ = CappedAbs;
    }

    #[test]
    fn scan_falls_back_to_monte_carlo() {
        let zg = LatticeGroup::new(1);
        let act = SelfAction::new(zg.clone());
        let f = |p: &LatticePoint| clamped_identity(p.0[0]);
        let sample: Vec<_> = (-2..=2).map(z).collect();
        let opts = ScanOptions { n_max: 8, domain_cap: 12, trials: 600, seed: 7, workers: 3 };
        let a = liouville_scan(&act, &lazy(), &[&f], &sample, &opts).unwrap();
        assert_eq!(a.exact_depth, 3);
        assert_eq!(a.rows.len(), 9);
        assert_eq!(a.rows[8].method(), ScanMethod::MonteCarlo);
        let b = liouville_scan(&act, &lazy(), &[&f], &sample, &ScanOptions { workers: 1, ..opts }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn walks_are_deterministic() {
        let zg = LatticeGroup::new(1);
        let cfg = WalkConfig { step: FinMeasure::<_, Rational>::dirac(z(2)), length: 5, trials: 10, seed: 1 };
        assert_eq!(sample_walk(&zg, &cfg, &z(1), 0).last(), Some(&z(11)));
        let cfg = WalkConfig { step: lazy(), length: 20, trials: 1000, seed: 99 };
        assert_eq!(sample_walk(&zg, &cfg, &z(0), 3), sample_walk(&zg, &cfg, &z(0), 3));
        let f = |p: &LatticePoint| p.0[0] as f64;
        let e1 = empirical_transfer(&zg, &cfg, &f, &z(0), 1);
        let e4 = empirical_transfer(&zg, &cfg, &f, &z(0), 4);
        assert_eq!(e1, e4);
        assert_eq!(e1.trials, 1000);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut one = Welford::default();
        xs.iter().for_each(|&x| one.push(x));
        let mut a = Welford::default();
        let mut b = Welford::default();
        xs[..333].iter().for_each(|&x| a.push(x));
        xs[333..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean - one.mean).abs() < 1e-12);
        assert!((a.m2 - one.m2).abs() < 1e-8);
    }

    #[test]
    fn free_profile_matches_convolution() {
        let f2 = FreeGroup::new(2);
        let mu: FinMeasure<_, Rational> = FinMeasure::uniform(f2.symmetric_generators()).unwrap();
        let sample: Vec<FreeWord> = ["", "a", "A", "b", "B", "ab", "Ba"].iter().map(|s| f2.word(s)).collect();
        let prof = free_first_letter_profile(&f2, 1, &sample, 5);
        let ind = |w: &FreeWord| if w.first() == Some(1) { rat(1, 1) } else { rat(0, 1) };
        for (i, x) in sample.iter().enumerate() {
            assert_eq!(prof[0][i], ind(x));
        }
        for n in 1..=5u64 {
            let pow = convolution_power(&f2, &mu, n, rat(0, 1), 1).unwrap();
            for (i, x) in sample.iter().enumerate() {
                assert_eq!(prof[n as usize][i], transfer_on_group(&f2, &pow, &ind, x), "n={n} x={x}");
            }
        }
        assert_eq!(prof[1][0], rat(1, 4));
        let osc: Vec<Rational> = prof.iter().map(|r| oscillation(&r[..5])).collect();
        assert_eq!(osc[1], rat(3, 4));
        assert_eq!(osc[3], rat(45, 64));
    }
}
