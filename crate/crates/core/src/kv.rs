//! Recursive mixture construction `mu = sum_m tau_m alpha_m` with a pluggable
//! Folner oracle, and numeric checks of its three claims on the truncation.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::dual_norm::{deficiency, deficiency_profile, Backend, DeficiencyProfile, FlatNormOptions};
use crate::groups::{Group, LatticeGroup, LatticePoint};
use crate::measures::{convolve, mixture, translate, FinMeasure, MeasureError};
use crate::metric::Metric;
use crate::parallel::par_map;
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KvError {
    #[error("level {m}: weight prefix {prefix} is not below 1")]
    PrefixNotBelowOne { m: usize, prefix: String },
    #[error("level must be at least 1")]
    LevelZero,
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("no Folner oracle for {0}")]
    NoOracle(String),
    #[error("level {level}: oracle support {size} exceeds the cap {cap}")]
    SupportCap { level: usize, size: usize, cap: usize },
    #[error("level {level}: product set exceeds the cap {cap}")]
    ProductCap { level: usize, cap: usize },
    #[error("user oracle has no measure for level {0}")]
    MissingLevel(usize),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

impl KvError {
    pub fn is_cap(&self) -> bool {
        matches!(self, KvError::SupportCap { .. } | KvError::ProductCap { .. })
    }
}

/// Smallest `n >= 1` with `(tau_0 + ... + tau_{m-1})^n < 1/m`.
pub fn compute_nm<W: Weight>(taus: &[W], m: usize) -> Result<u64, KvError> {
    if m == 0 {
        return Err(KvError::LevelZero);
    }
    let prefix = taus.iter().take(m).fold(W::zero(), |a, t| a + t.clone());
    if prefix >= W::one() {
        return Err(KvError::PrefixNotBelowOne { m, prefix: prefix.format() });
    }
    let target = W::from_ratio(1, m as i64);
    let mut p = prefix.clone();
    let mut n = 1u64;
    while p >= target {
        p = p * prefix.clone();
        n += 1;
    }
    Ok(n)
}

/// Supplies almost invariant, finitely supported probability measures.
pub trait FolnerOracle<G: Group, W: Weight>: Send + Sync {
    fn name(&self) -> String;

    /// A measure `beta` with `p_d(g beta - beta) <= eps / 2` for `g` in `e`.
    fn base(
        &self,
        group: &G,
        level: usize,
        eps: &W,
        e: &[G::Elem],
        cap: usize,
    ) -> Result<FinMeasure<G::Elem, W>, KvError>;
}

/// `alpha = (1 - eps/5) beta + (eps/5) uniform(E)`, or `beta` when it already covers `E`.
pub fn folner_oracle<G: Group, W: Weight, O: FolnerOracle<G, W> + ?Sized>(
    oracle: &O,
    group: &G,
    level: usize,
    eps: &W,
    e: &[G::Elem],
    cap: usize,
) -> Result<FinMeasure<G::Elem, W>, KvError> {
    let beta = oracle.base(group, level, eps, e, cap)?;
    if e.iter().all(|g| beta.contains(g)) {
        return Ok(beta);
    }
    let alpha = W::min_of(eps.clone() / W::from_int(5), W::one());
    Ok(beta.support_mix(e.iter().cloned(), &alpha)?)
}

/// Uniform measure on a centred cube of side `ceil(4 max|g|_1 / eps)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LatticeBoxOracle;

impl LatticeBoxOracle {
    pub fn side<W: Weight>(eps: &W, e: &[LatticePoint]) -> i64 {
        let reach = e.iter().map(|g| g.l1()).max().unwrap_or(0) as f64;
        let exact = W::from_int(4 * reach as i64) / eps.clone();
        let mut l = exact.to_f64().ceil().max(1.0) as i64;
        while W::from_int(l) < exact {
            l += 1;
        }
        while l > 1 && W::from_int(l - 1) >= exact {
            l -= 1;
        }
        l
    }
}

impl<W: Weight> FolnerOracle<LatticeGroup, W> for LatticeBoxOracle {
    fn name(&self) -> String {
        "lattice-box".into()
    }

    fn base(
        &self,
        group: &LatticeGroup,
        level: usize,
        eps: &W,
        e: &[LatticePoint],
        cap: usize,
    ) -> Result<FinMeasure<LatticePoint, W>, KvError> {
        let l = Self::side(eps, e);
        let d = group.dim() as u32;
        let size = (l as u128).saturating_pow(d);
        if size > cap as u128 {
            return Err(KvError::SupportCap { level, size: size.min(usize::MAX as u128) as usize, cap });
        }
        let lo = -(l / 2);
        let mut pts = vec![Vec::new()];
        for _ in 0..d {
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<i64>| {
                    (lo..lo + l).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        Ok(FinMeasure::uniform(pts.into_iter().map(LatticePoint))?)
    }
}

/// Haar measure of a finite group.
#[derive(Debug, Clone, Copy, Default)]
pub struct FiniteGroupOracle;

impl<G: Group, W: Weight> FolnerOracle<G, W> for FiniteGroupOracle {
    fn name(&self) -> String {
        "finite-uniform".into()
    }

    fn base(
        &self,
        group: &G,
        level: usize,
        _eps: &W,
        _e: &[G::Elem],
        cap: usize,
    ) -> Result<FinMeasure<G::Elem, W>, KvError> {
        let elems = group.elements().ok_or_else(|| KvError::NoOracle(group.descriptor().kind.to_string()))?;
        if elems.len() > cap {
            return Err(KvError::SupportCap { level, size: elems.len(), cap });
        }
        Ok(FinMeasure::uniform(elems)?)
    }
}

/// Measures supplied per level; the requirement set is mixed in afterwards.
#[derive(Debug, Clone)]
pub struct UserOracle<E: Ord, W> {
    pub levels: Vec<FinMeasure<E, W>>,
}

impl<G: Group, W: Weight> FolnerOracle<G, W> for UserOracle<G::Elem, W> {
    fn name(&self) -> String {
        "user".into()
    }

    fn base(
        &self,
        _group: &G,
        level: usize,
        _eps: &W,
        _e: &[G::Elem],
        _cap: usize,
    ) -> Result<FinMeasure<G::Elem, W>, KvError> {
        self.levels.get(level).cloned().ok_or(KvError::MissingLevel(level))
    }
}

/// `tau_m = 2^-(m+1)` for `m = 0..=depth`.
pub fn geometric_taus<W: Weight>(depth: usize) -> Vec<W> {
    (0..=depth).map(|m| W::from_ratio(1, 1i64 << (m + 1))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KvSchedule<E, W> {
    /// `tau_0..tau_M`.
    pub taus: Vec<W>,
    /// `S_0 = {e} ⊆ S_1 ⊆ ... ⊆ S_M`.
    pub chain: Vec<Vec<E>>,
    /// Level `m` targets `eps_m = 1 / (eps_factor m)`.
    pub eps_factor: i64,
}

impl<E: Clone + Ord, W: Weight> KvSchedule<E, W> {
    pub fn depth(&self) -> usize {
        self.taus.len() - 1
    }

    pub fn validate<G: Group<Elem = E>>(&self, group: &G) -> Result<(), KvError> {
        if self.taus.is_empty() || self.chain.len() != self.taus.len() {
            return Err(KvError::Schedule(format!("{} weights for {} chain sets", self.taus.len(), self.chain.len())));
        }
        if let Some(t) = self.taus.iter().find(|t| !t.is_positive()) {
            return Err(KvError::Schedule(format!("weight {} is not positive", t.format())));
        }
        let sum = self.taus.iter().fold(W::zero(), |a, t| a + t.clone());
        if !W::le_tol(&sum, &W::one()) {
            return Err(KvError::Schedule(format!("weights sum to {}", sum.format())));
        }
        if self.chain[0] != vec![group.identity()] {
            return Err(KvError::Schedule("S_0 must be {e}".into()));
        }
        for m in 1..self.chain.len() {
            let prev: BTreeSet<&E> = self.chain[m - 1].iter().collect();
            let cur: BTreeSet<&E> = self.chain[m].iter().collect();
            if !prev.is_subset(&cur) {
                return Err(KvError::Schedule(format!("S_{} is not contained in S_{m}", m - 1)));
            }
        }
        if self.eps_factor < 1 {
            return Err(KvError::Schedule("eps_factor must be at least 1".into()));
        }
        Ok(())
    }

    pub fn eps(&self, m: usize) -> W {
        if m == 0 {
            W::from_int(2)
        } else {
            W::from_ratio(1, self.eps_factor * m as i64)
        }
    }

    pub fn tail(&self) -> W {
        W::one() - self.taus.iter().fold(W::zero(), |a, t| a + t.clone())
    }
}

/// `tau_m = 2^-(m+1)`, `S_m = {-m..m}` on the integers.
pub fn integer_schedule<W: Weight>(depth: usize) -> KvSchedule<LatticePoint, W> {
    KvSchedule {
        taus: geometric_taus(depth),
        chain: (0..=depth as i64).map(|m| (-m..=m).map(LatticeGroup::int).collect()).collect(),
        eps_factor: 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KvOptions {
    /// Hard cap on enumerated product sets and oracle supports.
    pub product_cap: usize,
    pub flat: FlatNormOptions,
    pub workers: usize,
}

impl Default for KvOptions {
    fn default() -> Self {
        KvOptions { product_cap: 100_000, flat: FlatNormOptions::default(), workers: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KvLevel<E: Ord, W> {
    pub m: usize,
    pub tau: W,
    /// `None` at level 0.
    pub n_m: Option<u64>,
    pub eps: W,
    /// `E_m = S_m ∪ (spt alpha_{m-1})^{n_m}`.
    pub requirement: Vec<E>,
    pub alpha: FinMeasure<E, W>,
    pub max_deficiency: W,
    /// `p_d(g alpha_m - alpha_m) < 1/m` on `E_m`.
    pub condition_i: bool,
    /// `E_m ⊆ spt(alpha_m)`.
    pub condition_ii: bool,
    pub backends: Vec<Backend>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KvResult<E: Ord, W> {
    pub oracle: String,
    pub levels: Vec<KvLevel<E, W>>,
    /// `sum_{m <= M} tau_m alpha_m`, missing mass `tail`.
    pub mu: FinMeasure<E, W>,
    pub tail: W,
    pub taus: Vec<W>,
    pub chain: Vec<Vec<E>>,
}

impl<E: Clone + Ord, W: Weight> KvResult<E, W> {
    pub fn conditions_hold(&self) -> bool {
        self.levels.iter().all(|l| l.condition_i && l.condition_ii)
    }

    /// `spt(mu) ⊇ S_M`.
    pub fn covers_chain(&self) -> bool {
        self.chain.last().is_some_and(|s| s.iter().all(|g| self.mu.contains(g)))
    }
}

/// `{s_1 ... s_n : s_i ∈ support}`.
pub fn product_set<G: Group>(
    group: &G,
    support: &[G::Elem],
    n: u64,
    cap: usize,
    level: usize,
) -> Result<BTreeSet<G::Elem>, KvError> {
    let mut cur: BTreeSet<G::Elem> = BTreeSet::from([group.identity()]);
    for _ in 0..n {
        let mut next = BTreeSet::new();
        for x in &cur {
            for s in support {
                next.insert(group.mul(x, s));
                if next.len() > cap {
                    return Err(KvError::ProductCap { level, cap });
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn requirement<G: Group, W: Weight>(
    group: &G,
    chain: &[G::Elem],
    prev: &FinMeasure<G::Elem, W>,
    n: u64,
    cap: usize,
    level: usize,
) -> Result<Vec<G::Elem>, KvError> {
    let mut e = product_set(group, &prev.support(), n, cap, level)?;
    e.extend(chain.iter().cloned());
    Ok(e.into_iter().collect())
}

fn check_level<G: Group, W: Weight, M: Metric<G::Elem> + ?Sized>(
    group: &G,
    alpha: &FinMeasure<G::Elem, W>,
    e: &[G::Elem],
    m: usize,
    d: &M,
    opts: &KvOptions,
) -> (W, bool, bool, Vec<Backend>) {
    let vals = par_map(e, opts.workers, |g| deficiency(group, alpha, g, d, &opts.flat));
    let max = vals.iter().fold(W::zero(), |a, v| W::max_of(a, v.value.clone()));
    let bound = W::from_ratio(1, m.max(1) as i64);
    let cond_i = m == 0 || vals.iter().all(|v| v.value < bound);
    let cond_ii = e.iter().all(|g| alpha.contains(g));
    let mut backends: Vec<Backend> = vals.iter().map(|v| v.backend).collect();
    backends.sort_by_key(|b| b.as_str());
    backends.dedup();
    (max, cond_i, cond_ii, backends)
}

/// Builds `alpha_0..alpha_M` and the truncated mixture.
pub fn kv_build<G, W, O, M>(
    group: &G,
    schedule: &KvSchedule<G::Elem, W>,
    oracle: &O,
    d: &M,
    opts: &KvOptions,
) -> Result<KvResult<G::Elem, W>, KvError>
where
    G: Group,
    W: Weight,
    O: FolnerOracle<G, W> + ?Sized,
    M: Metric<G::Elem> + ?Sized,
{
    schedule.validate(group)?;
    let mut levels: Vec<KvLevel<G::Elem, W>> = Vec::new();
    for m in 0..=schedule.depth() {
        let (n_m, e) = if m == 0 {
            (None, schedule.chain[0].clone())
        } else {
            let n = compute_nm(&schedule.taus, m)?;
            let prev = &levels[m - 1].alpha;
            (Some(n), requirement(group, &schedule.chain[m], prev, n, opts.product_cap, m)?)
        };
        let eps = schedule.eps(m);
        let alpha = folner_oracle(oracle, group, m, &eps, &e, opts.product_cap)?;
        let (max_deficiency, condition_i, condition_ii, backends) = check_level(group, &alpha, &e, m, d, opts);
        levels.push(KvLevel {
            m,
            tau: schedule.taus[m].clone(),
            n_m,
            eps,
            requirement: e,
            alpha,
            max_deficiency,
            condition_i,
            condition_ii,
            backends,
        });
    }
    let parts: Vec<_> = levels.iter().map(|l| l.alpha.clone()).collect();
    let mu = mixture(&schedule.taus, &parts)?;
    Ok(KvResult {
        oracle: oracle.name(),
        levels,
        mu,
        tail: schedule.tail(),
        taus: schedule.taus.clone(),
        chain: schedule.chain.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow<W> {
    pub m: usize,
    pub requirement_size: usize,
    pub max_deficiency: W,
    pub condition_i: bool,
    pub condition_ii: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim1Row<W> {
    pub m: usize,
    pub k: Vec<usize>,
    pub g: String,
    pub value: W,
    pub bound: W,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim2Row<W> {
    pub m: usize,
    pub n_m: u64,
    pub g: String,
    pub value: W,
    pub bound: W,
    /// `2 tail n_m`.
    pub slack: W,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimsReport<W> {
    pub conditions: Vec<ConditionRow<W>>,
    pub claim1: Vec<Claim1Row<W>>,
    /// Levels whose index tuples exceeded the cap and were not enumerated.
    pub claim1_skipped: Vec<usize>,
    pub claim2: Vec<Claim2Row<W>>,
    pub claim3: DeficiencyProfile<W>,
    /// Which measure the profile was computed for.
    pub claim3_form: String,
}

impl<W: Weight> ClaimsReport<W> {
    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.condition_i && c.condition_ii)
    }

    pub fn claim1_holds(&self) -> bool {
        self.claim1.iter().all(|r| r.holds)
    }

    pub fn claim2_holds(&self) -> bool {
        self.claim2.iter().all(|r| r.holds)
    }

    pub fn claim3_holds(&self) -> bool {
        self.claim3.monotone.iter().all(|&b| b)
    }

    pub fn all_hold(&self) -> bool {
        self.conditions_hold() && self.claim1_holds() && self.claim2_holds() && self.claim3_holds()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimOptions {
    pub levels: Vec<usize>,
    /// Profile length for the monotonicity check.
    pub profile_n: u64,
    /// Largest number of index tuples enumerated per level.
    pub tuple_cap: usize,
}

impl Default for ClaimOptions {
    fn default() -> Self {
        ClaimOptions { levels: vec![1, 2], profile_n: 20, tuple_cap: 5_000 }
    }
}

/// Re-verifies conditions (i), (ii) from scratch and checks Claims 1-3
/// against the truncated mixture.
pub fn verify_claims<G, W, M>(
    group: &G,
    result: &KvResult<G::Elem, W>,
    profile_elements: &[G::Elem],
    d: &M,
    copts: &ClaimOptions,
    opts: &KvOptions,
) -> Result<ClaimsReport<W>, KvError>
where
    G: Group,
    W: Weight,
    M: Metric<G::Elem> + ?Sized,
{
    let depth = result.levels.len() - 1;
    let mut conditions = Vec::new();
    for (m, level) in result.levels.iter().enumerate() {
        let e = if m == 0 {
            result.chain[0].clone()
        } else {
            let n = compute_nm(&result.taus, m)?;
            requirement(group, &result.chain[m], &result.levels[m - 1].alpha, n, opts.product_cap, m)?
        };
        let (max, ci, cii, _) = check_level(group, &level.alpha, &e, m, d, opts);
        conditions.push(ConditionRow {
            m,
            requirement_size: e.len(),
            max_deficiency: max,
            condition_i: ci,
            condition_ii: cii,
        });
    }

    let mut claim1 = Vec::new();
    let mut claim1_skipped = Vec::new();
    let mut claim2 = Vec::new();
    for &m in &copts.levels {
        if m == 0 || m > depth {
            continue;
        }
        let n = compute_nm(&result.taus, m)?;
        let gs = &result.chain[m - 1];
        let tuples = (depth + 1).checked_pow(n as u32).unwrap_or(usize::MAX);
        if tuples > copts.tuple_cap {
            claim1_skipped.push(m);
        } else {
            let ks: Vec<Vec<usize>> = (0..tuples)
                .map(|mut t| {
                    let mut k = vec![0; n as usize];
                    for slot in k.iter_mut().rev() {
                        *slot = t % (depth + 1);
                        t /= depth + 1;
                    }
                    k
                })
                .filter(|k| k.iter().any(|&ki| ki >= m))
                .collect();
            let bound = W::from_ratio(2, m as i64);
            let rows = par_map(&ks, opts.workers, |k| {
                let mut theta = result.levels[k[0]].alpha.clone();
                for &ki in &k[1..] {
                    theta = convolve(group, &theta, &result.levels[ki].alpha, 1);
                }
                gs.iter()
                    .map(|g| {
                        let v = deficiency(group, &theta, g, d, &opts.flat).value;
                        Claim1Row {
                            m,
                            k: k.clone(),
                            g: g.to_string(),
                            holds: W::le_tol(&v, &bound),
                            value: v,
                            bound: bound.clone(),
                        }
                    })
                    .collect::<Vec<_>>()
            });
            claim1.extend(rows.into_iter().flatten());
        }
        let mut pow = result.mu.clone();
        for _ in 1..n {
            pow = convolve(group, &pow, &result.mu, opts.workers);
        }
        let bound = W::from_ratio(4, m as i64);
        let slack = W::from_int(2) * result.tail.clone() * W::from_int(n as i64);
        let vals = par_map(gs, opts.workers, |g| {
            let m_g = translate(group, g, &pow).to_signed().sub(&pow.to_signed());
            crate::dual_norm::flat_norm(&m_g, d, &opts.flat).value
        });
        for (g, v) in gs.iter().zip(vals) {
            let holds = v < bound.clone() + slack.clone();
            claim2.push(Claim2Row {
                m,
                n_m: n,
                g: g.to_string(),
                value: v,
                bound: bound.clone(),
                slack: slack.clone(),
                holds,
            });
        }
    }
    let claim3 = deficiency_profile(
        group,
        &result.mu,
        profile_elements,
        copts.profile_n,
        d,
        W::zero(),
        &opts.flat,
        opts.workers,
    );
    Ok(ClaimsReport {
        conditions,
        claim1,
        claim1_skipped,
        claim2,
        claim3,
        claim3_form: "truncated sub-probability mixture, missing mass kept as deficiency, no renormalization".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_norm::WordMetric;
    use crate::groups::CyclicGroup;
    use crate::weight::{rat, Rational};

    #[test]
    fn nm_examples() {
        let taus: Vec<Rational> = vec![rat(1, 2), rat(1, 4), rat(1, 8)];
        assert_eq!(compute_nm(&taus, 1).unwrap(), 1);
        assert_eq!(compute_nm(&taus, 2).unwrap(), 3);
        assert_eq!(compute_nm(&taus, 3).unwrap(), 9);
        assert!(compute_nm(&[rat(1, 1)], 1).is_err());
        assert!(compute_nm(&taus, 0).is_err());
    }

    #[test]
    fn box_sides() {
        let e = [LatticeGroup::int(1), LatticeGroup::int(-1)];
        assert_eq!(LatticeBoxOracle::side(&rat(1, 10), &e), 40);
        assert_eq!(LatticeBoxOracle::side(&rat(1, 2), &e), 8);
        let z2 = LatticeGroup::new(2);
        let units = [z2.point(&[1, 0]), z2.point(&[0, 1])];
        assert_eq!(LatticeBoxOracle::side(&rat(1, 5), &units), 20);
    }

    #[test]
    fn box_oracle_meets_eps() {
        let zg = LatticeGroup::new(1);
        let d = WordMetric::standard(zg.clone());
        let e = [LatticeGroup::int(1), LatticeGroup::int(-1), LatticeGroup::int(30)];
        let a: FinMeasure<_, Rational> = folner_oracle(&LatticeBoxOracle, &zg, 1, &rat(1, 10), &e, 100_000).unwrap();
        assert!(e.iter().all(|g| a.contains(g)));
        for g in &e {
            assert!(deficiency(&zg, &a, g, &d, &FlatNormOptions::default()).value <= rat(1, 10));
        }
    }

    #[test]
    fn finite_group_build() {
        let c = CyclicGroup::new(5);
        let d = WordMetric::standard(c.clone());
        let els = c.elements().unwrap();
        let sched = KvSchedule {
            taus: geometric_taus::<Rational>(2),
            chain: vec![vec![c.identity()], els[..3].to_vec(), els.clone()],
            eps_factor: 2,
        };
        let r = kv_build(&c, &sched, &FiniteGroupOracle, &d, &KvOptions::default()).unwrap();
        assert!(r.conditions_hold());
        assert!(r.levels.iter().all(|l| l.max_deficiency == rat(0, 1)));
        assert_eq!(r.mu.normalized(), FinMeasure::uniform(els).unwrap());
        assert_eq!(r.tail, rat(1, 8));
    }

    #[test]
    fn depth_zero() {
        let zg = LatticeGroup::new(1);
        let d = WordMetric::standard(zg.clone());
        let r = kv_build(&zg, &integer_schedule::<Rational>(0), &LatticeBoxOracle, &d, &KvOptions::default()).unwrap();
        assert_eq!(r.mu.get(&LatticeGroup::int(0)), Some(&rat(1, 2)));
        assert_eq!(r.tail, rat(1, 2));
        assert_eq!(r.mu.deficiency(), &rat(1, 2));
    }

    #[test]
    fn integer_levels() {
        let zg = LatticeGroup::new(1);
        let d = WordMetric::standard(zg.clone());
        let r = kv_build(&zg, &integer_schedule::<Rational>(2), &LatticeBoxOracle, &d, &KvOptions::default()).unwrap();
        assert!(r.conditions_hold());
        let e1: Vec<_> = (-1..=1).map(LatticeGroup::int).collect();
        assert_eq!(r.levels[1].requirement, e1);
        let e2: Vec<_> = (-12..=9).map(LatticeGroup::int).collect();
        assert_eq!(r.levels[2].requirement, e2);
        assert_eq!(r.levels[1].alpha.len(), 8);
        assert_eq!(r.levels[2].alpha.len(), 192);
        assert!(r.covers_chain());
    }

    #[test]
    fn schedule_validation() {
        let zg = LatticeGroup::new(1);
        let mut s = integer_schedule::<Rational>(1);
        s.chain[0] = vec![LatticeGroup::int(1)];
        assert!(s.validate(&zg).is_err());
        let mut s = integer_schedule::<Rational>(1);
        s.taus[1] = rat(3, 4);
        assert!(s.validate(&zg).is_err());
    }

    #[test]
    fn product_cap_aborts() {
        let zg = LatticeGroup::new(1);
        let supp: Vec<_> = (0..50).map(LatticeGroup::int).collect();
        assert!(matches!(product_set(&zg, &supp, 3, 100, 2), Err(KvError::ProductCap { level: 2, cap: 100 })));
        assert_eq!(product_set(&zg, &supp, 3, 1000, 2).unwrap().len(), 148);
    }
}
