//! Finitely supported measures with exact convolution and tracked mass deficiency.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Display;

use thiserror::Error;

use crate::actions::{Action, ActionError};
use crate::groups::Group;
use crate::parallel::par_map;
use crate::weight::Weight;

/// Atoms of `mu` handled per convolution task. Fixed so results do not
/// depend on the worker count.
const CONV_CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("uniform measure on an empty set")]
    Empty,
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("total mass {0} exceeds 1")]
    MassExceedsOne(String),
    #[error("{weights} weights for {parts} parts")]
    LengthMismatch { weights: usize, parts: usize },
    #[error("mixing weight must lie in (0,1], got {0}")]
    BadAlpha(String),
    #[error("convolution power needs n >= 1")]
    ZeroPower,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("support of mu^{n} has {size} atoms, over the cap {cap}")]
    SupportCap { n: u64, size: usize, cap: usize },
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// Probability measure with finite support, possibly sub-probability after
/// pruning; the missing mass is kept in `deficiency`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinMeasure<P: Ord, W> {
    atoms: BTreeMap<P, W>,
    deficiency: W,
}

/// Finitely supported signed measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedFinMeasure<P: Ord, W> {
    atoms: BTreeMap<P, W>,
}

fn accumulate<P: Ord, W: Weight>(map: &mut BTreeMap<P, W>, p: P, w: W) {
    match map.get_mut(&p) {
        Some(v) => *v = v.clone() + w,
        None => {
            map.insert(p, w);
        }
    }
}

impl<P: Clone + Ord, W: Weight> FinMeasure<P, W> {
    pub fn dirac(x: P) -> Self {
        FinMeasure { atoms: BTreeMap::from([(x, W::one())]), deficiency: W::zero() }
    }

    pub fn uniform<I: IntoIterator<Item = P>>(pts: I) -> Result<Self, MeasureError> {
        let set: BTreeSet<P> = pts.into_iter().collect();
        if set.is_empty() {
            return Err(MeasureError::Empty);
        }
        let w = W::from_ratio(1, set.len() as i64);
        Ok(FinMeasure { atoms: set.into_iter().map(|p| (p, w.clone())).collect(), deficiency: W::zero() })
    }

    /// Merges repeated points; missing mass becomes deficiency.
    pub fn from_atoms<I: IntoIterator<Item = (P, W)>>(atoms: I) -> Result<Self, MeasureError> {
        let mut map = BTreeMap::new();
        for (p, w) in atoms {
            if w.is_negative() {
                return Err(MeasureError::NegativeWeight(w.format()));
            }
            accumulate(&mut map, p, w);
        }
        map.retain(|_, w: &mut W| !w.is_zero());
        let total = map.values().fold(W::zero(), |a, w| a + w.clone());
        if !W::le_tol(&total, &W::one()) {
            return Err(MeasureError::MassExceedsOne(total.format()));
        }
        let deficiency = W::max_of(W::one() - total, W::zero());
        Ok(FinMeasure { atoms: map, deficiency })
    }

    pub fn atoms(&self) -> &BTreeMap<P, W> {
        &self.atoms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &W)> {
        self.atoms.iter()
    }

    pub fn get(&self, p: &P) -> Option<&W> {
        self.atoms.get(p)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> Vec<P> {
        self.atoms.keys().cloned().collect()
    }

    pub fn contains(&self, p: &P) -> bool {
        self.atoms.contains_key(p)
    }

    pub fn total_mass(&self) -> W {
        self.atoms.values().fold(W::zero(), |a, w| a + w.clone())
    }

    /// Mass lost to pruning or truncation.
    pub fn deficiency(&self) -> &W {
        &self.deficiency
    }

    pub fn expectation<F: Fn(&P) -> W>(&self, f: F) -> W {
        self.atoms.iter().fold(W::zero(), |a, (p, w)| a + w.clone() * f(p))
    }

    /// Image under `f`, merging collisions.
    pub fn map_points<Q: Clone + Ord, F: Fn(&P) -> Q>(&self, f: F) -> FinMeasure<Q, W> {
        let mut map = BTreeMap::new();
        for (p, w) in &self.atoms {
            accumulate(&mut map, f(p), w.clone());
        }
        FinMeasure { atoms: map, deficiency: self.deficiency.clone() }
    }

    /// Drops atoms below `threshold`; their mass moves to the deficiency.
    pub fn prune(&self, threshold: &W) -> Self {
        if !threshold.is_positive() {
            return self.clone();
        }
        let mut dropped = W::zero();
        let mut atoms = BTreeMap::new();
        for (p, w) in &self.atoms {
            if w < threshold {
                dropped = dropped + w.clone();
            } else {
                atoms.insert(p.clone(), w.clone());
            }
        }
        FinMeasure { atoms, deficiency: self.deficiency.clone() + dropped }
    }

    /// Rescaled to total mass one (deficiency reset).
    pub fn normalized(&self) -> Self {
        let m = self.total_mass();
        FinMeasure {
            atoms: self.atoms.iter().map(|(p, w)| (p.clone(), w.clone() / m.clone())).collect(),
            deficiency: W::zero(),
        }
    }

    pub fn to_signed(&self) -> SignedFinMeasure<P, W> {
        SignedFinMeasure { atoms: self.atoms.clone() }
    }

    /// `(1 - alpha) mu + alpha * uniform(E)`.
    pub fn support_mix<I: IntoIterator<Item = P>>(&self, e: I, alpha: &W) -> Result<Self, MeasureError> {
        if !alpha.is_positive() || *alpha > W::one() {
            return Err(MeasureError::BadAlpha(alpha.format()));
        }
        let u = Self::uniform(e)?;
        let keep = W::one() - alpha.clone();
        let mut atoms = BTreeMap::new();
        for (p, w) in &self.atoms {
            let v = keep.clone() * w.clone();
            if !v.is_zero() {
                accumulate(&mut atoms, p.clone(), v);
            }
        }
        for (p, w) in u.atoms {
            accumulate(&mut atoms, p, alpha.clone() * w);
        }
        Ok(FinMeasure { atoms, deficiency: keep * self.deficiency.clone() })
    }
}

impl<P: Clone + Ord + Display, W: Weight> FinMeasure<P, W> {
    /// Text form: header lines, then `point<TAB>weight` sorted by point text.
    pub fn to_text(&self, carrier: &str) -> String {
        let mut rows: Vec<(String, String)> = self.atoms.iter().map(|(p, w)| (p.to_string(), w.format())).collect();
        rows.sort();
        let mut out =
            format!("# carrier: {carrier}\n# mode: {}\n# deficiency: {}\n", W::MODE, self.deficiency.format());
        for (p, w) in rows {
            out.push_str(&p);
            out.push('\t');
            out.push_str(&w);
            out.push('\n');
        }
        out
    }

    /// Parses [`FinMeasure::to_text`] output. Returns the carrier label too.
    pub fn from_text<F>(text: &str, parse_point: F) -> Result<(Self, String), MeasureError>
    where
        F: Fn(&str) -> Result<P, String>,
    {
        let mut carrier = String::new();
        let mut deficiency = W::zero();
        let mut atoms = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let err = |reason: String| MeasureError::Parse { line: i + 1, reason };
            if line.trim().is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let (k, v) = h.split_once(':').ok_or_else(|| err("header needs key: value".into()))?;
                match k.trim() {
                    "carrier" => carrier = v.trim().to_string(),
                    "mode" if v.trim() != W::MODE.as_str() => {
                        return Err(err(format!("file mode {} but reading in {} mode", v.trim(), W::MODE)))
                    }
                    "deficiency" => {
                        deficiency = W::parse(v).ok_or_else(|| err(format!("bad deficiency {:?}", v.trim())))?
                    }
                    _ => {}
                }
                continue;
            }
            let (p, w) = line
                .split_once('\t')
                .or_else(|| line.trim_end().rsplit_once(char::is_whitespace))
                .ok_or_else(|| err("expected point and weight".into()))?;
            let w = W::parse(w).ok_or_else(|| err(format!("bad weight {w:?}")))?;
            if !w.is_positive() {
                return Err(err(format!("weight must be positive, got {}", w.format())));
            }
            let p = parse_point(p.trim()).map_err(err)?;
            accumulate(&mut atoms, p, w);
        }
        let m = FinMeasure { atoms, deficiency };
        let total = m.total_mass() + m.deficiency.clone();
        if !W::eq_tol(&total, &W::one()) {
            return Err(MeasureError::Parse { line: 0, reason: format!("mass plus deficiency is {}", total.format()) });
        }
        Ok((m, carrier))
    }
}

/// `mu * nu`: law of `xy` with `x ~ mu`, `y ~ nu`.
pub fn convolve<G: Group, W: Weight>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    nu: &FinMeasure<G::Elem, W>,
    workers: usize,
) -> FinMeasure<G::Elem, W> {
    let mu_atoms: Vec<(&G::Elem, &W)> = mu.atoms.iter().collect();
    let nu_atoms: Vec<(&G::Elem, &W)> = nu.atoms.iter().collect();
    let (mu_lin, mu_den) = W::linearize(&mu_atoms.iter().map(|a| a.1).collect::<Vec<_>>());
    let (nu_lin, nu_den) = W::linearize(&nu_atoms.iter().map(|a| a.1).collect::<Vec<_>>());
    let chunks: Vec<std::ops::Range<usize>> =
        (0..mu_atoms.len()).step_by(CONV_CHUNK).map(|s| s..(s + CONV_CHUNK).min(mu_atoms.len())).collect();
    let partials = par_map(&chunks, workers, |range| {
        let mut acc: BTreeMap<G::Elem, W::Lin> = BTreeMap::new();
        for i in range.clone() {
            for (j, (y, _)) in nu_atoms.iter().enumerate() {
                let xy = group.mul(mu_atoms[i].0, y);
                let slot = acc.entry(xy).or_insert_with(W::lin_zero);
                W::lin_fma(slot, &mu_lin[i], &nu_lin[j]);
            }
        }
        acc
    });
    let mut total: BTreeMap<G::Elem, W::Lin> = BTreeMap::new();
    for part in partials {
        for (p, v) in part {
            match total.get_mut(&p) {
                Some(s) => W::lin_add(s, &v),
                None => {
                    total.insert(p, v);
                }
            }
        }
    }
    let mut den = W::lin_zero();
    W::lin_fma(&mut den, &mu_den, &nu_den);
    let atoms =
        total.into_iter().filter(|(_, v)| !W::lin_is_zero(v)).map(|(p, v)| (p, W::delinearize(v, &den))).collect();
    let (a, b) = (mu.deficiency.clone(), nu.deficiency.clone());
    FinMeasure { atoms, deficiency: a.clone() + b.clone() - a * b }
}

/// Powers `mu^1..mu^n_max`, stopping with an error once a support exceeds `cap`.
pub fn capped_powers<'a, G: Group, W: Weight>(
    group: &'a G,
    mu: &FinMeasure<G::Elem, W>,
    n_max: u64,
    threshold: W,
    cap: usize,
    workers: usize,
) -> impl Iterator<Item = Result<(u64, FinMeasure<G::Elem, W>), MeasureError>> + 'a {
    let mut failed = false;
    ConvolutionPowers::new(group, mu, threshold, workers).take(n_max as usize).map_while(move |(n, p)| {
        if failed {
            return None;
        }
        if p.len() > cap {
            failed = true;
            return Some(Err(MeasureError::SupportCap { n, size: p.len(), cap }));
        }
        Some(Ok((n, p)))
    })
}

/// Successive powers `mu^1, mu^2, ...`, pruned after every step.
pub struct ConvolutionPowers<'a, G: Group, W: Weight> {
    group: &'a G,
    base: FinMeasure<G::Elem, W>,
    current: Option<FinMeasure<G::Elem, W>>,
    n: u64,
    threshold: W,
    workers: usize,
}

impl<'a, G: Group, W: Weight> ConvolutionPowers<'a, G, W> {
    pub fn new(group: &'a G, mu: &FinMeasure<G::Elem, W>, threshold: W, workers: usize) -> Self {
        ConvolutionPowers { group, base: mu.clone(), current: None, n: 0, threshold, workers }
    }
}

impl<G: Group, W: Weight> Iterator for ConvolutionPowers<'_, G, W> {
    type Item = (u64, FinMeasure<G::Elem, W>);

    fn next(&mut self) -> Option<Self::Item> {
        let next = match &self.current {
            None => self.base.prune(&self.threshold),
            Some(c) => convolve(self.group, c, &self.base, self.workers).prune(&self.threshold),
        };
        self.n += 1;
        self.current = Some(next.clone());
        Some((self.n, next))
    }
}

pub fn convolution_power<G: Group, W: Weight>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    n: u64,
    threshold: W,
    workers: usize,
) -> Result<FinMeasure<G::Elem, W>, MeasureError> {
    if n == 0 {
        return Err(MeasureError::ZeroPower);
    }
    Ok(ConvolutionPowers::new(group, mu, threshold, workers).nth((n - 1) as usize).expect("infinite iterator").1)
}

/// Atom at `g^-1` with weight `mu(g)`.
pub fn pushforward_inverse<G: Group, W: Weight>(group: &G, mu: &FinMeasure<G::Elem, W>) -> FinMeasure<G::Elem, W> {
    mu.map_points(|g| group.inv(g))
}

/// `g mu = delta_g * mu`.
pub fn translate<G: Group, W: Weight>(group: &G, g: &G::Elem, mu: &FinMeasure<G::Elem, W>) -> FinMeasure<G::Elem, W> {
    mu.map_points(|x| group.mul(g, x))
}

/// Image of a measure on the space under `x -> g.x`.
pub fn act_on_measure<A: Action, W: Weight>(
    action: &A,
    g: &<A::G as Group>::Elem,
    mu: &FinMeasure<A::Point, W>,
) -> Result<FinMeasure<A::Point, W>, MeasureError> {
    let mut atoms = BTreeMap::new();
    for (p, w) in &mu.atoms {
        accumulate(&mut atoms, action.act(g, p)?, w.clone());
    }
    Ok(FinMeasure { atoms, deficiency: mu.deficiency.clone() })
}

/// `sum_i w_i parts_i`; unassigned weight and the parts' deficiencies add up.
pub fn mixture<P: Clone + Ord, W: Weight>(
    weights: &[W],
    parts: &[FinMeasure<P, W>],
) -> Result<FinMeasure<P, W>, MeasureError> {
    if weights.len() != parts.len() {
        return Err(MeasureError::LengthMismatch { weights: weights.len(), parts: parts.len() });
    }
    if let Some(w) = weights.iter().find(|w| w.is_negative()) {
        return Err(MeasureError::NegativeWeight(w.format()));
    }
    let sum = weights.iter().fold(W::zero(), |a, w| a + w.clone());
    if !W::le_tol(&sum, &W::one()) {
        return Err(MeasureError::MassExceedsOne(sum.format()));
    }
    let mut atoms = BTreeMap::new();
    let mut deficiency = W::max_of(W::one() - sum, W::zero());
    for (w, part) in weights.iter().zip(parts) {
        if w.is_zero() {
            continue;
        }
        for (p, v) in &part.atoms {
            accumulate(&mut atoms, p.clone(), w.clone() * v.clone());
        }
        deficiency = deficiency + w.clone() * part.deficiency.clone();
    }
    Ok(FinMeasure { atoms, deficiency })
}

pub fn sub<P: Clone + Ord, W: Weight>(mu: &FinMeasure<P, W>, nu: &FinMeasure<P, W>) -> SignedFinMeasure<P, W> {
    mu.to_signed().sub(&nu.to_signed())
}

/// Half the l1 distance between the atom maps.
pub fn tv_distance<P: Clone + Ord, W: Weight>(mu: &FinMeasure<P, W>, nu: &FinMeasure<P, W>) -> W {
    sub(mu, nu).total_variation() / W::from_int(2)
}

impl<P: Clone + Ord, W: Weight> SignedFinMeasure<P, W> {
    pub fn zero() -> Self {
        SignedFinMeasure { atoms: BTreeMap::new() }
    }

    pub fn from_atoms<I: IntoIterator<Item = (P, W)>>(atoms: I) -> Self {
        let mut map = BTreeMap::new();
        for (p, w) in atoms {
            accumulate(&mut map, p, w);
        }
        map.retain(|_, w: &mut W| !w.is_zero());
        SignedFinMeasure { atoms: map }
    }

    pub fn atoms(&self) -> &BTreeMap<P, W> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `sum |c_i|`.
    pub fn total_variation(&self) -> W {
        self.atoms.values().fold(W::zero(), |a, w| a + w.abs())
    }

    pub fn total(&self) -> W {
        self.atoms.values().fold(W::zero(), |a, w| a + w.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_atoms(self.atoms.iter().chain(other.atoms.iter()).map(|(p, w)| (p.clone(), w.clone())))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_atoms(
            self.atoms
                .iter()
                .map(|(p, w)| (p.clone(), w.clone()))
                .chain(other.atoms.iter().map(|(p, w)| (p.clone(), -w.clone()))),
        )
    }

    pub fn scale(&self, t: &W) -> Self {
        Self::from_atoms(self.atoms.iter().map(|(p, w)| (p.clone(), w.clone() * t.clone())))
    }

    pub fn map_points<Q: Clone + Ord, F: Fn(&P) -> Q>(&self, f: F) -> SignedFinMeasure<Q, W> {
        SignedFinMeasure::from_atoms(self.atoms.iter().map(|(p, w)| (f(p), w.clone())))
    }

    pub fn integrate<F: Fn(&P) -> W>(&self, f: F) -> W {
        self.atoms.iter().fold(W::zero(), |a, (p, w)| a + w.clone() * f(p))
    }
}

/// `m * nu` by bilinearity.
pub fn convolve_signed<G: Group, W: Weight>(
    group: &G,
    m: &SignedFinMeasure<G::Elem, W>,
    nu: &FinMeasure<G::Elem, W>,
) -> SignedFinMeasure<G::Elem, W> {
    let mut atoms = BTreeMap::new();
    for (x, a) in &m.atoms {
        for (y, b) in &nu.atoms {
            accumulate(&mut atoms, group.mul(x, y), a.clone() * b.clone());
        }
    }
    atoms.retain(|_, w: &mut W| !w.is_zero());
    SignedFinMeasure { atoms }
}

pub fn translate_signed<G: Group, W: Weight>(
    group: &G,
    g: &G::Elem,
    m: &SignedFinMeasure<G::Elem, W>,
) -> SignedFinMeasure<G::Elem, W> {
    m.map_points(|x| group.mul(g, x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NondegeneracyReport {
    /// Distinct products of length 1..=depth found.
    pub reached: usize,
    pub depth: u32,
    pub targets: Vec<(String, bool)>,
    /// The last layer still produced new elements, or the node cap was hit.
    pub truncated: bool,
}

/// BFS over products `s_1 ... s_k` of support elements, `1 <= k <= depth`.
pub fn nondegeneracy_probe<G: Group, W: Weight>(
    group: &G,
    mu: &FinMeasure<G::Elem, W>,
    depth: u32,
    targets: &[G::Elem],
    max_nodes: usize,
) -> NondegeneracyReport {
    let spt = mu.support();
    let mut seen: HashSet<G::Elem> = spt.iter().cloned().collect();
    let mut frontier = spt.clone();
    let mut truncated = false;
    let mut d = 1;
    while d < depth && !frontier.is_empty() {
        let mut next = Vec::new();
        'outer: for x in &frontier {
            for s in &spt {
                let y = group.mul(x, s);
                if seen.insert(y.clone()) {
                    next.push(y);
                    if seen.len() >= max_nodes {
                        truncated = true;
                        break 'outer;
                    }
                }
            }
        }
        frontier = next;
        d += 1;
        if truncated {
            break;
        }
    }
    if !truncated && !frontier.is_empty() {
        truncated = frontier.iter().any(|x| spt.iter().any(|s| !seen.contains(&group.mul(x, s))));
    }
    NondegeneracyReport {
        reached: seen.len(),
        depth: d,
        targets: targets.iter().map(|t| (t.to_string(), seen.contains(t))).collect(),
        truncated,
    }
}
