//! Groups, point spaces, measures, metrics and test functions built from a config.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_traits::{One, Signed, Zero};
use walkbench_core::actions::{
    Action, CappedAbs, DyadicInterval, DyadicLine, FiniteSubsets, PointTuple, RightRegular, SelfAction, SupMetric,
    TuplePower,
};
use walkbench_core::dual_norm::{default_line_base_points, DisplacementMetric, WordMetric};
use walkbench_core::groups::{
    kappa_inv, CyclicGroup, FreeGroup, FreeWord, Group, LatticeGroup, LatticePoint, ThompsonGroup, Variant,
};
use walkbench_core::harmonic::mcshane_extend;
use walkbench_core::kv::{FolnerOracle, LatticeBoxOracle};
use walkbench_core::measures::FinMeasure;
use walkbench_core::metric::{DiscreteMetric, Metric};
use walkbench_core::weight::parse_rational;
use walkbench_core::{Dyadic, Rational, Weight};

use crate::config::{
    ExperimentConfig, FunctionSpec, MeasureKind, MetricKind, MetricSpec, PointMetricKind, PowerKind, SpaceKind,
};
use crate::error::CliError;

/// Largest ball enumerated for default samples and chains.
const BALL_CAP: usize = 100_000;

pub(crate) trait CliGroup: Group {
    fn thompson(&self) -> Option<ThompsonGroup> {
        None
    }

    fn free(&self) -> Option<FreeGroup> {
        None
    }

    /// Real value of an element, where the group sits in the line.
    fn scalar(&self, _g: &Self::Elem) -> Option<Rational> {
        None
    }

    fn first_letter(&self, _g: &Self::Elem) -> Option<i8> {
        None
    }

    fn box_oracle<W: Weight>(&self) -> Option<Box<dyn FolnerOracle<Self, W>>>
    where
        Self: Sized,
    {
        None
    }

    fn displacement_metric(&self, _base: &[String]) -> Option<Result<BoxedMetric<Self::Elem>, CliError>> {
        None
    }

    fn default_sample(&self) -> Vec<Self::Elem>
    where
        Self: Sized,
    {
        ball(self, 2)
    }

    fn default_anchor(&self) -> Self::Elem {
        self.identity()
    }
}

impl CliGroup for LatticeGroup {
    fn scalar(&self, g: &LatticePoint) -> Option<Rational> {
        (self.dim() == 1).then(|| Rational::from_integer(g.0[0].into()))
    }

    fn box_oracle<W: Weight>(&self) -> Option<Box<dyn FolnerOracle<Self, W>>> {
        Some(Box::new(LatticeBoxOracle))
    }

    fn default_sample(&self) -> Vec<LatticePoint> {
        if self.dim() == 1 {
            (-10..=10).map(LatticeGroup::int).collect()
        } else {
            ball(self, 2)
        }
    }
}

impl CliGroup for FreeGroup {
    fn free(&self) -> Option<FreeGroup> {
        Some(self.clone())
    }

    fn first_letter(&self, g: &FreeWord) -> Option<i8> {
        g.first()
    }
}

impl CliGroup for CyclicGroup {}

impl CliGroup for ThompsonGroup {
    fn thompson(&self) -> Option<ThompsonGroup> {
        Some(self.clone())
    }

    fn displacement_metric(&self, base: &[String]) -> Option<Result<BoxedMetric<Self::Elem>, CliError>> {
        let parsed = || -> Result<Vec<Dyadic>, CliError> {
            base.iter()
                .map(|s| s.parse::<Dyadic>().map_err(|e| CliError::config(format!("metric.base_points: {s:?}: {e}"))))
                .collect()
        };
        Some((|| {
            let pts = parsed()?;
            let m: Box<dyn Metric<Self::Elem>> = match self.variant() {
                Variant::Line => {
                    let pts = if pts.is_empty() { default_line_base_points() } else { pts };
                    Box::new(DisplacementMetric::new(DyadicLine::new(self.clone()), pts))
                }
                Variant::Unit => {
                    let pts =
                        if pts.is_empty() { default_line_base_points().iter().map(kappa_inv).collect() } else { pts };
                    Box::new(DisplacementMetric::new(DyadicInterval::new(self.clone()), pts))
                }
            };
            Ok(m)
        })())
    }
}

/// Elements within word length `r`, sorted.
pub(crate) fn ball<G: Group>(group: &G, r: u64) -> Vec<G::Elem> {
    let gens = group.symmetric_generators();
    let mut seen: HashSet<G::Elem> = HashSet::from([group.identity()]);
    let mut queue = VecDeque::from([(group.identity(), 0u64)]);
    while let Some((x, k)) = queue.pop_front() {
        if k == r || seen.len() >= BALL_CAP {
            continue;
        }
        for s in &gens {
            let y = group.mul(&x, s);
            if seen.insert(y.clone()) {
                queue.push_back((y, k + 1));
            }
        }
    }
    let mut out: Vec<G::Elem> = seen.into_iter().collect();
    out.sort();
    out
}

pub(crate) fn parse_elem<G: Group>(group: &G, field: &str, s: &str) -> Result<G::Elem, CliError> {
    group.parse(s).map_err(|e| CliError::config(format!("{field}: {e}")))
}

pub(crate) fn parse_weight<W: Weight>(field: &str, s: &str) -> Result<W, CliError> {
    W::parse(s).ok_or_else(|| CliError::config(format!("{field}: cannot read {s:?} as a weight")))
}

pub(crate) fn parse_exact(field: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::config(format!("{field}: cannot read {s:?} as a number")))
}

/// Test elements for profiles: configured ones or the generators.
pub(crate) fn test_elements<G: Group>(group: &G, list: &[String], field: &str) -> Result<Vec<G::Elem>, CliError> {
    if list.is_empty() {
        return Ok(group.generators());
    }
    list.iter().map(|s| parse_elem(group, field, s)).collect()
}

pub(crate) fn group_metric<G: CliGroup>(group: &G, spec: &MetricSpec) -> Result<Box<dyn Metric<G::Elem>>, CliError> {
    let word = || -> Result<Box<dyn Metric<G::Elem>>, CliError> {
        if spec.generators.is_empty() {
            return Ok(Box::new(WordMetric::standard(group.clone())));
        }
        let gens =
            spec.generators.iter().map(|s| parse_elem(group, "metric.generators", s)).collect::<Result<Vec<_>, _>>()?;
        Ok(Box::new(WordMetric::new(group.clone(), &gens)))
    };
    let displacement = || {
        group
            .displacement_metric(&spec.base_points)
            .unwrap_or_else(|| Err(CliError::config("metric: displacement needs thompson-unit or thompson-line")))
    };
    match spec.kind {
        MetricKind::Auto if group.thompson().is_some() => displacement(),
        MetricKind::Auto | MetricKind::Word => word(),
        MetricKind::Displacement => displacement(),
        MetricKind::Discrete => Ok(Box::new(DiscreteMetric)),
    }
}

/// Named or explicit step measures; `kv` is built by the caller.
pub(crate) fn basic_measure<G: CliGroup, W: Weight>(
    group: &G,
    cfg: &ExperimentConfig,
) -> Result<FinMeasure<G::Elem, W>, CliError> {
    let m = &cfg.measure;
    let merr = |e: walkbench_core::measures::MeasureError| CliError::config(format!("measure: {e}"));
    match m.kind {
        MeasureKind::Lazy => {
            let lazy = parse_exact("measure.laziness", &m.laziness)?;
            if lazy.is_negative() || lazy >= Rational::one() {
                return Err(CliError::config("measure.laziness must lie in [0,1)"));
            }
            let gens = group.symmetric_generators();
            let step =
                W::from_rational(&((Rational::one() - &lazy) / Rational::from_integer((gens.len() as i64).into())));
            let mut atoms: Vec<(G::Elem, W)> = gens.into_iter().map(|g| (g, step.clone())).collect();
            if !lazy.is_zero() {
                atoms.push((group.identity(), W::from_rational(&lazy)));
            }
            FinMeasure::from_atoms(atoms).map_err(merr)
        }
        MeasureKind::UniformGenerators => FinMeasure::uniform(group.symmetric_generators()).map_err(merr),
        MeasureKind::UniformGroup => {
            let elems =
                group.elements().ok_or_else(|| CliError::config("measure: uniform-group needs a finite group"))?;
            FinMeasure::uniform(elems).map_err(merr)
        }
        MeasureKind::Atoms => {
            if m.atoms.is_empty() {
                return Err(CliError::config("measure.atoms is empty"));
            }
            let atoms = m
                .atoms
                .iter()
                .enumerate()
                .map(|(i, (p, w))| {
                    let field = format!("measure.atoms[{i}]");
                    Ok((parse_elem(group, &field, p)?, parse_weight::<W>(&field, w)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            FinMeasure::from_atoms(atoms).map_err(merr)
        }
        MeasureKind::File => {
            let path = m.path.as_deref().ok_or_else(|| CliError::config("measure.path is required"))?;
            read_measure_file(group, path)
        }
        MeasureKind::Kv => Err(CliError::config("measure: kv measures are built by the runner")),
    }
}

pub(crate) fn read_measure_file<G: Group, W: Weight>(
    group: &G,
    path: &str,
) -> Result<FinMeasure<G::Elem, W>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read measure {path}: {e}")))?;
    FinMeasure::from_text(&text, |s| group.parse(s).map_err(|e| e.to_string()))
        .map(|(m, _)| m)
        .map_err(|e| CliError::config(format!("measure file {path}: {e}")))
}

pub(crate) type BoxedMetric<P> = Box<dyn Metric<P>>;

type PointProbe<P, T> = Box<dyn Fn(&P) -> Option<T> + Send + Sync>;

/// An action with the metric and helpers used by test functions.
pub(crate) struct Space<A: Action> {
    pub action: A,
    pub metric: Box<dyn Metric<A::Point>>,
    pub scalar: Option<PointProbe<A::Point, Rational>>,
    pub first_letter: Option<PointProbe<A::Point, i8>>,
    pub default_sample: Vec<A::Point>,
    pub default_anchor: A::Point,
}

pub(crate) trait SpaceVisitor {
    type Out;
    fn visit<A: Action>(self, space: Space<A>) -> Result<Self::Out, CliError>
    where
        A::G: CliGroup;
}

pub(crate) fn with_space<G: CliGroup, V: SpaceVisitor>(
    group: &G,
    cfg: &ExperimentConfig,
    v: V,
) -> Result<V::Out, CliError> {
    match cfg.action.space {
        SpaceKind::SelfAction => v.visit(group_space(SelfAction::new(group.clone()), group, cfg)?),
        SpaceKind::RightRegular => v.visit(group_space(RightRegular::new(group.clone()), group, cfg)?),
        SpaceKind::DyadicLine | SpaceKind::DyadicInterval => {
            let t = group
                .thompson()
                .ok_or_else(|| CliError::config("action.space: dyadic actions need a thompson group"))?;
            let n = cfg.action.power.as_ref().map_or(1, |p| p.n);
            if cfg.action.space == SpaceKind::DyadicLine {
                dyadic_space(DyadicLine::new(t), line_points(n), cfg, v)
            } else {
                dyadic_space(DyadicInterval::new(t), interval_points(n), cfg, v)
            }
        }
    }
}

pub(crate) fn group_space<G: CliGroup, A: Action<G = G, Point = G::Elem>>(
    action: A,
    group: &G,
    cfg: &ExperimentConfig,
) -> Result<Space<A>, CliError> {
    let metric = group_metric(group, &cfg.metric)?;
    let scalar: Option<PointProbe<G::Elem, Rational>> = if group.scalar(&group.identity()).is_some() {
        let g = group.clone();
        Some(Box::new(move |x| g.scalar(x)))
    } else {
        None
    };
    let first_letter: Option<PointProbe<G::Elem, i8>> = if group.free().is_some() {
        let g = group.clone();
        Some(Box::new(move |x| g.first_letter(x)))
    } else {
        None
    };
    Ok(Space {
        action,
        metric,
        scalar,
        first_letter,
        default_sample: group.default_sample(),
        default_anchor: group.default_anchor(),
    })
}

/// Integers around zero and the two half points, enough for windows of length `n`.
fn line_points(n: usize) -> Vec<Dyadic> {
    let k = (n as i64 + 2).max(4);
    let mut pts: Vec<Dyadic> = (-k..=k).map(Dyadic::from_int).collect();
    pts.push(Dyadic::frac(1, 1));
    pts.push(Dyadic::frac(-1, 1));
    pts.sort();
    pts
}

/// `j / 2^m` in `(0,1)` with at least `max(7, n + 4)` points.
fn interval_points(n: usize) -> Vec<Dyadic> {
    let want = (n + 4).max(7) as i64;
    let mut m = 1u32;
    while (1i64 << m) - 1 < want {
        m += 1;
    }
    (1..(1i64 << m)).map(|j| Dyadic::frac(j, m)).collect()
}

fn dyadic_space<A, V>(action: A, base: Vec<Dyadic>, cfg: &ExperimentConfig, v: V) -> Result<V::Out, CliError>
where
    A: Action<G = ThompsonGroup, Point = Dyadic> + Clone,
    V: SpaceVisitor,
{
    let metric: Box<dyn Metric<Dyadic>> = match cfg.action.metric {
        PointMetricKind::CappedAbs => Box::new(CappedAbs),
        PointMetricKind::Discrete => Box::new(DiscreteMetric),
    };
    let anchor = base[base.len() / 2].clone();
    match &cfg.action.power {
        None => v.visit(Space {
            action,
            metric,
            scalar: Some(Box::new(|x: &Dyadic| Some(x.to_rational()))),
            first_letter: None,
            default_sample: sample_window(&base, 7),
            default_anchor: anchor,
        }),
        Some(p) => {
            let windows: Vec<Vec<Dyadic>> = base.windows(p.n).map(|w| w.to_vec()).collect();
            let windows = thin(windows, 7);
            match p.kind {
                PowerKind::Tuple => {
                    let pts: Vec<PointTuple<Dyadic>> = windows.into_iter().map(PointTuple).collect();
                    v.visit(Space {
                        default_anchor: pts[pts.len() / 2].clone(),
                        action: TuplePower::new(action, p.n),
                        metric: Box::new(SupMetric::new(metric)),
                        scalar: None,
                        first_letter: None,
                        default_sample: pts,
                    })
                }
                PowerKind::Subsets => {
                    let act = FiniteSubsets::new(action, p.n);
                    let pts = windows
                        .into_iter()
                        .map(|w| act.set(w))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| CliError::config(format!("action: {e}")))?;
                    v.visit(Space {
                        default_anchor: pts[pts.len() / 2].clone(),
                        action: act,
                        metric: Box::new(SupMetric::new(metric)),
                        scalar: None,
                        first_letter: None,
                        default_sample: pts,
                    })
                }
            }
        }
    }
}

/// At most `k` evenly spread entries around the middle.
fn thin<T: Clone>(v: Vec<T>, k: usize) -> Vec<T> {
    if v.len() <= k {
        return v;
    }
    let start = (v.len() - k) / 2;
    v[start..start + k].to_vec()
}

fn sample_window(base: &[Dyadic], k: usize) -> Vec<Dyadic> {
    thin(base.to_vec(), k)
}

/// Sample points from the config, or the space default. `a..b` expands to integers.
pub(crate) fn sample_points<A: Action>(
    space: &Space<A>,
    list: &[String],
    field: &str,
) -> Result<Vec<A::Point>, CliError> {
    if list.is_empty() {
        return Ok(space.default_sample.clone());
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for s in list {
        let texts: Vec<String> = match s.split_once("..") {
            Some((a, b)) if a.trim().parse::<i64>().is_ok() && b.trim().parse::<i64>().is_ok() => {
                let (a, b): (i64, i64) = (a.trim().parse().unwrap(), b.trim().parse().unwrap());
                if b < a || b - a > 100_000 {
                    return Err(CliError::config(format!("{field}: bad range {s:?}")));
                }
                (a..=b).map(|i| i.to_string()).collect()
            }
            _ => vec![s.clone()],
        };
        for t in texts {
            let p = space.action.parse_point(&t).map_err(|e| CliError::config(format!("{field}: {e}")))?;
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

pub(crate) type BoxFn<'a, P, W> = Box<dyn Fn(&P) -> W + Sync + 'a>;

/// Configured functions, or the defaults for the space.
pub(crate) fn function_specs<G: CliGroup>(group: &G, cfg: &ExperimentConfig) -> Vec<FunctionSpec> {
    if !cfg.functions.is_empty() {
        return cfg.functions.clone();
    }
    let on_group = matches!(cfg.action.space, SpaceKind::SelfAction | SpaceKind::RightRegular);
    if on_group && group.free().is_some() {
        vec![FunctionSpec::FirstLetter { letter: 'a' }]
    } else if on_group && group.scalar(&group.identity()).is_some() {
        [1, 2, 5, 10].into_iter().map(|width| FunctionSpec::Valley { width, anchor: None }).collect()
    } else {
        [1, 2].into_iter().map(|width| FunctionSpec::Valley { width, anchor: None }).collect()
    }
}

fn letter_index(c: char) -> Option<i8> {
    if c.is_ascii_lowercase() && c != 'e' {
        Some((c as u8 - b'a' + 1) as i8)
    } else if c.is_ascii_uppercase() && c != 'E' {
        Some(-((c.to_ascii_lowercase() as u8 - b'a' + 1) as i8))
    } else {
        None
    }
}

pub(crate) fn build_function<'a, A: Action, W: Weight>(
    space: &'a Space<A>,
    spec: &FunctionSpec,
    field: &str,
) -> Result<BoxFn<'a, A::Point, W>, CliError> {
    let parse_point = |s: &str| space.action.parse_point(s).map_err(|e| CliError::config(format!("{field}: {e}")));
    match spec {
        FunctionSpec::Valley { width, anchor } => {
            if *width <= 0 {
                return Err(CliError::config(format!("{field}: width must be positive")));
            }
            let a = match anchor {
                Some(s) => parse_point(s)?,
                None => space.default_anchor.clone(),
            };
            let lip = Rational::new(1.into(), (*width).into());
            let tf =
                mcshane_extend(vec![(a, -Rational::one())], lip, Rational::one(), &space.metric, &Rational::zero())
                    .map_err(|e| CliError::config(format!("{field}: {e}")))?;
            Ok(Box::new(move |x| tf.eval_w::<W>(x)))
        }
        FunctionSpec::Mcshane { anchors, lipschitz, cap } => {
            let lip = parse_exact(field, lipschitz)?;
            let cap = parse_exact(field, cap)?;
            let anchors = anchors
                .iter()
                .map(|(p, v)| Ok((parse_point(p)?, parse_exact(field, v)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let tf = mcshane_extend(anchors, lip, cap, &space.metric, &Rational::zero())
                .map_err(|e| CliError::config(format!("{field}: {e}")))?;
            Ok(Box::new(move |x| tf.eval_w::<W>(x)))
        }
        FunctionSpec::Constant { value } => {
            let c = parse_weight::<W>(field, value)?;
            Ok(Box::new(move |_| c.clone()))
        }
        FunctionSpec::ClampedIdentity => {
            let scalar = space
                .scalar
                .as_ref()
                .ok_or_else(|| CliError::config(format!("{field}: clamped-identity needs points on the line")))?;
            Ok(Box::new(move |x| {
                let v = scalar(x).unwrap_or_else(Rational::zero);
                let one = Rational::one();
                W::from_rational(&v.clamp(-one.clone(), one))
            }))
        }
        FunctionSpec::FirstLetter { letter } => {
            let probe = space
                .first_letter
                .as_ref()
                .ok_or_else(|| CliError::config(format!("{field}: first-letter needs free-group points")))?;
            let l = letter_index(*letter).ok_or_else(|| CliError::config(format!("{field}: bad letter {letter:?}")))?;
            Ok(Box::new(move |x| if probe(x) == Some(l) { W::one() } else { W::zero() }))
        }
    }
}

pub(crate) fn build_functions<'a, A: Action, W: Weight>(
    space: &'a Space<A>,
    specs: &[FunctionSpec],
) -> Result<Vec<BoxFn<'a, A::Point, W>>, CliError> {
    specs.iter().enumerate().map(|(i, s)| build_function(space, s, &format!("functions[{i}]"))).collect()
}

/// Letter of a free-group first-letter function, as the core index.
pub(crate) fn first_letter_of(spec: &FunctionSpec) -> Option<i8> {
    match spec {
        FunctionSpec::FirstLetter { letter } => letter_index(*letter),
        _ => None,
    }
}

pub(crate) fn free_word(group: &FreeGroup, s: &str) -> Result<FreeWord, CliError> {
    parse_elem(group, "sample", s)
}
