//! Group actions on countable sets, point metrics and orbit exploration.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::groups::{kappa, kappa_inv, Group, GroupError, Letter, ThompsonGroup, Variant, Word};
use crate::metric::Metric;
use crate::weight::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("point {point} is not in {space}")]
    Domain { point: String, space: String },
    #[error("cannot parse point {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

pub trait Action: Send + Sync {
    type G: Group;
    type Point: Clone + Eq + Ord + Hash + Debug + Display + Send + Sync + 'static;

    fn group(&self) -> &Self::G;
    fn act(&self, g: &<Self::G as Group>::Elem, x: &Self::Point) -> Result<Self::Point, ActionError>;
    fn parse_point(&self, s: &str) -> Result<Self::Point, ActionError>;
    fn kind(&self) -> String;
}

/// Splits on `sep` outside of brackets.
pub fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' | '<' => depth += 1,
            ')' | ']' | '}' | '>' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// `g . x = g x`.
#[derive(Debug, Clone)]
pub struct SelfAction<G> {
    group: G,
}

impl<G: Group> SelfAction<G> {
    pub fn new(group: G) -> Self {
        SelfAction { group }
    }
}

impl<G: Group> Action for SelfAction<G> {
    type G = G;
    type Point = G::Elem;

    fn group(&self) -> &G {
        &self.group
    }
    fn act(&self, g: &G::Elem, x: &G::Elem) -> Result<G::Elem, ActionError> {
        Ok(self.group.mul(g, x))
    }
    fn parse_point(&self, s: &str) -> Result<G::Elem, ActionError> {
        Ok(self.group.parse(s)?)
    }
    fn kind(&self) -> String {
        "self-action".into()
    }
}

/// `g . x = x g^-1`.
#[derive(Debug, Clone)]
pub struct RightRegular<G> {
    group: G,
}

impl<G: Group> RightRegular<G> {
    pub fn new(group: G) -> Self {
        RightRegular { group }
    }
}

impl<G: Group> Action for RightRegular<G> {
    type G = G;
    type Point = G::Elem;

    fn group(&self) -> &G {
        &self.group
    }
    fn act(&self, g: &G::Elem, x: &G::Elem) -> Result<G::Elem, ActionError> {
        Ok(self.group.mul(x, &self.group.inv(g)))
    }
    fn parse_point(&self, s: &str) -> Result<G::Elem, ActionError> {
        Ok(self.group.parse(s)?)
    }
    fn kind(&self) -> String {
        "right-regular".into()
    }
}

fn parse_dyadic(s: &str) -> Result<Dyadic, ActionError> {
    s.trim()
        .parse()
        .map_err(|e: crate::dyadic::ParseDyadicError| ActionError::Parse { text: s.to_string(), reason: e.to_string() })
}

/// F on the dyadic rationals of the line. Unit-variant elements act through κ.
#[derive(Debug, Clone)]
pub struct DyadicLine {
    group: ThompsonGroup,
}

impl DyadicLine {
    pub fn new(group: ThompsonGroup) -> Self {
        DyadicLine { group }
    }
}

impl Action for DyadicLine {
    type G = ThompsonGroup;
    type Point = Dyadic;

    fn group(&self) -> &ThompsonGroup {
        &self.group
    }
    fn act(&self, g: &crate::groups::PLElement, x: &Dyadic) -> Result<Dyadic, ActionError> {
        match g.variant() {
            Variant::Line => Ok(g.eval(x)?),
            Variant::Unit => Ok(kappa(&g.eval(&kappa_inv(x))?)?),
        }
    }
    fn parse_point(&self, s: &str) -> Result<Dyadic, ActionError> {
        parse_dyadic(s)
    }
    fn kind(&self) -> String {
        "dyadic-line".into()
    }
}

/// F on `D = (0,1) ∩ Z[1/2]`. Line-variant elements act through κ.
#[derive(Debug, Clone)]
pub struct DyadicInterval {
    group: ThompsonGroup,
}

impl DyadicInterval {
    pub fn new(group: ThompsonGroup) -> Self {
        DyadicInterval { group }
    }
}

impl Action for DyadicInterval {
    type G = ThompsonGroup;
    type Point = Dyadic;

    fn group(&self) -> &ThompsonGroup {
        &self.group
    }
    fn act(&self, g: &crate::groups::PLElement, x: &Dyadic) -> Result<Dyadic, ActionError> {
        if !x.is_positive() || *x >= Dyadic::one() {
            return Err(ActionError::Domain { point: x.to_string(), space: self.kind() });
        }
        match g.variant() {
            Variant::Unit => Ok(g.eval(x)?),
            Variant::Line => Ok(kappa_inv(&g.eval(&kappa(x)?)?)),
        }
    }
    fn parse_point(&self, s: &str) -> Result<Dyadic, ActionError> {
        let x = parse_dyadic(s)?;
        if !x.is_positive() || x >= Dyadic::one() {
            return Err(ActionError::Domain { point: x.to_string(), space: self.kind() });
        }
        Ok(x)
    }
    fn kind(&self) -> String {
        "dyadic-interval".into()
    }
}

/// Point of `X^n`, shown as `(x1,...,xn)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointTuple<P>(pub Vec<P>);

impl<P: Display> Display for PointTuple<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Sorted duplicate-free n-subset, shown as `{x1,...,xn}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet<P>(Vec<P>);

impl<P: Ord> PointSet<P> {
    /// Sorts; returns `None` on duplicates.
    pub fn new(mut pts: Vec<P>) -> Option<Self> {
        pts.sort();
        if pts.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(PointSet(pts))
    }

    pub fn elements(&self) -> &[P] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<P: Display> Display for PointSet<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn parse_list(s: &str, open: char, close: char) -> Option<Vec<&str>> {
    let inner = s.trim().strip_prefix(open)?.strip_suffix(close)?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    Some(split_top_level(inner, ',').into_iter().map(str::trim).collect())
}

#[derive(Debug, Clone)]
pub struct TuplePower<A> {
    base: A,
    n: usize,
}

impl<A: Action> TuplePower<A> {
    pub fn new(base: A, n: usize) -> Self {
        TuplePower { base, n }
    }

    pub fn base(&self) -> &A {
        &self.base
    }
}

impl<A: Action> Action for TuplePower<A> {
    type G = A::G;
    type Point = PointTuple<A::Point>;

    fn group(&self) -> &A::G {
        self.base.group()
    }
    fn act(&self, g: &<A::G as Group>::Elem, x: &Self::Point) -> Result<Self::Point, ActionError> {
        if x.0.len() != self.n {
            return Err(ActionError::Domain { point: x.to_string(), space: self.kind() });
        }
        Ok(PointTuple(x.0.iter().map(|p| self.base.act(g, p)).collect::<Result<_, _>>()?))
    }
    fn parse_point(&self, s: &str) -> Result<Self::Point, ActionError> {
        let bad = |r: &str| ActionError::Parse { text: s.to_string(), reason: r.to_string() };
        let parts = parse_list(s, '(', ')').ok_or_else(|| bad("expected (x1,...,xn)"))?;
        if parts.len() != self.n {
            return Err(bad("wrong number of coordinates"));
        }
        Ok(PointTuple(parts.into_iter().map(|p| self.base.parse_point(p)).collect::<Result<_, _>>()?))
    }
    fn kind(&self) -> String {
        format!("tuple-power({},{})", self.base.kind(), self.n)
    }
}

#[derive(Debug, Clone)]
pub struct FiniteSubsets<A> {
    base: A,
    n: usize,
}

impl<A: Action> FiniteSubsets<A> {
    pub fn new(base: A, n: usize) -> Self {
        FiniteSubsets { base, n }
    }

    pub fn base(&self) -> &A {
        &self.base
    }

    pub fn set(&self, pts: Vec<A::Point>) -> Result<PointSet<A::Point>, ActionError> {
        let text = format!("{}", PointTuple(pts.clone()));
        match PointSet::new(pts) {
            Some(s) if s.len() == self.n => Ok(s),
            _ => Err(ActionError::Domain { point: text, space: self.kind() }),
        }
    }
}

impl<A: Action> Action for FiniteSubsets<A> {
    type G = A::G;
    type Point = PointSet<A::Point>;

    fn group(&self) -> &A::G {
        self.base.group()
    }
    fn act(&self, g: &<A::G as Group>::Elem, x: &Self::Point) -> Result<Self::Point, ActionError> {
        let img: Vec<A::Point> = x.0.iter().map(|p| self.base.act(g, p)).collect::<Result<_, _>>()?;
        self.set(img)
    }
    fn parse_point(&self, s: &str) -> Result<Self::Point, ActionError> {
        let parts = parse_list(s, '{', '}')
            .ok_or_else(|| ActionError::Parse { text: s.to_string(), reason: "expected {x1,...,xn}".into() })?;
        let pts = parts.into_iter().map(|p| self.base.parse_point(p)).collect::<Result<_, _>>()?;
        self.set(pts)
    }
    fn kind(&self) -> String {
        format!("finite-subsets({},{})", self.base.kind(), self.n)
    }
}

/// `min(1, |x - y|)` on dyadics.
#[derive(Debug, Clone, Copy, Default)]
pub struct CappedAbs;

impl Metric<Dyadic> for CappedAbs {
    fn distance(&self, x: &Dyadic, y: &Dyadic) -> Rational {
        let d = (x - y).abs().to_rational();
        if d > Rational::one() {
            Rational::one()
        } else {
            d
        }
    }
    fn kind(&self) -> String {
        "capped-abs".into()
    }
}

/// `|x - y|` on dyadics (unbounded).
#[derive(Debug, Clone, Copy, Default)]
pub struct AbsDiff;

impl Metric<Dyadic> for AbsDiff {
    fn distance(&self, x: &Dyadic, y: &Dyadic) -> Rational {
        (x - y).to_rational().abs()
    }
    fn kind(&self) -> String {
        "absolute-difference".into()
    }
}

/// Supremum of coordinate distances on tuples and on sorted subsets.
#[derive(Debug, Clone)]
pub struct SupMetric<M> {
    pub base: M,
}

impl<M> SupMetric<M> {
    pub fn new(base: M) -> Self {
        SupMetric { base }
    }
}

fn sup_of<P, M: Metric<P>>(base: &M, xs: &[P], ys: &[P]) -> Rational {
    xs.iter().zip(ys).map(|(a, b)| base.distance(a, b)).fold(Rational::from_integer(0.into()), |acc, d| {
        if d > acc {
            d
        } else {
            acc
        }
    })
}

impl<P, M: Metric<P>> Metric<PointTuple<P>> for SupMetric<M> {
    fn distance(&self, x: &PointTuple<P>, y: &PointTuple<P>) -> Rational {
        sup_of(&self.base, &x.0, &y.0)
    }
    fn kind(&self) -> String {
        format!("sup({})", self.base.kind())
    }
    fn integer_valued(&self) -> bool {
        self.base.integer_valued()
    }
}

impl<P, M: Metric<P>> Metric<PointSet<P>> for SupMetric<M> {
    fn distance(&self, x: &PointSet<P>, y: &PointSet<P>) -> Rational {
        sup_of(&self.base, &x.0, &y.0)
    }
    fn kind(&self) -> String {
        format!("sup({})", self.base.kind())
    }
    fn integer_valued(&self) -> bool {
        self.base.integer_valued()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitResult<P> {
    /// Points with their BFS layer, in discovery order.
    pub points: Vec<(P, u32)>,
    pub truncated: bool,
}

/// Breadth-first orbit exploration, stopping once `cap` points are known.
pub fn orbit_bfs<A: Action>(
    action: &A,
    x0: &A::Point,
    gens: &[<A::G as Group>::Elem],
    cap: usize,
) -> Result<OrbitResult<A::Point>, ActionError> {
    let cap = cap.max(1);
    let mut seen: HashSet<A::Point> = HashSet::new();
    let mut points = vec![(x0.clone(), 0u32)];
    seen.insert(x0.clone());
    let mut head = 0;
    while head < points.len() {
        let (x, layer) = points[head].clone();
        head += 1;
        for g in gens {
            let y = action.act(g, &x)?;
            if seen.contains(&y) {
                continue;
            }
            if points.len() >= cap {
                return Ok(OrbitResult { points, truncated: true });
            }
            seen.insert(y.clone());
            points.push((y, layer + 1));
        }
    }
    Ok(OrbitResult { points, truncated: false })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// `word . A = B`.
    Found(Word),
    /// Inconclusive: the search stopped before reaching `B`.
    NotFound { explored: usize, depth: u32, truncated: bool },
}

/// Searches for a word moving `a` to `b` by BFS over generator letters.
pub fn transitivity_probe<A: Action>(
    action: &A,
    a: &A::Point,
    b: &A::Point,
    max_depth: u32,
    max_nodes: usize,
) -> Result<ProbeOutcome, ActionError> {
    if a == b {
        return Ok(ProbeOutcome::Found(Word::empty()));
    }
    let group = action.group();
    let mut letters = Vec::new();
    for (i, g) in group.generators().iter().enumerate() {
        letters.push((Letter { gen: i, inverse: false }, g.clone()));
        letters.push((Letter { gen: i, inverse: true }, group.inv(g)));
    }
    let mut parent: HashMap<A::Point, Option<(A::Point, Letter)>> = HashMap::new();
    parent.insert(a.clone(), None);
    let mut queue = VecDeque::from([(a.clone(), 0u32)]);
    let mut depth_reached = 0;
    let mut truncated = false;
    while let Some((x, depth)) = queue.pop_front() {
        depth_reached = depth_reached.max(depth);
        if depth >= max_depth {
            truncated = true;
            continue;
        }
        for (l, g) in &letters {
            let y = action.act(g, &x)?;
            if parent.contains_key(&y) {
                continue;
            }
            parent.insert(y.clone(), Some((x.clone(), *l)));
            if &y == b {
                let mut applied = Vec::new();
                let mut cur = y;
                while let Some(Some((prev, l))) = parent.get(&cur) {
                    applied.push(*l);
                    cur = prev.clone();
                }
                return Ok(ProbeOutcome::Found(Word::new(applied).reduce()));
            }
            if parent.len() >= max_nodes {
                return Ok(ProbeOutcome::NotFound { explored: parent.len(), depth: depth_reached, truncated: true });
            }
            queue.push_back((y, depth + 1));
        }
    }
    Ok(ProbeOutcome::NotFound { explored: parent.len(), depth: depth_reached, truncated })
}

/// `κ(g_unit x) == g_line κ(x)` for a word in `sigma`, `tau`.
pub fn equivariance_check_kappa(w: &Word, x: &Dyadic) -> Result<bool, ActionError> {
    let unit = ThompsonGroup::new(Variant::Unit);
    let line = ThompsonGroup::new(Variant::Line);
    let gu = unit.word_eval(w)?;
    let gl = line.word_eval(w)?;
    let lhs = kappa(&gu.eval(x)?)?;
    let rhs = gl.eval(&kappa(x)?)?;
    Ok(lhs == rhs)
}
