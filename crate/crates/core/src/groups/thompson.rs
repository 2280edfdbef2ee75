//! Thompson's group F as exact piecewise-affine maps, on `[0,1]` and on the line.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{Group, GroupDescriptor, GroupError, GroupKind};
use crate::dyadic::Dyadic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Unit,
    Line,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Unit => "unit",
            Variant::Line => "line",
        }
    }
}

/// `x -> 2^slope_exp * x + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Piece {
    pub slope_exp: i64,
    pub offset: Dyadic,
}

impl Piece {
    pub fn new(slope_exp: i64, offset: Dyadic) -> Self {
        Piece { slope_exp, offset }
    }

    pub fn eval(&self, x: &Dyadic) -> Dyadic {
        x.scale_pow2(self.slope_exp) + &self.offset
    }

    /// `self ∘ inner`.
    fn after(&self, inner: &Piece) -> Piece {
        Piece {
            slope_exp: self.slope_exp + inner.slope_exp,
            offset: inner.offset.scale_pow2(self.slope_exp) + &self.offset,
        }
    }

    fn inverse(&self) -> Piece {
        Piece { slope_exp: -self.slope_exp, offset: -self.offset.scale_pow2(-self.slope_exp) }
    }
}

/// Piecewise-affine homeomorphism with dyadic breakpoints and slopes `2^k`.
///
/// `pieces[i]` applies between `breaks[i-1]` and `breaks[i]`; the outer
/// pieces run to the domain ends (`0`/`1`, or `±∞` on the line).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PLElement {
    variant: Variant,
    breaks: Vec<Dyadic>,
    pieces: Vec<Piece>,
}

impl PLElement {
    pub fn identity(variant: Variant) -> Self {
        PLElement { variant, breaks: Vec::new(), pieces: vec![Piece::new(0, Dyadic::zero())] }
    }

    /// Validates the data and drops removable breakpoints.
    pub fn new(variant: Variant, breaks: Vec<Dyadic>, pieces: Vec<Piece>) -> Result<Self, GroupError> {
        let bad = |m: String| Err(GroupError::InvalidPl(m));
        if pieces.len() != breaks.len() + 1 {
            return bad(format!("{} breakpoints need {} pieces", breaks.len(), breaks.len() + 1));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return bad("breakpoints must increase strictly".into());
        }
        for (i, b) in breaks.iter().enumerate() {
            if pieces[i].eval(b) != pieces[i + 1].eval(b) {
                return bad(format!("discontinuous at {b}"));
            }
        }
        match variant {
            Variant::Unit => {
                if breaks.iter().any(|b| !b.is_positive() || *b >= Dyadic::one()) {
                    return bad("unit breakpoints must lie in (0,1)".into());
                }
                if !pieces[0].eval(&Dyadic::zero()).is_zero() {
                    return bad("unit map must fix 0".into());
                }
                if pieces.last().unwrap().eval(&Dyadic::one()) != Dyadic::one() {
                    return bad("unit map must fix 1".into());
                }
            }
            Variant::Line => {
                for p in [&pieces[0], pieces.last().unwrap()] {
                    if p.slope_exp != 0 || !p.offset.is_integer() {
                        return bad("line map must be an integer translation on both tails".into());
                    }
                }
            }
        }
        Ok(Self::canonical(variant, breaks, pieces))
    }

    fn canonical(variant: Variant, breaks: Vec<Dyadic>, pieces: Vec<Piece>) -> Self {
        let mut nb: Vec<Dyadic> = Vec::with_capacity(breaks.len());
        let mut np: Vec<Piece> = Vec::with_capacity(pieces.len());
        let mut it = pieces.into_iter();
        np.push(it.next().expect("at least one piece"));
        for (b, p) in breaks.into_iter().zip(it) {
            if np.last() != Some(&p) {
                nb.push(b);
                np.push(p);
            }
        }
        PLElement { variant, breaks: nb, pieces: np }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_identity(&self) -> bool {
        self.breaks.is_empty() && self.pieces[0] == Piece::new(0, Dyadic::zero())
    }

    /// Tail translations `(p, q)` of a line element.
    pub fn tails(&self) -> Option<(BigInt, BigInt)> {
        match self.variant {
            Variant::Unit => None,
            Variant::Line => Some((
                self.pieces[0].offset.numerator().clone(),
                self.pieces.last().unwrap().offset.numerator().clone(),
            )),
        }
    }

    fn piece_at(&self, x: &Dyadic) -> &Piece {
        &self.pieces[self.breaks.partition_point(|b| b < x)]
    }

    fn eval_raw(&self, x: &Dyadic) -> Dyadic {
        self.piece_at(x).eval(x)
    }

    pub fn eval(&self, x: &Dyadic) -> Result<Dyadic, GroupError> {
        if self.variant == Variant::Unit && (x.is_negative() || *x > Dyadic::one()) {
            return Err(GroupError::Domain { value: x.to_string(), domain: "[0,1]" });
        }
        Ok(self.eval_raw(x))
    }

    fn preimage(&self, y: &Dyadic) -> Dyadic {
        let j = self.breaks.partition_point(|b| self.eval_raw(b) < *y);
        self.pieces[j].inverse().eval(y)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PLElement) -> Result<PLElement, GroupError> {
        if self.variant != inner.variant {
            return Err(GroupError::MixedVariant(self.variant.name(), inner.variant.name()));
        }
        let mut cuts: Vec<Dyadic> = inner.breaks.clone();
        cuts.extend(self.breaks.iter().map(|b| inner.preimage(b)));
        cuts.sort();
        cuts.dedup();
        let (lo, hi) = match self.variant {
            Variant::Unit => (Some(Dyadic::zero()), Some(Dyadic::one())),
            Variant::Line => (None, None),
        };
        let mut samples = Vec::with_capacity(cuts.len() + 1);
        if cuts.is_empty() {
            samples.push(match &lo {
                Some(l) => l.midpoint(hi.as_ref().unwrap()),
                None => Dyadic::zero(),
            });
        } else {
            samples.push(match &lo {
                Some(l) => l.midpoint(&cuts[0]),
                None => &cuts[0] - &Dyadic::one(),
            });
            for w in cuts.windows(2) {
                samples.push(w[0].midpoint(&w[1]));
            }
            let last = cuts.last().unwrap();
            samples.push(match &hi {
                Some(h) => last.midpoint(h),
                None => last + &Dyadic::one(),
            });
        }
        let pieces = samples
            .iter()
            .map(|s| {
                let p_in = inner.piece_at(s);
                let y = p_in.eval(s);
                self.piece_at(&y).after(p_in)
            })
            .collect();
        Ok(Self::canonical(self.variant, cuts, pieces))
    }

    pub fn inverse(&self) -> PLElement {
        let breaks = self.breaks.iter().map(|b| self.eval_raw(b)).collect();
        let pieces = self.pieces.iter().map(Piece::inverse).collect();
        PLElement { variant: self.variant, breaks, pieces }
    }

    pub fn parse_text(s: &str) -> Result<PLElement, GroupError> {
        let bad = |m: &str| GroupError::InvalidPl(format!("{m} in {s:?}"));
        let body = s.trim().strip_prefix('<').and_then(|r| r.strip_suffix('>')).ok_or_else(|| bad("missing <...>"))?;
        let mut parts = body.split('|');
        let head: Vec<&str> = parts.next().unwrap_or("").split_whitespace().collect();
        let (variant, tails) = match head.as_slice() {
            ["unit"] => (Variant::Unit, None),
            ["line", p, q] => {
                let p: BigInt = p.parse().map_err(|_| bad("bad tail p"))?;
                let q: BigInt = q.parse().map_err(|_| bad("bad tail q"))?;
                (Variant::Line, Some((p, q)))
            }
            _ => return Err(bad("header must be `unit` or `line p q`")),
        };
        let mut breaks = Vec::new();
        let mut pieces = Vec::new();
        for (i, triple) in parts.enumerate() {
            let f: Vec<&str> = triple.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(bad("each piece needs start,slope_exp,offset"));
            }
            let start_ok = match (i, variant) {
                (0, Variant::Unit) => f[0] == "0",
                (0, Variant::Line) => f[0] == "-inf",
                _ => {
                    breaks.push(f[0].parse::<Dyadic>().map_err(|_| bad("bad breakpoint"))?);
                    true
                }
            };
            if !start_ok {
                return Err(bad("first piece must start at the domain end"));
            }
            let e: i64 = f[1].parse().map_err(|_| bad("bad slope exponent"))?;
            let o: Dyadic = f[2].parse().map_err(|_| bad("bad offset"))?;
            pieces.push(Piece::new(e, o));
        }
        let g = PLElement::new(variant, breaks, pieces)?;
        if g.tails() != tails {
            return Err(bad("tail data disagrees with the pieces"));
        }
        Ok(g)
    }
}

impl fmt::Display for PLElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tails() {
            None => f.write_str("<unit")?,
            Some((p, q)) => write!(f, "<line {p} {q}")?,
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            let start = match i {
                0 if self.variant == Variant::Unit => "0".to_string(),
                0 => "-inf".to_string(),
                _ => self.breaks[i - 1].to_string(),
            };
            write!(f, "|{},{},{}", start, piece.slope_exp, piece.offset)?;
        }
        f.write_str(">")
    }
}

/// The generators `(σ, τ)` of F in the requested realization.
pub fn f_generators(variant: Variant) -> (PLElement, PLElement) {
    let d = Dyadic::frac;
    let p = Piece::new;
    let build = |b: Vec<Dyadic>, ps: Vec<Piece>| PLElement::new(variant, b, ps).expect("generator table");
    match variant {
        Variant::Unit => (
            build(vec![d(1, 1), d(3, 2)], vec![p(-1, d(0, 0)), p(0, d(-1, 2)), p(1, d(-1, 0))]),
            build(vec![d(1, 1), d(3, 2), d(7, 3)], vec![p(0, d(0, 0)), p(-1, d(1, 2)), p(0, d(-1, 3)), p(1, d(-1, 0))]),
        ),
        Variant::Line => (
            build(vec![], vec![p(0, d(-1, 0))]),
            build(vec![d(0, 0), d(2, 0)], vec![p(0, d(0, 0)), p(-1, d(0, 0)), p(0, d(-1, 0))]),
        ),
    }
}

fn compose_all(variant: Variant, parts: &[&PLElement]) -> PLElement {
    parts.iter().fold(PLElement::identity(variant), |acc, g| acc.compose(g).expect("same variant"))
}

fn power(g: &PLElement, n: i64) -> PLElement {
    let base = if n < 0 { g.inverse() } else { g.clone() };
    (0..n.unsigned_abs()).fold(PLElement::identity(g.variant), |acc, _| acc.compose(&base).expect("same variant"))
}

/// `γ₀ = σ`, `γₙ = σ^{1−n} τ σ^{n−1}`.
pub fn gamma(n: u32, variant: Variant) -> PLElement {
    let (s, t) = f_generators(variant);
    if n == 0 {
        return s;
    }
    let k = n as i64 - 1;
    compose_all(variant, &[&power(&s, -k), &t, &power(&s, k)])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationRow {
    pub name: String,
    pub holds: bool,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaRow {
    pub m: u32,
    pub n: u32,
    pub equals_gamma_n: bool,
    pub equals_gamma_n_plus_1: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationsReport {
    pub variant: Variant,
    pub commutators: Vec<RelationRow>,
    pub gamma: Vec<GammaRow>,
}

impl RelationsReport {
    pub fn commutators_hold(&self) -> bool {
        self.commutators.iter().all(|r| r.holds)
    }
}

fn commutator(x: &PLElement, y: &PLElement) -> PLElement {
    compose_all(x.variant, &[&x.inverse(), &y.inverse(), x, y])
}

/// Evaluates both defining commutators and `γₘ⁻¹γₙγₘ` for the given pairs.
pub fn check_relations(variant: Variant, gamma_pairs: &[(u32, u32)]) -> RelationsReport {
    let (s, t) = f_generators(variant);
    let st = s.compose(&t.inverse()).expect("same variant");
    let c1 = commutator(&st, &gamma(2, variant));
    let c2 = commutator(&st, &gamma(3, variant));
    let commutators = vec![
        RelationRow {
            name: "[sigma tau^-1, sigma^-1 tau sigma]".into(),
            holds: c1.is_identity(),
            value: c1.to_string(),
        },
        RelationRow {
            name: "[sigma tau^-1, sigma^-2 tau sigma^2]".into(),
            holds: c2.is_identity(),
            value: c2.to_string(),
        },
    ];
    let gamma_rows = gamma_pairs
        .iter()
        .map(|&(m, n)| {
            let gm = gamma(m, variant);
            let conj = compose_all(variant, &[&gm.inverse(), &gamma(n, variant), &gm]);
            GammaRow {
                m,
                n,
                equals_gamma_n: conj == gamma(n, variant),
                equals_gamma_n_plus_1: conj == gamma(n + 1, variant),
            }
        })
        .collect();
    RelationsReport { variant, commutators, gamma: gamma_rows }
}

fn t_n(n: i64) -> Dyadic {
    if n >= 0 {
        Dyadic::one() - Dyadic::one().scale_pow2(-(n + 1))
    } else {
        Dyadic::one().scale_pow2(n - 1)
    }
}

/// The equivariant bijection `(0,1) -> R`, affine on each `[tₙ, tₙ₊₁]`.
pub fn kappa(x: &Dyadic) -> Result<Dyadic, GroupError> {
    if !x.is_positive() || *x >= Dyadic::one() {
        return Err(GroupError::Domain { value: x.to_string(), domain: "(0,1)" });
    }
    let half = Dyadic::frac(1, 1);
    let n = if *x >= half {
        let u = Dyadic::one() - x;
        -u.ceil_log2() - 1
    } else {
        x.floor_log2() + 1
    };
    let width_exp = if n >= 0 { -(n + 2) } else { n - 1 };
    Ok((x - &t_n(n)).scale_pow2(-width_exp) + Dyadic::from_int(n))
}

pub fn kappa_inv(y: &Dyadic) -> Dyadic {
    let n = y.floor().to_i64().expect("kappa_inv argument within i64 range");
    let frac = y - &Dyadic::from_int(n);
    let width_exp = if n >= 0 { -(n + 2) } else { n - 1 };
    t_n(n) + frac.scale_pow2(width_exp)
}

/// F acting in one realization; generators are named `sigma` and `tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThompsonGroup {
    variant: Variant,
    gens: Vec<PLElement>,
}

impl ThompsonGroup {
    pub fn new(variant: Variant) -> Self {
        let (s, t) = f_generators(variant);
        ThompsonGroup { variant, gens: vec![s, t] }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn sigma(&self) -> &PLElement {
        &self.gens[0]
    }

    pub fn tau(&self) -> &PLElement {
        &self.gens[1]
    }
}

impl Group for ThompsonGroup {
    type Elem = PLElement;

    fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor {
            kind: match self.variant {
                Variant::Unit => GroupKind::ThompsonUnit,
                Variant::Line => GroupKind::ThompsonLine,
            },
            generators: vec!["sigma".into(), "tau".into()],
        }
    }

    fn identity(&self) -> PLElement {
        PLElement::identity(self.variant)
    }

    fn mul(&self, a: &PLElement, b: &PLElement) -> PLElement {
        a.compose(b).expect("elements of one Thompson group share a variant")
    }

    fn inv(&self, a: &PLElement) -> PLElement {
        a.inverse()
    }

    fn generators(&self) -> Vec<PLElement> {
        self.gens.clone()
    }

    fn parse_elem(&self, s: &str) -> Result<PLElement, GroupError> {
        let g = PLElement::parse_text(s)?;
        if g.variant != self.variant {
            return Err(GroupError::MixedVariant(self.variant.name(), g.variant.name()));
        }
        Ok(g)
    }
}
