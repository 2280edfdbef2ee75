//! Groups with exact canonical elements.

mod cyclic;
mod free;
mod lattice;
pub mod thompson;

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use thiserror::Error;

pub use cyclic::{CyclicGroup, Residue};
pub use free::{FreeGroup, FreeWord};
pub use lattice::{LatticeGroup, LatticePoint};
pub use thompson::{
    check_relations, f_generators, gamma, kappa, kappa_inv, PLElement, Piece, RelationsReport, ThompsonGroup, Variant,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cannot parse element {text:?} of {group}: {reason}")]
    Parse { group: String, text: String, reason: String },
    #[error("unknown generator {name:?}; valid: {valid}")]
    UnknownGenerator { name: String, valid: String },
    #[error("generator index {0} out of range")]
    GeneratorIndex(usize),
    #[error("cannot compose a {0} element with a {1} element")]
    MixedVariant(&'static str, &'static str),
    #[error("{value} is outside the domain {domain}")]
    Domain { value: String, domain: &'static str },
    #[error("invalid piecewise-linear data: {0}")]
    InvalidPl(String),
    #[error(
        "unknown group kind {0:?}; valid: integer-lattice(d), free-group(r), thompson-unit, thompson-line, cyclic(n)"
    )]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    IntegerLattice(usize),
    FreeGroup(usize),
    ThompsonUnit,
    ThompsonLine,
    Cyclic(u64),
}

impl Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::IntegerLattice(d) => write!(f, "integer-lattice({d})"),
            GroupKind::FreeGroup(r) => write!(f, "free-group({r})"),
            GroupKind::ThompsonUnit => f.write_str("thompson-unit"),
            GroupKind::ThompsonLine => f.write_str("thompson-line"),
            GroupKind::Cyclic(n) => write!(f, "cyclic({n})"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || GroupError::UnknownKind(s.to_string());
        let arg = |prefix: &str| -> Option<u64> {
            let rest = t.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            rest.trim().parse().ok()
        };
        match t {
            "thompson-unit" => return Ok(GroupKind::ThompsonUnit),
            "thompson-line" => return Ok(GroupKind::ThompsonLine),
            "z" | "integers" => return Ok(GroupKind::IntegerLattice(1)),
            "f2" => return Ok(GroupKind::FreeGroup(2)),
            _ => {}
        }
        if let Some(d) = arg("integer-lattice") {
            if (1..=8).contains(&d) {
                return Ok(GroupKind::IntegerLattice(d as usize));
            }
        }
        if let Some(r) = arg("free-group") {
            if (1..=4).contains(&r) {
                return Ok(GroupKind::FreeGroup(r as usize));
            }
        }
        if let Some(n) = arg("cyclic") {
            if n >= 1 {
                return Ok(GroupKind::Cyclic(n));
            }
        }
        Err(bad())
    }
}

/// Group kind together with its named generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub kind: GroupKind,
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// Word over the generators. `reduced` is set only after free reduction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
    reduced: bool,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters, reduced: false }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new(), reduced: true }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn reduce(mut self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for l in self.letters.drain(..) {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out, reduced: true }
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inv()).collect(), reduced: self.reduced }
    }

    /// Parses `"s t^-1"`; tokens are generator names with an optional `^-1` or `^1`.
    pub fn parse(text: &str, names: &[String]) -> Result<Word, GroupError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "e" && !names.iter().any(|n| n == "e") {
                continue;
            }
            let (name, inverse) = match tok.split_once('^') {
                None => (tok, false),
                Some((n, "-1")) => (n, true),
                Some((n, "1")) => (n, false),
                Some(_) => {
                    return Err(GroupError::Parse {
                        group: "word".into(),
                        text: text.into(),
                        reason: format!("bad exponent in {tok:?}; use ^-1"),
                    })
                }
            };
            let gen = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| GroupError::UnknownGenerator { name: name.to_string(), valid: names.join(", ") })?;
            letters.push(Letter { gen, inverse });
        }
        Ok(Word::new(letters))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "e".to_string();
        }
        self.letters
            .iter()
            .map(|l| {
                let n = names.get(l.gen).cloned().unwrap_or_else(|| format!("g{}", l.gen));
                if l.inverse {
                    format!("{n}^-1")
                } else {
                    n
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub trait Group: Clone + Send + Sync + 'static {
    type Elem: Clone + Eq + Ord + Hash + Debug + Display + Send + Sync + 'static;

    fn descriptor(&self) -> GroupDescriptor;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Generators in descriptor order.
    fn generators(&self) -> Vec<Self::Elem>;
    /// Parses the element's own text form.
    fn parse_elem(&self, s: &str) -> Result<Self::Elem, GroupError>;

    /// Length with respect to the symmetrized standard generators, when cheap.
    fn word_length(&self, _g: &Self::Elem) -> Option<u64> {
        None
    }

    /// All elements, for finite groups.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    fn generator_names(&self) -> Vec<String> {
        self.descriptor().generators
    }

    /// Generators followed by their inverses, duplicates removed, order kept.
    fn symmetric_generators(&self) -> Vec<Self::Elem> {
        let mut out: Vec<Self::Elem> = Vec::new();
        let gens = self.generators();
        for g in gens.iter().cloned().chain(gens.iter().map(|g| self.inv(g))) {
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }

    fn letter(&self, l: Letter) -> Result<Self::Elem, GroupError> {
        let g = self.generators().into_iter().nth(l.gen).ok_or(GroupError::GeneratorIndex(l.gen))?;
        Ok(if l.inverse { self.inv(&g) } else { g })
    }

    /// Left-to-right product of the letters.
    fn word_eval(&self, w: &Word) -> Result<Self::Elem, GroupError> {
        let gens = self.generators();
        let invs: Vec<Self::Elem> = gens.iter().map(|g| self.inv(g)).collect();
        let mut acc = self.identity();
        for l in w.letters() {
            let g = if l.inverse { invs.get(l.gen) } else { gens.get(l.gen) };
            let g = g.ok_or(GroupError::GeneratorIndex(l.gen))?;
            acc = self.mul(&acc, g);
        }
        Ok(acc)
    }

    fn pow(&self, g: &Self::Elem, n: i64) -> Self::Elem {
        let base = if n < 0 { self.inv(g) } else { g.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// Element text, or `word:` followed by a word in the generator names.
    fn parse(&self, s: &str) -> Result<Self::Elem, GroupError> {
        match s.trim().strip_prefix("word:") {
            Some(w) => self.word_eval(&Word::parse(w, &self.generator_names())?),
            None => self.parse_elem(s.trim()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip() {
        for k in [
            GroupKind::IntegerLattice(2),
            GroupKind::FreeGroup(2),
            GroupKind::ThompsonUnit,
            GroupKind::ThompsonLine,
            GroupKind::Cyclic(5),
        ] {
            assert_eq!(k.to_string().parse::<GroupKind>().unwrap(), k);
        }
        assert!("nope".parse::<GroupKind>().is_err());
        assert!("free-group(9)".parse::<GroupKind>().is_err());
    }

    #[test]
    fn word_parse_and_reduce() {
        let names = vec!["s".to_string(), "t".to_string()];
        let w = Word::parse("s t^-1 t s^-1", &names).unwrap();
        assert_eq!(w.len(), 4);
        assert!(!w.is_reduced());
        let r = w.reduce();
        assert!(r.is_empty() && r.is_reduced());
        assert_eq!(Word::parse("s t^-1", &names).unwrap().render(&names), "s t^-1");
        assert!(Word::parse("u", &names).is_err());
        assert!(Word::parse("s^2", &names).is_err());
        assert_eq!(Word::parse("e", &names).unwrap(), Word::new(vec![]));
    }
}
