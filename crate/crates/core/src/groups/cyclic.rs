use std::fmt;

use super::{Group, GroupDescriptor, GroupError, GroupKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue(pub u64);

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `Z/nZ` with generator `g = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicGroup {
    n: u64,
}

impl CyclicGroup {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "cyclic order must be positive");
        CyclicGroup { n }
    }

    pub fn order(&self) -> u64 {
        self.n
    }
}

impl Group for CyclicGroup {
    type Elem = Residue;

    fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor { kind: GroupKind::Cyclic(self.n), generators: vec!["g".into()] }
    }

    fn identity(&self) -> Residue {
        Residue(0)
    }

    fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        Residue(((a.0 as u128 + b.0 as u128) % self.n as u128) as u64)
    }

    fn inv(&self, a: &Residue) -> Residue {
        Residue((self.n - a.0 % self.n) % self.n)
    }

    fn generators(&self) -> Vec<Residue> {
        vec![Residue(1 % self.n)]
    }

    fn parse_elem(&self, s: &str) -> Result<Residue, GroupError> {
        let v: i128 = s.trim().parse().map_err(|_| GroupError::Parse {
            group: self.descriptor().kind.to_string(),
            text: s.to_string(),
            reason: "expected an integer".into(),
        })?;
        Ok(Residue(v.rem_euclid(self.n as i128) as u64))
    }

    fn word_length(&self, g: &Residue) -> Option<u64> {
        Some(g.0.min(self.n - g.0))
    }

    fn elements(&self) -> Option<Vec<Residue>> {
        Some((0..self.n).map(Residue).collect())
    }
}
