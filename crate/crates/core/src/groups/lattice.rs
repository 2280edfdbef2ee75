use std::fmt;

use super::{Group, GroupDescriptor, GroupError, GroupKind};

/// Point of `Z^d`. Shown as `3` when `d = 1`, else `(1,-2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn l1(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGroup {
    dim: usize,
}

impl LatticeGroup {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "lattice dimension must be positive");
        LatticeGroup { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, coords: &[i64]) -> LatticePoint {
        assert_eq!(coords.len(), self.dim);
        LatticePoint(coords.to_vec())
    }

    /// Shorthand for `Z`.
    pub fn int(n: i64) -> LatticePoint {
        LatticePoint(vec![n])
    }
}

impl Group for LatticeGroup {
    type Elem = LatticePoint;

    fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor {
            kind: GroupKind::IntegerLattice(self.dim),
            generators: (1..=self.dim).map(|i| format!("e{i}")).collect(),
        }
    }

    fn identity(&self) -> LatticePoint {
        LatticePoint(vec![0; self.dim])
    }

    fn mul(&self, a: &LatticePoint, b: &LatticePoint) -> LatticePoint {
        LatticePoint(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    fn inv(&self, a: &LatticePoint) -> LatticePoint {
        LatticePoint(a.0.iter().map(|x| -x).collect())
    }

    fn generators(&self) -> Vec<LatticePoint> {
        (0..self.dim)
            .map(|i| {
                let mut v = vec![0; self.dim];
                v[i] = 1;
                LatticePoint(v)
            })
            .collect()
    }

    fn parse_elem(&self, s: &str) -> Result<LatticePoint, GroupError> {
        let err = |reason: &str| GroupError::Parse {
            group: self.descriptor().kind.to_string(),
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        let inner = match t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            Some(i) => i,
            None if self.dim == 1 => t,
            None => return Err(err("expected (x1,...,xd)")),
        };
        let coords: Result<Vec<i64>, _> = inner.split(',').map(|c| c.trim().parse::<i64>()).collect();
        let coords = coords.map_err(|_| err("bad integer coordinate"))?;
        if coords.len() != self.dim {
            return Err(err("wrong number of coordinates"));
        }
        Ok(LatticePoint(coords))
    }

    fn word_length(&self, g: &LatticePoint) -> Option<u64> {
        Some(g.l1())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_addition() {
        let g = LatticeGroup::new(2);
        assert_eq!(g.mul(&g.point(&[1, 0]), &g.point(&[0, 1])), g.point(&[1, 1]));
        assert_eq!(g.point(&[1, -2]).to_string(), "(1,-2)");
        assert_eq!(g.parse("(1,-2)").unwrap(), g.point(&[1, -2]));
        assert_eq!(g.parse("word:e1 e2^-1 e2^-1").unwrap(), g.point(&[1, -2]));
        assert!(g.parse("(1)").is_err());
    }

    #[test]
    fn z_text() {
        let g = LatticeGroup::new(1);
        assert_eq!(LatticeGroup::int(-3).to_string(), "-3");
        assert_eq!(g.parse("-3").unwrap(), LatticeGroup::int(-3));
        assert_eq!(g.word_length(&LatticeGroup::int(-3)), Some(3));
    }
}
