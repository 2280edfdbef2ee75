//! Distances used by Lipschitz test functions and the flat norm.

use num_traits::One;

use crate::weight::{rat_int, Rational};

pub trait Metric<P>: Send + Sync {
    fn distance(&self, x: &P, y: &P) -> Rational;

    /// `min(d, 2)`; only this is needed for 1-bounded test functions.
    fn capped_distance(&self, x: &P, y: &P) -> Rational {
        let d = self.distance(x, y);
        let two = rat_int(2);
        if d > two {
            two
        } else {
            d
        }
    }

    fn kind(&self) -> String;

    /// All distances are integers.
    fn integer_valued(&self) -> bool {
        false
    }

    /// Distinct points may sit at distance zero.
    fn is_pseudometric(&self) -> bool {
        false
    }

    /// Candidates containing every `y` with `d(x, y) = 1`, when cheap to list.
    fn unit_neighbors(&self, _x: &P) -> Option<Vec<P>> {
        None
    }
}

impl<P, M: Metric<P> + ?Sized> Metric<P> for Box<M> {
    fn distance(&self, x: &P, y: &P) -> Rational {
        (**self).distance(x, y)
    }
    fn capped_distance(&self, x: &P, y: &P) -> Rational {
        (**self).capped_distance(x, y)
    }
    fn kind(&self) -> String {
        (**self).kind()
    }
    fn integer_valued(&self) -> bool {
        (**self).integer_valued()
    }
    fn is_pseudometric(&self) -> bool {
        (**self).is_pseudometric()
    }
    fn unit_neighbors(&self, x: &P) -> Option<Vec<P>> {
        (**self).unit_neighbors(x)
    }
}

impl<P, M: Metric<P> + ?Sized> Metric<P> for &M {
    fn distance(&self, x: &P, y: &P) -> Rational {
        (**self).distance(x, y)
    }
    fn capped_distance(&self, x: &P, y: &P) -> Rational {
        (**self).capped_distance(x, y)
    }
    fn kind(&self) -> String {
        (**self).kind()
    }
    fn integer_valued(&self) -> bool {
        (**self).integer_valued()
    }
    fn is_pseudometric(&self) -> bool {
        (**self).is_pseudometric()
    }
    fn unit_neighbors(&self, x: &P) -> Option<Vec<P>> {
        (**self).unit_neighbors(x)
    }
}

/// `d(x, y) = [x != y]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiscreteMetric;

impl<P: Eq> Metric<P> for DiscreteMetric {
    fn distance(&self, x: &P, y: &P) -> Rational {
        if x == y {
            Rational::from_integer(0.into())
        } else {
            Rational::one()
        }
    }

    fn kind(&self) -> String {
        "discrete".into()
    }

    fn integer_valued(&self) -> bool {
        true
    }
}
