//! Dyadic rationals `m / 2^k` in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed dyadic {text:?}: {reason}")]
pub struct ParseDyadicError {
    pub text: String,
    pub reason: &'static str,
}

/// Exact value `num / 2^exp`. Either `exp == 0` or `num` is odd.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.canonicalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: BigInt::from(n), exp: 0 }
    }

    /// `num / 2^exp` for small literals.
    pub fn frac(num: i64, exp: u32) -> Self {
        Dyadic::new(BigInt::from(num), exp)
    }

    pub fn zero() -> Self {
        Dyadic::from_int(0)
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        if self.exp == 0 {
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64) as u32;
        if shift > 0 {
            self.num >>= shift;
            self.exp -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    /// Exact `self * 2^k`.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        if k >= 0 {
            let k = k as u64;
            if k <= self.exp as u64 {
                Dyadic::new(self.num.clone(), self.exp - k as u32)
            } else {
                let extra = k - self.exp as u64;
                Dyadic { num: &self.num << extra, exp: 0 }
            }
        } else {
            let e = self.exp as i64 - k;
            Dyadic::new(self.num.clone(), u32::try_from(e).expect("dyadic exponent overflow"))
        }
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.exp == 0 {
            return self.num.clone();
        }
        let den = BigInt::one() << self.exp;
        self.num.div_floor(&den)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    /// Returns `None` unless the denominator is a power of two.
    pub fn from_rational(r: &BigRational) -> Option<Self> {
        let den = r.denom();
        if !den.is_positive() {
            return None;
        }
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(r.numer().clone(), u32::try_from(tz).ok()?))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Floor of log2 |x| for x != 0.
    pub fn floor_log2(&self) -> i64 {
        assert!(!self.is_zero(), "floor_log2 of zero");
        self.num.abs().bits() as i64 - 1 - self.exp as i64
    }

    /// Ceiling of log2 |x| for x != 0.
    pub fn ceil_log2(&self) -> i64 {
        assert!(!self.is_zero(), "ceil_log2 of zero");
        let a = self.num.abs();
        let c = if a.is_one() { 0 } else { (a - 1u32).bits() as i64 };
        c - self.exp as i64
    }

    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        (self + other).scale_pow2(-1)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.exp == other.exp {
            return self.num.cmp(&other.num);
        }
        if self.exp > other.exp {
            let o = &other.num << (self.exp - other.exp);
            self.num.cmp(&o)
        } else {
            let s = &self.num << (other.exp - self.exp);
            s.cmp(&other.num)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_impl(a: &Dyadic, b: &Dyadic, negate_b: bool) -> Dyadic {
    let e = a.exp.max(b.exp);
    let an = &a.num << (e - a.exp);
    let bn = &b.num << (e - b.exp);
    let n = if negate_b { an - bn } else { an + bn };
    Dyadic::new(n, e)
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        add_impl(self, rhs, false)
    }
}

impl Sub<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        add_impl(self, rhs, true)
    }
}

impl Mul<&Dyadic> for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseDyadicError { text: s.to_string(), reason };
        let t = s.trim();
        if t.is_empty() {
            return Err(err("empty"));
        }
        let int = |x: &str| -> Result<BigInt, ParseDyadicError> {
            let ok = !x.is_empty() && x.strip_prefix('-').unwrap_or(x).chars().all(|c| c.is_ascii_digit()) && x != "-";
            if !ok {
                return Err(err("bad integer"));
            }
            x.parse::<BigInt>().map_err(|_| err("bad integer"))
        };
        match t.split_once('/') {
            None => Ok(Dyadic::new(int(t)?, 0)),
            Some((n, d)) => {
                let k = match d.strip_prefix("2^") {
                    Some(k) => {
                        if k.is_empty() || !k.chars().all(|c| c.is_ascii_digit()) {
                            return Err(err("bad exponent"));
                        }
                        k.parse::<u32>().map_err(|_| err("exponent too large"))?
                    }
                    None => {
                        let den: u64 = d
                            .chars()
                            .all(|c| c.is_ascii_digit())
                            .then(|| d.parse().ok())
                            .flatten()
                            .ok_or_else(|| err("bad denominator"))?;
                        if !den.is_power_of_two() {
                            return Err(err("denominator must be a power of two"));
                        }
                        den.trailing_zeros()
                    }
                };
                Ok(Dyadic::new(int(n)?, k))
            }
        }
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(Dyadic::frac(1, 1) + Dyadic::frac(1, 2), Dyadic::frac(3, 2));
        let z = Dyadic::frac(3, 2) - Dyadic::frac(3, 2);
        assert!(z.is_zero());
        assert_eq!(z.exponent(), 0);
        assert_eq!(Dyadic::frac(5, 3) * Dyadic::from_int(2), Dyadic::frac(5, 2));
    }

    #[test]
    fn scaling() {
        assert_eq!(Dyadic::frac(3, 2).scale_pow2(-1), Dyadic::frac(3, 3));
        assert_eq!(Dyadic::one().scale_pow2(3), Dyadic::from_int(8));
        assert_eq!(Dyadic::frac(7, 3).scale_pow2(3), Dyadic::from_int(7));
        assert_eq!(Dyadic::frac(3, 0).scale_pow2(5), Dyadic::from_int(96));
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(d("3/2^2"), Dyadic::frac(3, 2));
        let m5 = d("-5");
        assert_eq!(m5.numerator(), &BigInt::from(-5));
        assert_eq!(m5.exponent(), 0);
        assert_eq!(Dyadic::frac(3, 3).to_string(), "3/2^3");
        assert_eq!(d("4/2^2").to_string(), "1");
        assert_eq!(d("1/2^1").to_string(), "1/2^1");
        assert_eq!(d("3/4"), Dyadic::frac(3, 2));
        assert_eq!(d("-1/1"), Dyadic::from_int(-1));
        for bad in ["", "x", "3/6", "1/0", "1/+4", "1/2^", "1/2^-1", "--1", "-", "1.5", "2^3"] {
            assert!(bad.parse::<Dyadic>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn floor_and_logs() {
        assert_eq!(d("-1/2^1").floor(), BigInt::from(-1));
        assert_eq!(d("7/2^1").floor(), BigInt::from(3));
        assert_eq!(d("3/2^3").floor_log2(), -2);
        assert_eq!(d("3/2^3").ceil_log2(), -1);
        assert_eq!(d("1/2^2").ceil_log2(), -2);
        assert_eq!(d("1/2^2").floor_log2(), -2);
    }

    #[test]
    fn rational_bridge() {
        let r = BigRational::new(BigInt::from(6), BigInt::from(8));
        assert_eq!(Dyadic::from_rational(&r), Some(Dyadic::frac(3, 2)));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(Dyadic::from_rational(&third), None);
    }
}
