//! Weight arithmetic: exact rationals or `f64`, chosen per run.

use std::fmt::{self, Debug};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` or `p` when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accepts `p`, `p/q` and finite decimals such as `0.25`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !ip.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp).parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rational::new(digits, den);
        return Some(if neg { -r } else { r });
    }
    t.parse::<BigInt>().ok().map(Rational::from_integer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    Exact,
    Float,
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::Exact => "exact",
            WeightMode::Float => "float",
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scalar used for measure weights and function values.
pub trait Weight: Clone + PartialOrd + Debug + Send + Sync + Signed + 'static {
    const MODE: WeightMode;
    /// Numerators over a shared scale, used by bulk convolution.
    type Lin: Clone + Debug + Send + Sync;

    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn to_f64(&self) -> f64;
    fn format(&self) -> String;
    fn parse(s: &str) -> Option<Self>;
    /// Zero in exact mode.
    fn tolerance() -> Self;

    fn linearize(ws: &[&Self]) -> (Vec<Self::Lin>, Self::Lin);
    fn lin_zero() -> Self::Lin;
    fn lin_fma(acc: &mut Self::Lin, a: &Self::Lin, b: &Self::Lin);
    fn lin_add(acc: &mut Self::Lin, a: &Self::Lin);
    fn lin_is_zero(a: &Self::Lin) -> bool;
    fn delinearize(n: Self::Lin, den: &Self::Lin) -> Self;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&rat(n, d))
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&rat_int(n))
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    /// `a <= b` up to the mode tolerance.
    fn le_tol(a: &Self, b: &Self) -> bool {
        a.clone() <= b.clone() + Self::tolerance()
    }

    fn eq_tol(a: &Self, b: &Self) -> bool {
        (a.clone() - b.clone()).abs() <= Self::tolerance()
    }
}

impl Weight for Rational {
    const MODE: WeightMode = WeightMode::Exact;
    type Lin = BigInt;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn format(&self) -> String {
        fmt_rational(self)
    }
    fn parse(s: &str) -> Option<Self> {
        parse_rational(s)
    }
    fn tolerance() -> Self {
        Rational::zero()
    }

    fn linearize(ws: &[&Self]) -> (Vec<BigInt>, BigInt) {
        let mut den = BigInt::one();
        for w in ws {
            den = den.lcm(w.denom());
        }
        let nums = ws.iter().map(|w| w.numer() * (&den / w.denom())).collect();
        (nums, den)
    }
    fn lin_zero() -> BigInt {
        BigInt::zero()
    }
    fn lin_fma(acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        *acc += a * b;
    }
    fn lin_add(acc: &mut BigInt, a: &BigInt) {
        *acc += a;
    }
    fn lin_is_zero(a: &BigInt) -> bool {
        a.is_zero()
    }
    fn delinearize(n: BigInt, den: &BigInt) -> Self {
        Rational::new(n, den.clone())
    }
}

impl Weight for f64 {
    const MODE: WeightMode = WeightMode::Float;
    type Lin = f64;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Rational {
        Rational::from_f64(*self).unwrap_or_else(Rational::zero)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn format(&self) -> String {
        format!("{self:?}")
    }
    fn parse(s: &str) -> Option<Self> {
        if let Some(r) = parse_rational(s) {
            return Some(<f64 as Weight>::from_rational(&r));
        }
        s.trim().parse().ok()
    }
    fn tolerance() -> Self {
        1e-9
    }

    fn linearize(ws: &[&Self]) -> (Vec<f64>, f64) {
        (ws.iter().map(|w| **w).collect(), 1.0)
    }
    fn lin_zero() -> f64 {
        0.0
    }
    fn lin_fma(acc: &mut f64, a: &f64, b: &f64) {
        *acc += a * b;
    }
    fn lin_add(acc: &mut f64, a: &f64) {
        *acc += a;
    }
    fn lin_is_zero(a: &f64) -> bool {
        *a == 0.0
    }
    fn delinearize(n: f64, den: &f64) -> Self {
        n / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text() {
        assert_eq!(fmt_rational(&rat(3, 8)), "3/8");
        assert_eq!(fmt_rational(&rat(4, 2)), "2");
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("6/8"), Some(rat(3, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn linearize_round_trip() {
        let ws = [rat(1, 4), rat(1, 6), rat(2, 3)];
        let refs: Vec<&Rational> = ws.iter().collect();
        let (nums, den) = Rational::linearize(&refs);
        assert_eq!(den, BigInt::from(12));
        for (n, w) in nums.into_iter().zip(&ws) {
            assert_eq!(&Rational::delinearize(n, &den), w);
        }
    }

    #[test]
    fn float_format_round_trips() {
        let x = 0.1f64 + 0.2;
        assert_eq!(<f64 as Weight>::parse(&Weight::format(&x)), Some(x));
    }
}
