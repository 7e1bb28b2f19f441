//! Exact rationals with a stable `p/q` text form.
//!
//! Every ratio that feeds a verdict goes through [`Rat`]; there is no floating
//! point anywhere in this crate. The text form is always `p/q` (so `1/1`,
//! `0/1`), which is also the serialized form used in reports.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatParseError {
    #[error("empty rational")]
    Empty,
    #[error("invalid integer `{0}` in rational")]
    BadInteger(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_integer(n: u64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn from_big(r: BigRational) -> Self {
        Rat(r)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Compares `self` against `num / den` without building the quotient.
    pub fn cmp_ratio(&self, num: u64, den: u64) -> Ordering {
        assert!(den != 0, "zero denominator");
        let lhs = self.0.numer() * BigInt::from(den);
        let rhs = BigInt::from(num) * self.0.denom();
        lhs.cmp(&rhs)
    }

    /// `count >= self * t`, decided exactly.
    pub fn at_most_count(&self, count: u64, t: u64) -> bool {
        // self * t <= count  <=>  numer * t <= count * denom
        self.0.numer() * BigInt::from(t) <= BigInt::from(count) * self.0.denom()
    }
}

impl Rat {
    /// `⌈n / self⌉` for positive `self`, if it fits in 64 bits.
    pub fn ceil_div_of(&self, n: u64) -> Option<u64> {
        if !self.is_positive() {
            return None;
        }
        let q = (BigRational::from_integer(BigInt::from(n)) / &self.0).ceil();
        u64::try_from(q.to_integer()).ok()
    }

    /// `count <= self * t`, decided exactly.
    pub fn bounds_count(&self, count: u64, t: u64) -> bool {
        BigInt::from(count) * self.0.denom() <= self.0.numer() * BigInt::from(t)
    }

    /// `self * x <= y`, decided exactly.
    pub fn scaled_at_most(&self, x: u64, y: u64) -> bool {
        self.at_most_count(y, x)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rat {
    type Err = RatParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RatParseError::Empty);
        }
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| RatParseError::BadInteger(p.to_string()))?;
        let q: BigInt = q.parse().map_err(|_| RatParseError::BadInteger(q.to_string()))?;
        if q.is_zero() {
            return Err(RatParseError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(p, q)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_is_always_p_over_q() {
        assert_eq!(Rat::new(2, 4).to_string(), "1/2");
        assert_eq!(Rat::from_integer(3).to_string(), "3/1");
        assert_eq!(Rat::zero().to_string(), "0/1");
    }

    #[test]
    fn parse_accepts_integers_and_fractions() {
        assert_eq!("1/3".parse::<Rat>().unwrap(), Rat::new(1, 3));
        assert_eq!("2".parse::<Rat>().unwrap(), Rat::from_integer(2));
        assert_eq!(" 6/4 ".parse::<Rat>().unwrap(), Rat::new(3, 2));
        assert_eq!("1/0".parse::<Rat>(), Err(RatParseError::ZeroDenominator));
        assert!("x/2".parse::<Rat>().is_err());
        assert!("".parse::<Rat>().is_err());
    }

    #[test]
    fn ratio_comparisons_are_exact() {
        let third = Rat::new(1, 3);
        assert_eq!(third.cmp_ratio(1, 3), Ordering::Equal);
        assert_eq!(third.cmp_ratio(333_333, 1_000_000), Ordering::Greater);
        assert!(third.at_most_count(2, 5));
        assert!(!third.at_most_count(1, 4));
        assert!(third.at_most_count(1, 3));
    }

    #[test]
    fn serde_uses_string_form() {
        let json = serde_json::to_string(&Rat::new(5, 10)).unwrap();
        assert_eq!(json, "\"1/2\"");
        let back: Rat = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Rat::new(1, 2));
    }
}
