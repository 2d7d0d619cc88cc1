//! Exact rational quantities (utils, probabilities).
//!
//! Rendering rule: a value whose reduced denominator has no prime factors
//! other than 2 and 5 prints as a terminating decimal (`0.4`, `-1`, `3.25`);
//! every other value prints as a reduced fraction (`1/3`). Parsing accepts
//! integers, decimals and fractions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}`")]
pub struct ParseValueError(pub String);

impl Value {
    pub fn zero() -> Self {
        Value(BigRational::zero())
    }

    pub fn one() -> Self {
        Value(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Value(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Value(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Value {
        Value(self.0.abs())
    }

    /// True when `0 <= self <= 1`.
    pub fn is_probability(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// Lossy conversion for display-only contexts (never used in comparisons).
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn terminating_decimal(&self) -> Option<String> {
        let den = self.0.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let mut d = den.clone();
        let mut twos = 0u32;
        let mut fives = 0u32;
        while (&d % &two).is_zero() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if !d.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let scaled = self.0.numer() * (&scale / &den);
        let negative = scaled.is_negative();
        let mag = scaled.abs().to_string();
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if digits == 0 {
            out.push_str(&mag);
        } else {
            let digits = digits as usize;
            let padded = format!("{mag:0>width$}", width = digits + 1);
            let (int, frac) = padded.split_at(padded.len() - digits);
            out.push_str(int);
            out.push('.');
            out.push_str(frac);
        }
        Some(out)
    }
}

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseValueError(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        if body.is_empty() {
            return Err(err());
        }
        let value = if let Some((n, d)) = body.split_once('/') {
            let n = parse_digits(n).ok_or_else(err)?;
            let d = parse_digits(d).ok_or_else(err)?;
            if d.is_zero() {
                return Err(err());
            }
            BigRational::new(n, d)
        } else if let Some((int, frac)) = body.split_once('.') {
            let i = parse_digits(int).ok_or_else(err)?;
            let f = parse_digits(frac).ok_or_else(err)?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            BigRational::new(i * &scale + f, scale)
        } else {
            BigRational::from_integer(parse_digits(body).ok_or_else(err)?)
        };
        Ok(Value(if neg { -value } else { value }))
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terminating_decimal() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        Value(&self.0 + &rhs.0)
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        Value(&self.0 - &rhs.0)
    }
}

impl Mul for &Value {
    type Output = Value;
    fn mul(self, rhs: &Value) -> Value {
        Value(&self.0 * &rhs.0)
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value(-&self.0)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    #[test]
    fn expected_utility_arithmetic_is_exact() {
        let k = v("0.4");
        let one = Value::one();
        let eu = &(&k * &v("10")) + &(&(&one - &k) * &v("-1"));
        assert_eq!(eu, v("3.4"));
        assert_eq!(eu.to_string(), "3.4");
        let eu_b = &(&k * &v("8")) + &(&(&one - &k) * &v("-4"));
        assert_eq!(eu_b.to_string(), "0.8");
    }

    #[test]
    fn rendering() {
        assert_eq!(v("2/5").to_string(), "0.4");
        assert_eq!(v("-1").to_string(), "-1");
        assert_eq!(v("1/3").to_string(), "1/3");
        assert_eq!(v("-2/6").to_string(), "-1/3");
        assert_eq!(v("0.05").to_string(), "0.05");
        assert_eq!(v("-0.125").to_string(), "-0.125");
        assert_eq!(v("10.0").to_string(), "10");
        assert_eq!(v("+7").to_string(), "7");
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "-", "1/0", "a", "1.", ".5", "1/2/3", "1e3"] {
            assert!(bad.parse::<Value>().is_err(), "{bad}");
        }
    }

    #[test]
    fn probability_range() {
        assert!(v("0").is_probability());
        assert!(v("1").is_probability());
        assert!(!v("1.01").is_probability());
        assert!(!v("-0.1").is_probability());
    }

    proptest::proptest! {
        #[test]
        fn display_parse_roundtrip(n in -10_000i64..10_000, d in 1i64..2_000) {
            let x = Value::ratio(n, d);
            let back: Value = x.to_string().parse().unwrap();
            proptest::prop_assert_eq!(back, x);
        }
    }
}
