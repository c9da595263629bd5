//! Exact rational helpers: parsing, canonical `p/q` formatting, binomials and
//! ratio comparisons by cross-multiplication.

use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Ratio of two unsigned integers as a reduced rational.
pub fn ratio(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// Canonical reduced `p/q` form; integers are written with denominator 1.
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, a plain integer, or a finite decimal such as `0.25`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = Rational::new(frac_num, scale);
        if neg {
            value = -value;
        }
        return Ok(Rational::from_integer(whole) + value);
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Approximate decimal rendering, for human-facing columns only.
pub fn approx(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

pub fn binomial_rat(n: usize, k: usize) -> Rational {
    from_biguint(&binomial(n, k))
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Compares `a/b <= c/d` with the conventions `x/0 = +inf` for `x > 0`.
///
/// Returns `None` when either side is `0/0`; such comparisons are skipped and
/// counted by callers, never judged.
pub fn ratio_le<T>(a: &T, b: &T, c: &T, d: &T) -> Option<bool>
where
    T: Zero + PartialOrd,
    for<'x> &'x T: Mul<&'x T, Output = T>,
{
    if (a.is_zero() && b.is_zero()) || (c.is_zero() && d.is_zero()) {
        return None;
    }
    Some(a * d <= c * b)
}

/// Serde adapter writing a [`Rational`] as a canonical `p/q` string and reading
/// either a string or a JSON integer.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = RationalRepr::deserialize(d)?;
        v.into_rational().map_err(serde::de::Error::custom)
    }
}

/// A rational as it appears in input files: `"p/q"` or an integer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalRepr {
    Int(i64),
    Str(String),
}

impl RationalRepr {
    pub fn into_rational(self) -> Result<Rational> {
        match self {
            RationalRepr::Int(n) => Ok(int(n)),
            RationalRepr::Str(s) => parse(&s),
        }
    }
}

/// Newtype that serializes as a `p/q` string; handy inside derived structs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_str::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_str::deserialize(d).map(Exact)
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse(" 7 ").unwrap(), int(7));
        assert_eq!(parse("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse("-1.5").unwrap(), rat(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format(&rat(2, 4)), "1/2");
        assert_eq!(format(&int(3)), "3/1");
        assert_eq!(format(&int(0)), "0/1");
        assert_eq!(format(&rat(4, -6)), "-2/3");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(40, 20), BigUint::from(137846528820u64));
    }

    #[test]
    fn ratio_conventions() {
        let z = BigUint::zero();
        let one = BigUint::one();
        let two = BigUint::from(2u32);
        // 0/0 on either side is skipped.
        assert_eq!(ratio_le(&z, &z, &one, &one), None);
        assert_eq!(ratio_le(&one, &one, &z, &z), None);
        // x/0 is +inf.
        assert_eq!(ratio_le(&one, &z, &one, &two), Some(false));
        assert_eq!(ratio_le(&one, &two, &one, &z), Some(true));
        assert_eq!(ratio_le(&one, &z, &two, &z), Some(true));
        assert_eq!(ratio_le(&one, &two, &one, &two), Some(true));
    }

    #[test]
    fn exact_serde() {
        let e = Exact(rat(6, 4));
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, "\"3/2\"");
        let back: Exact = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        let from_int: Exact = serde_json::from_str("5").unwrap();
        assert_eq!(from_int.0, int(5));
    }
}
