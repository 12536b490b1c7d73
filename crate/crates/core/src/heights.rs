//! Exact rationals over ℚ and the logarithmic Weil height.
//!
//! The height of `p/q` in lowest terms is `h(p/q) = log max(|p|, |q|)`, the
//! standard absolute height on ℚ. Heights are returned in natural-log units.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced fraction with positive denominator. Zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    /// Builds `num/den` in lowest terms.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        reduce(&num.into(), &den.into())
    }

    /// Wraps a fraction whose numerator and denominator are already coprime
    /// with positive denominator. Only checked in debug builds.
    pub(crate) fn from_coprime(num: BigInt, den: BigInt) -> Self {
        debug_assert!(den.is_positive());
        ExactRational(BigRational::new_raw(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Largest bit length among numerator and denominator.
    pub fn bits(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("reciprocal of zero"));
        }
        Ok(ExactRational(self.0.recip()))
    }

    pub fn pow(&self, exp: u32) -> Self {
        ExactRational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big_rational(self) -> BigRational {
        self.0
    }

    /// The logarithmic height of `self`.
    pub fn height(&self) -> HeightValue {
        log_height(self)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        // BigRational keeps itself reduced with a positive denominator.
        ExactRational(r)
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        ExactRational::from_integer(n)
    }
}

/// Canonical lowest-terms form of `num/den` with positive denominator.
pub fn reduce(num: &BigInt, den: &BigInt) -> Result<ExactRational> {
    if den.is_zero() {
        return Err(Error::domain("zero denominator"));
    }
    if num.is_zero() {
        return Ok(ExactRational::zero());
    }
    let g = num.gcd(den);
    let (mut n, mut d) = (num / &g, den / &g);
    if d.sign() == Sign::Minus {
        n = -n;
        d = -d;
    }
    Ok(ExactRational(BigRational::new_raw(n, d)))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Panics on division by zero, like the underlying BigRational.
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => reduce(&parse(p)?, &parse(q)?),
            None => Ok(ExactRational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(ExactRational::from_integer(n)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A logarithmic height, in natural-log units. Always nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HeightValue(f64);

impl HeightValue {
    pub fn value(self) -> f64 {
        self.0
    }

    /// The multiplicative height `H = exp(h)`; overflows to infinity for
    /// large arguments.
    pub fn multiplicative(self) -> f64 {
        self.0.exp()
    }
}

impl From<HeightValue> for f64 {
    fn from(h: HeightValue) -> f64 {
        h.0
    }
}

/// Natural log of `|n|`, accurate for integers of any size. `log_abs(0)` is
/// negative infinity.
pub fn log_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return n.abs().to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (n.magnitude() >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `h(p/q) = log max(|p|, q)` for a canonical rational.
pub fn log_height(x: &ExactRational) -> HeightValue {
    let num = x.numer().abs();
    let big = if &num > x.denom() { &num } else { x.denom() };
    HeightValue(log_abs(big).max(0.0))
}
