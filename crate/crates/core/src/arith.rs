//! Number types shared by the whole crate.
//!
//! Two numeric worlds coexist. [`Value`] is an exact-or-float number whose
//! arithmetic promotes to float as soon as one operand is a float; it backs
//! the measure and Wells code, where exactness depends on how a measure was
//! built. [`Scalar`] is a trait implemented by `BigRational` and `f64` for
//! the majorization machinery, which is generic over a single mode.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Whether a reported number is exact or a double-precision approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumKind {
    Exact,
    Float,
}

/// A number as it appears in a report: tagged, printed losslessly, and with
/// a double approximation for consumers that only want a plot value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Num {
    pub kind: NumKind,
    pub value: String,
    pub approx: f64,
}

impl Num {
    pub fn exact(q: &BigRational) -> Self {
        Num {
            kind: NumKind::Exact,
            value: q.to_string(),
            approx: rational_to_f64(q),
        }
    }

    pub fn integer(z: &BigInt) -> Self {
        Num {
            kind: NumKind::Exact,
            value: z.to_string(),
            approx: z.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn float(x: f64) -> Self {
        Num {
            kind: NumKind::Float,
            value: format!("{x}"),
            approx: x,
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, integers, and decimal literals (`0.35`, `-1.5e-3`) into an
/// exact rational. Decimal literals are read as the decimal they spell, not
/// as the nearest binary double.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::ParseNumber(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let shift = exponent - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= Pow::pow(&ten, shift as u32);
    } else {
        value /= Pow::pow(&ten, (-shift) as u32);
    }
    Ok(if negative { -value } else { value })
}

/// Binomial coefficients C(n, 0..=n).
pub fn binomial_row(n: u32) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// An exact rational or a double.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn zero(exact: bool) -> Self {
        if exact {
            Value::Exact(BigRational::zero())
        } else {
            Value::Float(0.0)
        }
    }

    pub fn one(exact: bool) -> Self {
        if exact {
            Value::Exact(BigRational::one())
        } else {
            Value::Float(1.0)
        }
    }

    pub fn from_int(z: &BigInt, exact: bool) -> Self {
        if exact {
            Value::Exact(BigRational::from_integer(z.clone()))
        } else {
            Value::Float(z.to_f64().unwrap_or(f64::NAN))
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => rational_to_f64(q),
            Value::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Float(_) => None,
        }
    }

    /// Converts to float mode (no-op for floats).
    pub fn to_float(&self) -> Self {
        Value::Float(self.to_f64())
    }

    pub fn pow(&self, k: u32) -> Self {
        match self {
            Value::Exact(q) => Value::Exact(Pow::pow(q, k)),
            Value::Float(x) => Value::Float(x.powi(k as i32)),
        }
    }

    /// Sign relative to zero. NaN compares as `Equal`.
    pub fn sign(&self) -> Ordering {
        match self {
            Value::Exact(q) => q.cmp(&BigRational::zero()),
            Value::Float(x) => x.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Value::Exact(q) => Value::Exact(q.abs()),
            Value::Float(x) => Value::Float(x.abs()),
        }
    }

    pub fn num(&self) -> Num {
        match self {
            Value::Exact(q) => Num::exact(q),
            Value::Float(x) => Num::float(*x),
        }
    }

    /// Total order with float promotion; NaN sorts as equal.
    pub fn cmp_value(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! value_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a> $trait<&'a Value> for &'a Value {
            type Output = Value;
            fn $method(self, rhs: &'a Value) -> Value {
                match (self, rhs) {
                    (Value::Exact(a), Value::Exact(b)) => Value::Exact(a $op b),
                    _ => Value::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                (&self).$method(&rhs)
            }
        }
    };
}

value_binop!(Add, add, +);
value_binop!(Sub, sub, -);
value_binop!(Mul, mul, *);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(q) => Value::Exact(-q),
            Value::Float(x) => Value::Float(-x),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.num().serialize(s)
    }
}

/// Serializes a computed double as a float-tagged [`Num`].
pub fn ser_float<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Num::float(*x).serialize(s)
}

/// Serializes computed doubles as float-tagged [`Num`]s.
pub fn ser_floats<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&x| Num::float(x)))
}

impl From<BigRational> for Value {
    fn from(q: BigRational) -> Self {
        Value::Exact(q)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

/// Ordered-field operations used by the majorization code, implemented for
/// exact rationals (zero tolerance) and doubles (1e-12 relative tolerance).
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    const EXACT: bool;

    fn from_ratio(n: i64, d: i64) -> Self;
    fn as_f64(&self) -> f64;
    fn powu(&self, k: u32) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn num(&self) -> Num;

    /// `self >= other`, up to the mode's tolerance.
    fn approx_ge(&self, other: &Self) -> bool;

    fn approx_eq(&self, other: &Self) -> bool {
        self.approx_ge(other) && other.approx_ge(self)
    }

    /// Strictly greater, beyond the tolerance.
    fn definitely_gt(&self, other: &Self) -> bool {
        !other.approx_ge(self)
    }
}

pub const FLOAT_TOL: f64 = 1e-12;

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(n: i64, d: i64) -> Self {
        rational(n, d)
    }
    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn powu(&self, k: u32) -> Self {
        Pow::pow(self, k)
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn num(&self) -> Num {
        Num::exact(self)
    }
    fn approx_ge(&self, other: &Self) -> bool {
        self >= other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn powu(&self, k: u32) -> Self {
        self.powi(k as i32)
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn num(&self) -> Num {
        Num::float(*self)
    }
    fn approx_ge(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        *self >= *other - FLOAT_TOL * scale
    }
}

/// A positive half-integer spin `S ∈ {1/2, 1, 3/2, ...}`, stored as `2S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger {
    twice: u32,
}

impl HalfInteger {
    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(invalid("S", "spin must be positive"));
        }
        Ok(HalfInteger { twice })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn is_integral(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn to_rational(self) -> BigRational {
        rational(self.twice as i64, 2)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn from_rational(q: &BigRational) -> Result<Self> {
        let doubled = q * int(2);
        if !doubled.is_integer() || !doubled.is_positive() {
            return Err(invalid("S", format!("{q} is not a positive multiple of 1/2")));
        }
        let twice = doubled
            .to_integer()
            .to_u32()
            .ok_or_else(|| invalid("S", "spin too large"))?;
        Self::from_twice(twice)
    }
}

impl FromStr for HalfInteger {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_rational(&parse_rational(s)?)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
