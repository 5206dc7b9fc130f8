//! Scalar abstraction shared by the geometry and piecewise-linear code.
//!
//! Exact rationals are the default carrier; `f64` is supported for fast
//! approximate evaluation and comparisons run through [`Scalar::is_negligible`]
//! so the same algorithms work in both settings.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Ordered field used by the convex-geometry kernel.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic and comparisons are exact.
    const EXACT: bool;

    fn ratio(num: i64, den: i64) -> Self;

    fn approx(&self) -> f64;

    fn floor_value(&self) -> Self;

    /// Zero test; exact types compare to zero, floats use an absolute tolerance.
    fn is_negligible(&self) -> bool;

    fn from_f64_lossy(x: f64) -> Self;

    /// Parses `p/q`, `p` or (for floats) a decimal literal.
    fn parse_token(token: &str) -> Option<Self>;

    /// Short text form: integers without a denominator.
    fn to_token(&self) -> String;

    /// Body-format text form: always `p/q` for exact values.
    fn to_fraction_token(&self) -> String {
        self.to_token()
    }

    fn from_int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    /// `(numerator, denominator)` when the value is an exact fraction of machine integers.
    fn small_fraction(&self) -> Option<(i64, i64)> {
        None
    }

    /// Strictly positive beyond tolerance.
    fn is_positive_strict(&self) -> bool {
        !self.is_negligible() && self.is_positive()
    }

    /// Strictly negative beyond tolerance.
    fn is_negative_strict(&self) -> bool {
        !self.is_negligible() && self.is_negative()
    }
}

/// Absolute tolerance used when `f64` stands in for an exact field.
pub const FLOAT_EPS: f64 = 1e-10;

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn small_fraction(&self) -> Option<(i64, i64)> {
        Some((self.numer().to_i64()?, self.denom().to_i64()?))
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn approx(&self) -> f64 {
        match self.to_f64() {
            Some(x) => x,
            None => self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN),
        }
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_f64_lossy(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn parse_token(token: &str) -> Option<Self> {
        let token = token.trim();
        match token.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                if d.is_zero() {
                    None
                } else {
                    Some(BigRational::new(n, d))
                }
            }
            None => {
                if let Ok(n) = token.parse::<BigInt>() {
                    return Some(BigRational::from_integer(n));
                }
                parse_decimal(token)
            }
        }
    }

    fn to_token(&self) -> String {
        if self.is_integer() {
            return self.numer().to_string();
        }
        format!("{}/{}", self.numer(), self.denom())
    }

    fn to_fraction_token(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

/// Exact parse of a plain decimal literal such as `-0.375`.
fn parse_decimal(token: &str) -> Option<BigRational> {
    let (neg, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token.strip_prefix('+').unwrap_or(token)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if neg { -value } else { value })
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn approx(&self) -> f64 {
        *self
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= FLOAT_EPS
    }

    fn from_f64_lossy(x: f64) -> Self {
        x
    }

    fn parse_token(token: &str) -> Option<Self> {
        let token = token.trim();
        match token.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().ok()?;
                let d: f64 = d.trim().parse().ok()?;
                (d != 0.0).then(|| n / d)
            }
            None => token.parse().ok(),
        }
    }

    fn to_token(&self) -> String {
        format!("{self:?}")
    }
}

/// Converts an exact rational into another scalar type.
pub fn convert<T: Scalar>(q: &BigRational) -> T {
    if T::EXACT {
        T::parse_token(&q.to_token()).expect("rational tokens always parse")
    } else {
        T::from_f64_lossy(q.approx())
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale_vec<T: Scalar>(a: &[T], s: &T) -> Vec<T> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

pub fn approx_vec<T: Scalar>(a: &[T]) -> Vec<f64> {
    a.iter().map(Scalar::approx).collect()
}

/// Lexicographic comparison; incomparable floats (NaN) sort as equal.
pub fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    a.len().cmp(&b.len())
}

pub fn vec_eq<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).is_negligible())
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}
