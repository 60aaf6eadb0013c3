//! Scalar abstraction shared by every module.
//!
//! [`Scalar`] covers `f32`, `f64` and exact [`BigRational`]. The checkers,
//! constructors and residual engines are written against it. The explorer
//! needs square roots and Gaussian draws, so it asks for [`Real`] instead,
//! which only the two float types implement.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Field-like scalar usable as an expression constant and coordinate.
pub trait Scalar:
    Clone
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn is_finite_value(&self) -> bool;

    /// Parses an unsigned decimal literal (`digits[.digits][e[+-]digits]`).
    fn parse_literal(text: &str) -> Option<Self>;

    /// Unsigned decimal literal for a nonnegative value, if one exists that
    /// parses back to exactly the same value.
    fn decimal_literal(&self) -> Option<String>;

    /// Exact rational value. `None` only for non-finite floats.
    fn to_exact(&self) -> Option<BigRational>;

    /// Nearest representable value.
    fn from_exact(value: &BigRational) -> Self;

    /// Sums with compensation where rounding can occur.
    fn sum_of<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }

    /// Converts an `f64` constant (tolerances, sample coordinates).
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts to every scalar type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_index(value: usize) -> Self {
        Self::from_usize(value).expect("index fits every scalar type")
    }
}

/// Floating-point scalar used by the numerical search.
pub trait Real: Scalar + Float + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Decimal form where one exists (`11/10` prints as `1.1`), else `Display`.
pub fn display_value<T: Scalar>(v: &T) -> String {
    match v.abs().decimal_literal() {
        Some(lit) if v.is_negative() => format!("-{lit}"),
        Some(lit) => lit,
        None => v.to_string(),
    }
}

/// Neumaier's variant of Kahan summation.
pub fn compensated_sum<T: Float, I: IntoIterator<Item = T>>(items: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry = carry + ((sum - t) + x);
        } else {
            carry = carry + ((x - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

fn float_literal_is_valid(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - start
    };
    if digits(&mut i) == 0 {
        return false;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        digits(&mut i);
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        if digits(&mut i) == 0 {
            return false;
        }
    }
    i == bytes.len()
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn parse_literal(text: &str) -> Option<Self> {
                if !float_literal_is_valid(text) {
                    return None;
                }
                <$t>::from_str(text).ok().filter(|v| v.is_finite())
            }

            fn decimal_literal(&self) -> Option<String> {
                // Debug output is the shortest string that round-trips.
                (self.is_finite() && *self >= 0.0).then(|| format!("{:?}", self.abs()))
            }

            fn to_exact(&self) -> Option<BigRational> {
                BigRational::from_float(*self)
            }

            fn from_exact(value: &BigRational) -> Self {
                exact_to_f64(value) as $t
            }

            fn sum_of<I: IntoIterator<Item = Self>>(items: I) -> Self {
                compensated_sum(items)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

fn exact_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        let n = value.numer().to_f64().unwrap_or(f64::NAN);
        let d = value.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses a decimal literal exactly.
pub fn parse_exact_decimal(text: &str) -> Option<BigRational> {
    if !float_literal_is_valid(text) {
        return None;
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).ok()?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10u8);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(numer * power)
    } else {
        BigRational::new(numer, power)
    })
}

/// Terminating decimal expansion of a nonnegative rational, if it has one.
fn exact_decimal_literal(value: &BigRational) -> Option<String> {
    if value.is_negative() {
        return None;
    }
    let mut denom = value.denom().clone();
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while denom.is_multiple_of(&two) {
        denom /= &two;
        twos += 1;
    }
    while denom.is_multiple_of(&five) {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = value * BigRational::from_integer(num_traits::pow(BigInt::from(10u8), places));
    let digits = scaled.to_integer().to_string();
    if places == 0 {
        return Some(digits);
    }
    let padded = format!("{:0>width$}", digits, width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    Some(format!("{int_part}.{frac_part}"))
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn is_finite_value(&self) -> bool {
        true
    }

    fn parse_literal(text: &str) -> Option<Self> {
        parse_exact_decimal(text)
    }

    fn decimal_literal(&self) -> Option<String> {
        exact_decimal_literal(self)
    }

    fn to_exact(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn from_exact(value: &BigRational) -> Self {
        value.clone()
    }
}

/// Parses a coefficient written either as a decimal or as a fraction `p/q`.
pub fn parse_exact_coefficient(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let value = match body.split_once('/') {
        Some((p, q)) => {
            let p = parse_exact_decimal(p.trim())?;
            let q = parse_exact_decimal(q.trim())?;
            if q.is_zero() {
                return None;
            }
            p / q
        }
        None => parse_exact_decimal(body)?,
    };
    Some(if negative { -value } else { value })
}
