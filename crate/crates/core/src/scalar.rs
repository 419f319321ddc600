//! Number types shared by every transform.
//!
//! Kernels are always built over [`Rational`]; data-derived moments may be
//! carried as `f64`. The [`Scalar`] trait is the small surface both need.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational with arbitrary-precision numerator and denominator.
///
/// Always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Tolerance used when a float moment sequence is checked for `a₀ = 1`.
pub const FLOAT_UNIT_TOL: f64 = 1e-9;

pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Send + Sync + Num + Signed {
    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether `self` is the unit moment `E[α⁰] = 1`.
    fn is_unit(&self) -> bool;

    /// Equality up to a relative tolerance. Exact types ignore `rel_tol`.
    fn within(&self, other: &Self, rel_tol: f64) -> bool;

    fn is_exact() -> bool;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_unit(&self) -> bool {
        self.is_one()
    }

    fn within(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_unit(&self) -> bool {
        (self - 1.0).abs() <= FLOAT_UNIT_TOL
    }

    fn within(&self, other: &Self, rel_tol: f64) -> bool {
        (self - other).abs() <= rel_tol * self.abs().max(other.abs()).max(f64::MIN_POSITIVE)
    }

    fn is_exact() -> bool {
        false
    }
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

/// Successive powers `[1, x, x², …, xⁿ]`.
pub fn powers<T: Scalar>(x: &T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    for k in 1..=n {
        let next = out[k - 1].clone() * x.clone();
        out.push(next);
    }
    out
}

/// Rows `0..=n` of Pascal's triangle in arbitrary precision.
pub fn binomial_table(n: usize) -> Vec<Vec<Rational>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    rows.push(vec![BigInt::one()]);
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = Vec::with_capacity(i + 1);
        row.push(BigInt::one());
        for k in 1..i {
            row.push(&prev[k - 1] + &prev[k]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows.into_iter()
        .map(|row| row.into_iter().map(Rational::from_integer).collect())
        .collect()
}

/// Renders a rational as `"p/q"`, including integers (`"3/1"`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, an integer, or a decimal literal (`"0.125"`, `"-1.5e-3"`)
/// into an exact rational. Decimal literals are read exactly, never via `f64`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str_radix(p.trim(), 10).map_err(|_| bad())?;
        let q = BigInt::from_str_radix(q.trim(), 10).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str_radix(&all_digits, 10).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i64;
    if exponent.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= pow(&ten, scale as usize);
    } else {
        value /= pow(&ten, scale.unsigned_abs() as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite number {x}")))
}
