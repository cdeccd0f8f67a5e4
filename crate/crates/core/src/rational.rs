//! Exact rational numbers and their textual form.
//!
//! Every quantity in the library is a [`Rational`]. Text uses reduced
//! `p/q` or a bare integer; decimal and floating forms are rejected.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("rational `{0}` has a zero denominator")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p`, `p/q` or `-p/q` with decimal digits only.
pub fn parse_rational(text: &str) -> Result<Rational, RationalError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(RationalError::Empty);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(num) || !den.map_or(true, digits) {
        return Err(RationalError::Malformed(t.to_string()));
    }
    let mut n: BigInt = num.parse().map_err(|_| RationalError::Malformed(t.to_string()))?;
    if neg {
        n = -n;
    }
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| RationalError::Malformed(t.to_string()))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(RationalError::ZeroDenominator(t.to_string()));
    }
    Ok(Rational::new(n, d))
}

/// Canonical text: reduced `p/q`, or the integer when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn min_of<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    values.into_iter().min().cloned()
}

pub fn max_of<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    values.into_iter().max().cloned()
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-3/8").unwrap(), ratio(-3, 8));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
    }

    #[test]
    fn prints_reduced() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&ratio(8, 4)), "2");
        assert_eq!(format_rational(&ratio(-1, 2)), "-1/2");
    }

    #[test]
    fn rejects_bad_literals() {
        assert_eq!(
            parse_rational("1/0"),
            Err(RationalError::ZeroDenominator("1/0".into()))
        );
        assert!(matches!(parse_rational("0.5"), Err(RationalError::Malformed(_))));
        assert!(matches!(parse_rational("1/-2"), Err(RationalError::Malformed(_))));
        assert!(matches!(parse_rational(""), Err(RationalError::Empty)));
    }
}
