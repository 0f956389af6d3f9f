//! Exact rational numbers used for every probability in the crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or `"p"`. Decimal points are rejected so that no value
/// ever passes through floating point.
pub fn parse(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() || t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(Error::schema(
            "rational",
            format!("`{text}` is not of the form p/q"),
        ));
    }
    let r = Rational::from_str(t)
        .map_err(|_| Error::schema("rational", format!("`{text}` is not of the form p/q")))?;
    Ok(r)
}

/// Canonical `p/q` text (integers print without a denominator).
pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

/// Least common multiple of the denominators, used to clear fractions.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse(" 2 ").unwrap(), int(2));
        assert_eq!(parse("-1/4").unwrap(), ratio(-1, 4));
        assert_eq!(format(&ratio(2, 4)), "1/2");
        assert_eq!(format(&int(1)), "1");
    }

    #[test]
    fn rejects_floating_text() {
        assert!(parse("0.5").is_err());
        assert!(parse("1e-3").is_err());
        assert!(parse("").is_err());
        assert!(parse("1/0").is_err());
    }
}
