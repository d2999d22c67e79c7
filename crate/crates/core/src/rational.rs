//! Exact scalars.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps every value in
//! lowest terms with a positive denominator after each operation.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"` or `"p/q"` (optional sign on `p`, `q > 0`).
///
/// Non-canonical input such as `"4/6"` is accepted and reduced.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid numerator in {text:?}")))?;
    let den: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.starts_with('+') || d.starts_with('-') {
                return Err(Error::Parse(format!("signed denominator in {text:?}")));
            }
            d.parse()
                .map_err(|_| Error::Parse(format!("invalid denominator in {text:?}")))?
        }
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
