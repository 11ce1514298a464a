//! Exact rational scalars.
//!
//! Everything in this crate that looks like a number is a `Rational`:
//! an arbitrary-precision fraction kept in lowest terms with a positive
//! denominator. There are no floats anywhere.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::{One, Signed, Zero};

pub type Rational = num::BigRational;

/// Shorthand for building small rationals in code and tests.
///
/// Panics on a zero denominator, which is a programming error rather than
/// an input error.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |msg: &str| Error::Parse {
        line: 0,
        msg: format!("{msg}: {s:?}"),
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
    let denom: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical `<num>/<den>` form used by the file codecs. Always carries the
/// slash so round-trips are byte-stable.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Least common multiple of the denominators of a set of rationals.
/// Scaling by this turns them all into integers.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = num::integer::lcm(lcm, v.denom().clone());
    }
    lcm
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn canonical_form_is_reduced_with_positive_denominator() {
        let r = parse_rational("4/-6").unwrap();
        assert_eq!(format_rational(&r), "-2/3");
        assert_eq!(format_rational(&rat(5, 1)), "5/1");
    }

    #[test]
    fn round_trip() {
        for s in ["0/1", "-2/3", "17/5", "100000000000000000000/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn common_denominator_scales_to_integers() {
        let vals = [rat(1, 6), rat(3, 4), rat(5, 1)];
        let d = common_denominator(vals.iter());
        assert_eq!(d, BigInt::from(12));
        for v in &vals {
            assert!((v * Rational::from_integer(d.clone())).is_integer());
        }
    }
}
