//! Exact rational scalars.
//!
//! `Rat` is an arbitrary-precision rational kept in lowest terms with a
//! positive denominator; `num_rational::BigRational` already maintains both
//! invariants.  Serialization uses `p/q` strings so exactness survives
//! round-trips through text formats.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Binomial coefficient `C(n, k)` for integer (possibly negative) `n`.
///
/// Uses the falling-factorial definition `n(n-1)...(n-k+1)/k!`, which is the
/// one needed for Laurent expansions of `(u + t)^n`.
pub fn binomial(n: i64, k: u32) -> Rat {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

/// Factorial as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut f = BigInt::one();
    for i in 2..=n as i64 {
        f *= BigInt::from(i);
    }
    BigRational::from_integer(f)
}

/// Renders `p/q`, or just `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p`, or `p/q` with arbitrary-precision integers.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::RatParse(format!("bad numerator in {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::RatParse(format!("bad denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::RatParse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_negative_exponent() {
        // (1+t)^{-4} = 1 - 4t + 10t^2 - 20t^3 + ...
        assert_eq!(binomial(-4, 0), rat(1));
        assert_eq!(binomial(-4, 1), rat(-4));
        assert_eq!(binomial(-4, 2), rat(10));
        assert_eq!(binomial(-4, 3), rat(-20));
        assert_eq!(binomial(5, 2), rat(10));
        assert_eq!(binomial(3, 5), rat(0));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7/2", "0", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
        // normalization on parse
        assert_eq!(parse_rat("4/6").unwrap(), ratio(2, 3));
    }
}
