//! Exact rational scalars.
//!
//! All coefficient arithmetic in this crate is performed over arbitrary
//! precision rationals; nothing is ever rounded. The representation is
//! [`num_rational::BigRational`], which keeps values reduced with a positive
//! denominator.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always reduced, denominator positive.
pub type Rational = num_rational::BigRational;

/// Arbitrary-precision integer.
pub type Integer = BigInt;

/// Builds a rational from a machine integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds the rational `p/q`. Panics if `q == 0`, mirroring integer division.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Builds a rational from a big integer.
pub fn rat_int(n: Integer) -> Rational {
    Rational::from_integer(n)
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> Integer {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Binomial coefficient `C(n, k)` as a big integer (0 when `k > n`).
pub fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Formats a rational in the class-file syntax: `"p"` when integral,
/// `"p/q"` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the class-file rational syntax accepted by [`format_rational`].
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::ParseError(format!("not an integer: {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let denom = parse_int(q)?;
            if denom.is_zero() {
                return Err(Error::ParseError(format!("zero denominator: {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, denom))
        }
    }
}

/// Converts an exactly integral rational into a big integer.
///
/// Returns `OutOfRange` when the value has a nontrivial denominator; used by
/// counting routines that must produce integers.
pub fn expect_integer(x: &Rational, what: &str) -> Result<Integer> {
    if x.denom().is_one() {
        Ok(x.numer().clone())
    } else {
        Err(Error::OutOfRange(format!(
            "{what} is not an integer: {}",
            format_rational(x)
        )))
    }
}

/// Sign-normalized primitive integer form of a rational vector: multiplies by
/// the least common denominator, divides by the content, and makes the first
/// nonzero entry positive. The zero vector is returned unchanged.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    use num_integer::Integer as _;
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let scaled: Vec<BigInt> = v.iter().map(|x| (x * rat_int(lcm.clone())).to_integer()).collect();
    let mut content = BigInt::zero();
    for x in &scaled {
        content = content.gcd(x);
    }
    if content.is_zero() {
        return v.to_vec();
    }
    let first_nonzero_negative = scaled.iter().find(|x| !x.is_zero()).map(|x| x.is_negative());
    let sign = if first_nonzero_negative == Some(true) { -BigInt::one() } else { BigInt::one() };
    scaled
        .into_iter()
        .map(|x| rat_int(x * &sign / &content))
        .collect()
}
