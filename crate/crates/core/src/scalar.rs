//! Arbitrary-precision rational scalars.
//!
//! Every number in this crate is an exact rational: floating point is never
//! used, so all pipelines are bit-for-bit reproducible. Rationals are kept in
//! lowest terms with a positive denominator by construction (the `num` crate
//! normalizes on every operation).

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use std::str::FromStr;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Builds `p/q` in lowest terms with a positive denominator.
/// Fails when `q = 0`.
pub fn rational_normalize(p: BigInt, q: BigInt) -> Result<Rat> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(p, q))
}

/// Convenience constructor for literal rationals. Panics on `q = 0`, so it is
/// reserved for hard-coded values; use [`rational_normalize`] for anything
/// derived from input.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "literal rational with zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rat_int(p: i64) -> Rat {
    BigRational::from_integer(BigInt::from(p))
}

/// Integer power `b^e` (with `e >= 0`) as a rational.
pub fn rat_pow_int(b: i64, e: u32) -> Rat {
    BigRational::from_integer(BigInt::from(b).pow(e))
}

/// Binomial coefficient `C(n, k)` as a rational (0 when `k > n`).
pub fn binomial(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

/// Parses `"p/q"` or `"p"` into a normalized rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => BigInt::from_str(s)
            .map(BigRational::from_integer)
            .map_err(|_| Error::InvalidArgument(format!("unparsable rational `{s}`"))),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim())
                .map_err(|_| Error::InvalidArgument(format!("unparsable numerator in `{s}`")))?;
            let q = BigInt::from_str(q.trim())
                .map_err(|_| Error::InvalidArgument(format!("unparsable denominator in `{s}`")))?;
            rational_normalize(p, q)
        }
    }
}

/// Canonical text form: `"p"` when the denominator is 1, otherwise `"p/q"`.
/// Used for all serialized output, so it must stay stable.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
