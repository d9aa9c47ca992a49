//! Exact rational scalars and the binomial-coefficient convention used by the
//! bracket and action formulas.
//!
//! Every identity verified by this crate is a polynomial identity over the
//! rationals, so all arithmetic is arbitrary precision and exact. There is no
//! floating-point fallback anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar. Always stored fully reduced with a positive
/// denominator; zero is `0/1`.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics on `d = 0`.
pub fn frac(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `k!` as a rational.
pub fn factorial(k: u32) -> Rat {
    let mut acc = BigInt::one();
    for v in 2..=k {
        acc *= BigInt::from(v);
    }
    Rat::from_integer(acc)
}

/// Generalized binomial coefficient for an arbitrary integer upper argument,
/// defined by the falling factorial:
///
/// ```text
/// binom(n, k) = n (n-1) ... (n-k+1) / k!
/// ```
///
/// This single definition yields both conventions the action formulas rely
/// on: `binom(-1, 0) = 1` (empty product) and `binom(n-1, n) = 0` for `n > 0`
/// (the factor `n-1-(n-1) = 0` appears in the product).
pub fn binom(n: i64, k: u32) -> Rat {
    let mut num = BigInt::one();
    for s in 0..k {
        num *= BigInt::from(n) - BigInt::from(s);
        if num.is_zero() {
            return Rat::zero();
        }
    }
    Rat::from_integer(num) / factorial(k)
}

/// Renders a rational in the canonical grammar: `p` when the denominator is
/// one, `p/q` otherwise, with the sign on the numerator.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a rational: an optional sign, then `p` or `p/q`.
pub fn rat_from_str(s: &str) -> Result<Rat, crate::error::Error> {
    let s = s.trim();
    let bad = || crate::error::Error::Parse(format!("malformed rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

/// Exact integer power with a possibly negative exponent. Panics when asked
/// to invert zero.
pub fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp == 0 {
        return Rat::one();
    }
    assert!(!base.is_zero() || exp > 0, "negative power of zero");
    let mut acc = Rat::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc = acc.recip();
    }
    acc
}

/// True when the stored representation satisfies the scalar invariants:
/// reduced fraction, positive denominator, zero as `0/1`.
pub fn is_normalized(r: &Rat) -> bool {
    use num_integer::Integer as _;
    r.denom().is_positive()
        && r.numer().gcd(r.denom()).is_one()
        && (!r.numer().is_zero() || r.denom().is_one())
}
