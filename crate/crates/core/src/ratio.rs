//! Arbitrary-precision rational scalars and the "p/q" wire format.

use crate::error::{CoreError, Result};
use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Scalar type used by every exact computation in this crate.
pub type Q = BigRational;

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses the decimal-free "p/q" format; a bare integer is accepted as "p/1".
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let make_err = || CoreError::BadRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| make_err())?;
    let d: BigInt = den.parse().map_err(|_| make_err())?;
    if d.is_zero() {
        return Err(make_err());
    }
    Ok(Q::new(n, d))
}

/// Canonical "p/q" rendering (always includes the denominator).
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Out-of-range values only show up in display contexts.
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Smallest rational k with k*k >= x >= 0, of the form ceil(sqrt(p*q))/q.
pub fn ceil_sqrt(x: &Q) -> Result<Q> {
    if x.is_negative() {
        return Err(CoreError::InvariantViolation(
            "ceil_sqrt of a negative rational".into(),
        ));
    }
    if x.is_zero() {
        return Ok(Q::zero());
    }
    let p = x.numer().clone();
    let q = x.denom().clone();
    let pq = &p * &q;
    let (_, mag) = pq.clone().into_parts();
    let root = mag.sqrt();
    let root = BigInt::from_biguint(Sign::Plus, root);
    let root = if &root * &root < pq { root + 1 } else { root };
    Ok(Q::new(root, q))
}

/// Exact comparison base^exp_num <= bound^exp_den for positive rationals,
/// used to check inequalities of the form (p/q)*ln(base) <= r*ln(bound)
/// without floating point.
pub fn pow_le(base: &Q, exp_base: u64, bound: &Q, exp_bound: u64) -> bool {
    let lhs = q_pow(base, exp_base);
    let rhs = q_pow(bound, exp_bound);
    lhs <= rhs
}

pub fn q_pow(x: &Q, e: u64) -> Q {
    let mut acc = Q::one();
    let mut b = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// The exact rational value of an f64 (f64 values are dyadic rationals).
pub fn q_from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| CoreError::BadRational(format!("{x}")))
}
