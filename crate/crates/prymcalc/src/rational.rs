//! Exact scalar arithmetic.
//!
//! Every number in this crate is a [`Rat`]: an arbitrary-precision rational
//! kept in lowest terms with a positive denominator (`num-rational`
//! maintains both on construction). Floats never appear. Rationals print
//! and parse as `p/q`, with integers written without the `/1`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as an exact rational. Panics on `q == 0`; only for literals.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator in rational literal");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("malformed rational `{input}` (expected `p` or `p/q` with nonzero q)")]
pub struct ParseRatError {
    pub input: String,
}

pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let trimmed = s.trim();
    Rat::from_str(trimmed).map_err(|_| ParseRatError {
        input: s.to_string(),
    })
}

pub fn format_rat(r: &Rat) -> String {
    // BigRational's Display already emits `p/q` and drops `/1`.
    r.to_string()
}

/// True when `r` is `n/1` or `n/2` for some integer n.
pub fn is_half_integer(r: &Rat) -> bool {
    let d = r.denom();
    d.is_one() || *d == BigInt::from(2)
}

/// The doubled value of a half-integer, exact. `None` otherwise.
pub fn doubled(r: &Rat) -> Option<BigInt> {
    let two = Rat::from_integer(BigInt::from(2));
    let d = r * two;
    if d.denom().is_one() {
        Some(d.numer().clone())
    } else {
        None
    }
}

pub fn half(n: &BigInt) -> Rat {
    Rat::new(n.clone(), BigInt::from(2))
}

/// Binomial coefficient with exact integer arithmetic; 0 for k > n.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn is_nonneg_integer(r: &Rat) -> bool {
    r.denom().is_one() && !r.numer().is_negative()
}

/// Serde adapter: a `Rat` field as a `p/q` string.
pub mod rat_string {
    use super::{format_rat, parse_rat, Rat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter: a `Vec<Rat>` field as a list of `p/q` strings.
pub mod rat_string_vec {
    use super::{format_rat, parse_rat, Rat};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter()
            .map(|s| parse_rat(s).map_err(de::Error::custom))
            .collect()
    }
}
