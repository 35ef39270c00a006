//! Rational helpers and the "num/den" string form used in every report.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Nearest f64; saturates to +-inf for out-of-range values.
pub fn to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // very large numerator/denominator: scale by bit lengths
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let n = r.numer().abs();
    let d = r.denom().clone();
    let scaled = if shift > 0 {
        Rational::new(n, d << (shift as usize))
    } else {
        Rational::new(n << ((-shift) as usize), d)
    };
    let m = scaled.to_f64().unwrap_or(1.0);
    let v = m * 2f64.powi(shift.clamp(-2000, 2000) as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn valuation(r: &Rational, p: u64) -> Option<i64> {
    if r.is_zero() {
        None
    } else {
        Some(int_valuation(r.numer(), p) - int_valuation(r.denom(), p))
    }
}

pub fn biguint_of(n: &BigInt) -> BigUint {
    match n.sign() {
        Sign::Minus => panic!("negative value where a natural number was expected"),
        _ => n.magnitude().clone(),
    }
}

/// Serde adapters storing rationals as strings.
pub mod serde_rat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rat_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&to_string(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for (n, d, s) in [(3, 1, "3"), (-6, 4, "-3/2"), (0, 5, "0")] {
            let r = rat(n, d);
            assert_eq!(to_string(&r), s);
            assert_eq!(parse(s).unwrap(), r);
        }
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&rat(12, 5), 2), Some(2));
        assert_eq!(valuation(&rat(3, 50), 5), Some(-2));
        assert_eq!(valuation(&int(0), 3), None);
    }

    #[test]
    fn huge_to_f64() {
        let big = Rational::from_integer(BigInt::from(10).pow(400));
        let r = &big / (&big * int(3));
        assert!((to_f64(&r) - 1.0 / 3.0).abs() < 1e-15);
        assert!(to_f64(&big).is_infinite());
    }
}
