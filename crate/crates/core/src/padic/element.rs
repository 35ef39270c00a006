//! Elements of Q_p at capped absolute precision.
//!
//! A nonzero element is p^val * unit with unit known modulo p^(prec - val).
//! An element whose value is only known to lie in p^prec Z_p is "zero at
//! precision". Arithmetic tracks precision pessimistically.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactnum::rational::{self, Rational};

pub fn ppow(p: u64, k: i64) -> BigInt {
    assert!(k >= 0, "negative power of p");
    BigInt::from(p).pow(k as u32)
}

/// Split off the p-part: n = p^k * u with p not dividing u.
fn split_p(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (k, n);
        }
        n = q;
        k += 1;
    }
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible modulo p^k");
    e.x.mod_floor(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicElement {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: i64,
}

impl PadicElement {
    pub fn zero(p: u64, prec: i64) -> Self {
        PadicElement { p, val: prec, unit: BigInt::zero(), prec }
    }

    fn build(p: u64, val: i64, unit: BigInt, prec: i64) -> Self {
        if val >= prec || unit.is_zero() {
            return Self::zero(p, prec);
        }
        let (k, u) = split_p(&unit, p);
        let val = val + k;
        if val >= prec {
            return Self::zero(p, prec);
        }
        let u = u.mod_floor(&ppow(p, prec - val));
        PadicElement { p, val, unit: u, prec }
    }

    pub fn from_rational(p: u64, r: &Rational, prec: i64) -> Self {
        if r.is_zero() {
            return Self::zero(p, prec);
        }
        let (kn, un) = split_p(r.numer(), p);
        let (kd, ud) = split_p(r.denom(), p);
        let val = kn - kd;
        if val >= prec {
            return Self::zero(p, prec);
        }
        let m = ppow(p, prec - val);
        let u = (un * mod_inverse(&ud, &m)).mod_floor(&m);
        PadicElement { p, val, unit: u, prec }
    }

    pub fn from_int(p: u64, n: i64, prec: i64) -> Self {
        Self::from_rational(p, &rational::int(n), prec)
    }

    pub fn from_bigint(p: u64, n: &BigInt, prec: i64) -> Self {
        Self::build(p, 0, n.clone(), prec)
    }

    pub fn one(p: u64, prec: i64) -> Self {
        Self::from_int(p, 1, prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Exact valuation; `None` when zero at precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Valuation, or the precision for zero-at-precision elements (a lower bound).
    pub fn val_or_prec(&self) -> i64 {
        self.val
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn rel_prec(&self) -> i64 {
        self.prec - self.val
    }

    /// Base-p digits of the unit part, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        if self.is_zero() {
            return vec![];
        }
        let pb = BigInt::from(self.p);
        let mut n = self.unit.clone();
        (0..self.rel_prec())
            .map(|_| {
                let (q, r) = n.div_rem(&pb);
                n = q;
                r.to_u64().unwrap()
            })
            .collect()
    }

    /// Representative p^val * unit as an exact rational.
    pub fn to_rational(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let u = Rational::from_integer(self.unit.clone());
        if self.val >= 0 {
            u * Rational::from_integer(ppow(self.p, self.val))
        } else {
            u / Rational::from_integer(ppow(self.p, -self.val))
        }
    }

    /// Integer representative in [0, p^prec) for integral elements.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        (self.val >= 0).then(|| (&self.unit * ppow(self.p, self.val)).mod_floor(&ppow(self.p, self.prec)))
    }

    /// Residue mod p of an integral element.
    pub fn residue(&self) -> Option<u64> {
        if self.val < 0 {
            return None;
        }
        if self.val > 0 || self.is_zero() {
            return Some(0);
        }
        Some((&self.unit % BigInt::from(self.p)).to_u64().unwrap())
    }

    /// Drop precision to `prec` (never raises it).
    pub fn with_prec(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::build(self.p, self.val, self.unit.clone(), prec)
    }

    /// Treat the representative as exact and re-express it at precision `prec`.
    pub fn lift_to(&self, prec: i64) -> Self {
        Self::build(self.p, self.val, self.unit.clone(), prec)
    }

    pub fn is_integral(&self) -> bool {
        self.val >= 0
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.p, o.p, "p-adic elements over different primes");
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let rel = self.rel_prec();
        let u = mod_inverse(&self.unit, &ppow(self.p, rel));
        Some(PadicElement { p: self.p, val: -self.val, unit: u, prec: rel - self.val })
    }

    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        self.check(o);
        if o.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.p, self.prec - o.val));
        }
        let rel = self.rel_prec().min(o.rel_prec());
        let m = ppow(self.p, rel);
        let u = (&self.unit * mod_inverse(&o.unit, &m)).mod_floor(&m);
        let val = self.val - o.val;
        Some(PadicElement { p: self.p, val, unit: u, prec: val + rel })
    }

    pub fn pow(&self, e: u64) -> Self {
        if e == 0 {
            return Self::one(self.p, self.rel_prec().max(1));
        }
        let mut acc: Option<Self> = None;
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => b.clone(),
                    Some(a) => &a * &b,
                });
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc.unwrap()
    }

    /// True when the difference is zero at the common precision.
    pub fn eq_at_prec(&self, o: &Self) -> bool {
        (self - o).is_zero()
    }

    /// Scale by p^k exactly.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero(self.p, self.prec + k);
        }
        PadicElement { p: self.p, val: self.val + k, unit: self.unit.clone(), prec: self.prec + k }
    }
}

impl<'a> Add<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn add(self, o: &PadicElement) -> PadicElement {
        self.check(o);
        let prec = self.prec.min(o.prec);
        if self.is_zero() {
            return o.with_prec(prec);
        }
        if o.is_zero() {
            return self.with_prec(prec);
        }
        let m = self.val.min(o.val);
        if m >= prec {
            return PadicElement::zero(self.p, prec);
        }
        let modulus = ppow(self.p, prec - m);
        let s = (&self.unit * ppow(self.p, self.val - m) + &o.unit * ppow(self.p, o.val - m)).mod_floor(&modulus);
        PadicElement::build(self.p, m, s, prec)
    }
}

impl<'a> Sub<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn sub(self, o: &PadicElement) -> PadicElement {
        self + &(-o)
    }
}

impl<'a> Mul<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn mul(self, o: &PadicElement) -> PadicElement {
        self.check(o);
        match (self.is_zero(), o.is_zero()) {
            (true, true) => PadicElement::zero(self.p, self.prec + o.prec),
            (true, false) => PadicElement::zero(self.p, self.prec + o.val),
            (false, true) => PadicElement::zero(self.p, o.prec + self.val),
            (false, false) => {
                let rel = self.rel_prec().min(o.rel_prec());
                let val = self.val + o.val;
                let u = (&self.unit * &o.unit).mod_floor(&ppow(self.p, rel));
                PadicElement { p: self.p, val, unit: u, prec: val + rel }
            }
        }
    }
}

impl<'a> Div<&'a PadicElement> for &'a PadicElement {
    type Output = PadicElement;
    fn div(self, o: &PadicElement) -> PadicElement {
        self.checked_div(o).expect("p-adic division by zero at precision")
    }
}

impl Neg for &PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        if self.is_zero() {
            return self.clone();
        }
        let m = ppow(self.p, self.rel_prec());
        PadicElement { p: self.p, val: self.val, unit: (-&self.unit).mod_floor(&m), prec: self.prec }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<PadicElement> for PadicElement {
            type Output = PadicElement;
            fn $m(self, o: PadicElement) -> PadicElement {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl Neg for PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        -&self
    }
}

impl fmt::Display for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.prec);
        }
        let mut parts = vec![];
        for (i, d) in self.digits().iter().enumerate() {
            if *d != 0 {
                parts.push(format!("{}*{}^{}", d, self.p, self.val + i as i64));
            }
        }
        write!(f, "{} + O({}^{})", parts.join(" + "), self.p, self.prec)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    p: u64,
    val: i64,
    digits: Vec<u64>,
    prec: i64,
}

impl Serialize for PadicElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { p: self.p, val: self.val, digits: self.digits(), prec: self.prec }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        if w.p < 2 {
            return Err(D::Error::custom("prime must be >= 2"));
        }
        let mut u = BigInt::zero();
        for &dg in w.digits.iter().rev() {
            if dg >= w.p {
                return Err(D::Error::custom("digit out of range"));
            }
            u = u * BigInt::from(w.p) + BigInt::from(dg);
        }
        Ok(PadicElement::build(w.p, w.val, u, w.prec))
    }
}

/// |x| as a float for reporting.
pub fn abs_value(x: &PadicElement) -> f64 {
    match x.valuation() {
        None => 0.0,
        Some(v) => (x.prime() as f64).powi(-v as i32),
    }
}

pub fn is_negative_rational(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn basic_arithmetic() {
        let p = 7;
        let a = PadicElement::from_rational(p, &rat(1, 3), 20);
        let b = PadicElement::from_int(p, 3, 20);
        assert!((&a * &b).eq_at_prec(&PadicElement::one(p, 20)));
        let c = PadicElement::from_rational(p, &rat(49, 5), 20);
        assert_eq!(c.valuation(), Some(2));
        assert_eq!(c.prec(), 20);
        let d = &c / &PadicElement::from_int(p, 7, 20);
        assert_eq!(d.valuation(), Some(1));
        // division by an element of valuation 1 costs a digit of relative precision
        assert_eq!(d.rel_prec(), 18);
        let z = &b - &b;
        assert!(z.is_zero());
        assert_eq!(z.prec(), 20);
    }

    #[test]
    fn serde_round_trip() {
        let a = PadicElement::from_rational(5, &rat(-7, 25), 10);
        let s = serde_json::to_string(&a).unwrap();
        let b: PadicElement = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.valuation(), Some(-2));
        assert!(s.contains("\"p\":5"));
    }

    #[test]
    fn rational_round_trip_is_congruent() {
        let p = 3;
        let r = rat(17, 4);
        let a = PadicElement::from_rational(p, &r, 30);
        let back = PadicElement::from_rational(p, &a.to_rational(), 30);
        assert_eq!(a, back);
    }
}
