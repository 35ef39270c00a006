//! Dense univariate polynomials over Q.
//!
//! Coefficients are stored ascending; the vector is empty for the zero
//! polynomial and otherwise ends in a nonzero coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "rational::serde_rat_vec")]
    coeffs: Vec<Rational>,
}

impl Poly {
    fn normalize(mut self) -> Self {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn new(coeffs: Vec<Rational>) -> Self {
        Poly { coeffs }.normalize()
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `x - a`
    pub fn linear_root(a: &Rational) -> Self {
        Self::new(vec![-a.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = -1.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lc();
        self.scale(&l.recip())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![Rational::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation in any ring that rationals embed into.
    pub fn eval_with<T, F>(&self, x: &T, zero: T, embed: F) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T>,
        F: Fn(&Rational) -> T,
    {
        let mut acc = zero;
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + embed(c);
        }
        acc
    }

    /// p(q(x))
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let Some(n) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if n < dd {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*a + t*b = g monic gcd.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).is_constant(),
        }
    }

    /// Primitive integer polynomial with positive leading coefficient that
    /// is a rational multiple of `self`.
    pub fn primitive_int(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let den = rational::common_denominator(self.coeffs.iter());
        let mut v: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let sign = if v.last().unwrap().is_negative() { -1 } else { 1 };
        for c in v.iter_mut() {
            *c = &*c / &g * sign;
        }
        v
    }

    /// x^n p(1/x)
    pub fn reverse(&self, n: usize) -> Poly {
        let mut v = vec![Rational::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            assert!(i <= n, "reverse degree too small");
            v[n - i] = c.clone();
        }
        Poly::new(v)
    }

    /// p(c x)
    pub fn scale_var(&self, c: &Rational) -> Poly {
        let mut pw = Rational::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            v.push(a * &pw);
            pw *= c;
        }
        Poly::new(v)
    }

    /// Rational roots (distinct), sorted ascending.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = super::factor::factor_poly_q(self)
            .into_iter()
            .filter(|(f, _)| f.degree() == Some(1))
            .map(|(f, _)| -f.coeff(0))
            .collect();
        out.sort();
        out
    }

    /// Maximum coefficient height max(|num|, |den|) as bit length.
    pub fn height_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational::to_string).collect()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &'a Poly) -> Poly {
                (&self).$m(o)
            }
        }
    };
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let cs = rational::to_string(&a);
            match (i, a.is_one()) {
                (0, _) => write!(f, "{cs}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{cs}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{cs}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Lagrange interpolation through distinct nodes.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
    assert_eq!(xs.len(), ys.len());
    // Newton divided differences
    let n = xs.len();
    let mut dd: Vec<Rational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut acc = Poly::zero();
    for i in (0..n).rev() {
        acc = &(&acc * &Poly::linear_root(&xs[i])) + &Poly::constant(dd[i].clone());
    }
    acc
}
