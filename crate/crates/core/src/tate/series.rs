//! Truncated bivariate Tate series over Q_p on the closed unit polydisk.
//!
//! Coefficients are stored as integers: the coefficient of x^i y^j equals
//! c_ij / p^shift and is known modulo p^prec. Every series carries a bound
//! p^-k on the Gauss norm of everything discarded so far (`tail`), or `None`
//! when no such bound is available.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::padic::element::{ppow, PadicElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateSeries2 {
    p: u64,
    t: u32,
    prec: i64,
    shift: i64,
    c: Vec<BigInt>,
    tail: Option<i64>,
}

/// Gauss norm of the stored part as an exponent v (norm p^-v), with the tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GaussNorm {
    /// `None` when every stored coefficient vanishes at precision.
    pub val: Option<i64>,
    pub tail: Option<i64>,
    pub prec: i64,
}

impl GaussNorm {
    pub fn value(&self, p: u64) -> f64 {
        match self.val {
            Some(v) => (p as f64).powi(-v as i32),
            None => 0.0,
        }
    }

    /// Exponent of a certified upper bound on the full norm.
    pub fn upper_exponent(&self) -> Option<i64> {
        let v = self.val.unwrap_or(self.prec);
        self.tail.map(|t| v.min(t))
    }
}

fn idx(i: u32, j: u32) -> usize {
    let d = (i + j) as usize;
    d * (d + 1) / 2 + j as usize
}

fn size(t: u32) -> usize {
    let t = t as usize;
    (t + 1) * (t + 2) / 2
}

fn vp(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        k += 1;
    }
    Some(k)
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        _ => None,
    }
}

impl TateSeries2 {
    pub fn zero(p: u64, t: u32, prec: i64) -> Self {
        TateSeries2 { p, t, prec, shift: 0, c: vec![BigInt::zero(); size(t)], tail: Some(prec) }
    }

    /// Polynomial with rational coefficients; terms of total degree above T
    /// go into the tail bound.
    pub fn from_terms(p: u64, t: u32, prec: i64, terms: &[(u32, u32, Rational)]) -> Self {
        let shift = terms
            .iter()
            .filter_map(|(_, _, c)| rational::valuation(c, p))
            .map(|v| -v)
            .max()
            .unwrap_or(0)
            .max(0);
        let m = ppow(p, prec + shift);
        let mut s = TateSeries2 { p, t, prec, shift, c: vec![BigInt::zero(); size(t)], tail: Some(prec) };
        for (i, j, c) in terms {
            if c.is_zero() {
                continue;
            }
            let scaled = c * Rational::from(ppow(p, shift));
            let pe = PadicElement::from_rational(p, &scaled, prec + shift);
            if i + j > t {
                let v = rational::valuation(c, p).unwrap();
                s.tail = min_opt(s.tail, Some(v));
                continue;
            }
            let k = idx(*i, *j);
            let r = pe.to_bigint().expect("integral after scaling");
            s.c[k] = (&s.c[k] + r).mod_floor(&m);
        }
        s.normalize()
    }

    pub fn from_int_terms(p: u64, t: u32, prec: i64, terms: &[(u32, u32, i64)]) -> Self {
        let v: Vec<(u32, u32, Rational)> = terms.iter().map(|&(i, j, c)| (i, j, rational::int(c))).collect();
        Self::from_terms(p, t, prec, &v)
    }

    pub fn x(p: u64, t: u32, prec: i64) -> Self {
        Self::from_int_terms(p, t, prec, &[(1, 0, 1)])
    }

    pub fn y(p: u64, t: u32, prec: i64) -> Self {
        Self::from_int_terms(p, t, prec, &[(0, 1, 1)])
    }

    pub fn constant(p: u64, t: u32, prec: i64, c: &Rational) -> Self {
        Self::from_terms(p, t, prec, &[(0, 0, c.clone())])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn truncation(&self) -> u32 {
        self.t
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn tail(&self) -> Option<i64> {
        self.tail
    }

    pub fn with_tail(mut self, tail: Option<i64>) -> Self {
        self.tail = tail.map(|k| k.min(self.prec));
        self
    }

    fn modulus(&self) -> BigInt {
        ppow(self.p, self.prec + self.shift)
    }

    /// Lower the shift as far as the stored integers allow.
    fn normalize(mut self) -> Self {
        self.tail = self.tail.map(|k| k.min(self.prec));
        if self.shift == 0 {
            return self;
        }
        let v = self.c.iter().filter_map(|c| vp(c, self.p)).min().unwrap_or(self.shift);
        let k = v.min(self.shift);
        if k > 0 {
            let d = ppow(self.p, k);
            for c in self.c.iter_mut() {
                *c = &*c / &d;
            }
            self.shift -= k;
        }
        self
    }

    pub fn coeff(&self, i: u32, j: u32) -> PadicElement {
        if i + j > self.t {
            return PadicElement::zero(self.p, self.prec);
        }
        PadicElement::from_bigint(self.p, &self.c[idx(i, j)], self.prec + self.shift).shift(-self.shift)
    }

    /// Nonzero stored terms (i, j, coefficient), by total degree then j.
    pub fn terms(&self) -> Vec<(u32, u32, PadicElement)> {
        let mut out = vec![];
        for d in 0..=self.t {
            for j in 0..=d {
                let i = d - j;
                if !self.c[idx(i, j)].is_zero() {
                    out.push((i, j, self.coeff(i, j)));
                }
            }
        }
        out
    }

    fn nonzero(&self) -> Vec<(u32, u32, &BigInt)> {
        let mut out = vec![];
        for d in 0..=self.t {
            for j in 0..=d {
                let c = &self.c[idx(d - j, j)];
                if !c.is_zero() {
                    out.push((d - j, j, c));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn gauss_norm(&self) -> GaussNorm {
        let val = self.c.iter().filter_map(|c| vp(c, self.p)).min().map(|v| v - self.shift);
        GaussNorm { val, tail: self.tail, prec: self.prec }
    }

    /// Norm exponent of the stored part, with zero-at-precision read as prec.
    fn val_or_prec(&self) -> i64 {
        self.gauss_norm().val.unwrap_or(self.prec)
    }

    fn check(&self, o: &Self) {
        assert_eq!((self.p, self.t), (o.p, o.t), "Tate series with different prime or truncation");
    }

    fn aligned(&self, shift: i64, prec: i64) -> Vec<BigInt> {
        let up = ppow(self.p, shift - self.shift);
        let m = ppow(self.p, prec + shift);
        self.c.iter().map(|c| (c * &up).mod_floor(&m)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let shift = self.shift.max(o.shift);
        let prec = self.prec.min(o.prec);
        let a = self.aligned(shift, prec);
        let b = o.aligned(shift, prec);
        let m = ppow(self.p, prec + shift);
        let c = a.iter().zip(&b).map(|(x, y)| (x + y).mod_floor(&m)).collect();
        TateSeries2 { p: self.p, t: self.t, prec, shift, c, tail: min_opt(self.tail, o.tail) }.normalize()
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        let c = self.c.iter().map(|x| (-x).mod_floor(&m)).collect();
        TateSeries2 { c, ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return TateSeries2::zero(self.p, self.t, self.prec);
        }
        // k = p^v u with u a unit
        let v = rational::valuation(k, self.p).unwrap();
        let unit = k / Rational::from(ppow(self.p, v));
        let m = self.modulus();
        let u = PadicElement::from_rational(self.p, &unit, self.prec + self.shift)
            .to_bigint()
            .unwrap();
        let mut c: Vec<BigInt> = self.c.iter().map(|x| (x * &u).mod_floor(&m)).collect();
        let mut shift = self.shift - v;
        if shift < 0 {
            let up = ppow(self.p, -shift);
            c = c.iter().map(|x| x * &up).collect();
            shift = 0;
        }
        let out = TateSeries2 {
            p: self.p,
            t: self.t,
            prec: self.prec + v,
            shift,
            c,
            tail: self.tail.map(|k| k + v),
        };
        out.normalize()
    }

    /// Product truncated at total degree T; discarded terms enter the tail.
    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let (p, t) = (self.p, self.t);
        let shift = self.shift + o.shift;
        // absolute error of a product term: p^prec_a * |b| and p^prec_b * |a|
        let prec = (self.prec + o.val_or_prec().min(0)).min(o.prec + self.val_or_prec().min(0));
        let m = ppow(p, prec + shift);
        let mut acc = vec![BigInt::zero(); size(t)];
        let mut dropped: Option<i64> = None;
        let a = self.nonzero();
        let b = o.nonzero();
        for &(i1, j1, c1) in &a {
            for &(i2, j2, c2) in &b {
                let prod = c1 * c2;
                if i1 + i2 + j1 + j2 > t {
                    if let Some(v) = vp(&(&prod % &m), p) {
                        let v = v - shift;
                        dropped = Some(dropped.map_or(v, |d| d.min(v)));
                    }
                    continue;
                }
                acc[idx(i1 + i2, j1 + j2)] += prod;
            }
        }
        let c = acc.into_iter().map(|x| x.mod_floor(&m)).collect();
        let (va, vb) = (self.val_or_prec(), o.val_or_prec());
        let mut tail = match (self.tail, o.tail) {
            (Some(ka), Some(kb)) => Some((va + kb).min(vb + ka).min(ka + kb)),
            _ => None,
        };
        if let Some(d) = dropped {
            tail = tail.map(|k| k.min(d));
        }
        TateSeries2 { p, t, prec, shift, c, tail }.normalize()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::constant(self.p, self.t, self.prec, &Rational::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// s(f1, f2) for integral f1, f2 (norms at most 1).
    pub fn compose_with(&self, f1: &Self, f2: &Self) -> Result<Self> {
        for f in [f1, f2] {
            if f.gauss_norm().val.is_some_and(|v| v < 0) || f.tail.is_some_and(|k| k < 0) {
                return Err(Error::NotPolydiskSelfMap);
            }
        }
        let t = self.t;
        let mut pow2 = vec![Self::constant(self.p, t, f2.prec, &Rational::one())];
        for _ in 0..t {
            let next = pow2.last().unwrap().mul(f2);
            pow2.push(next);
        }
        // Horner in f1 over g_i = sum_j c_ij f2^j
        let mut result = Self::zero(self.p, t, self.prec.min(f1.prec).min(f2.prec));
        for i in (0..=t).rev() {
            let mut g = Self::zero(self.p, t, result.prec);
            for j in 0..=(t - i) {
                let c = &self.c[idx(i, j)];
                if c.is_zero() {
                    continue;
                }
                let coef = Rational::new(c.clone(), ppow(self.p, self.shift));
                g = g.add(&pow2[j as usize].scale(&coef));
            }
            result = result.mul(f1).add(&g);
        }
        let tail = min_opt(result.tail, self.tail);
        Ok(result.with_tail(tail))
    }

    /// Value at a point of the closed unit polydisk (stored part only).
    pub fn eval(&self, x: &PadicElement, y: &PadicElement) -> PadicElement {
        let mut acc = PadicElement::zero(self.p, self.prec);
        for (i, j, c) in self.terms() {
            acc = &acc + &(&(&c * &x.pow(i as u64)) * &y.pow(j as u64));
        }
        acc
    }

    /// Same coefficients read at a smaller truncation order.
    pub fn retruncate(&self, t: u32) -> Self {
        let mut out = Self::zero(self.p, t, self.prec);
        out.shift = self.shift;
        out.tail = self.tail;
        for (i, j, c) in self.nonzero() {
            if i + j <= t {
                out.c[idx(i, j)] = c.clone();
            } else if let Some(v) = vp(c, self.p) {
                out.tail = out.tail.map(|k| k.min(v - self.shift));
            }
        }
        out.normalize()
    }
}

impl fmt::Display for TateSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(i, j, c)| format!("({}) x^{i} y^{j}", rational::to_string(&c.to_rational())))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    i: u32,
    j: u32,
    c: PadicElement,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    p: u64,
    #[serde(rename = "T")]
    t: u32,
    terms: Vec<Term>,
    tail: String,
}

impl Serialize for TateSeries2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.terms().into_iter().map(|(i, j, c)| Term { i, j, c }).collect();
        let tail = match self.tail {
            Some(k) => format!("p^-{k}"),
            None => "none".into(),
        };
        Wire { p: self.p, t: self.t, terms, tail }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TateSeries2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let prec = w.terms.iter().map(|t| t.c.prec()).min().unwrap_or(crate::DEFAULT_PRECISION);
        let terms: Vec<(u32, u32, Rational)> = w.terms.iter().map(|t| (t.i, t.j, t.c.to_rational())).collect();
        let tail = if w.tail == "none" {
            None
        } else {
            let k = w
                .tail
                .strip_prefix("p^-")
                .and_then(|k| k.parse::<i64>().ok())
                .ok_or_else(|| serde::de::Error::custom(format!("bad tail '{}'", w.tail)))?;
            Some(k)
        };
        Ok(TateSeries2::from_terms(w.p, w.t, prec, &terms).with_tail(tail))
    }
}
