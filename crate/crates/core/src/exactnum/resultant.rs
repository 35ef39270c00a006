//! Univariate and bivariate resultants over Q.
//!
//! Bivariate resultants are computed by evaluating the eliminated system at
//! enough integer points and interpolating.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::poly::{interpolate, Poly};
use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Sylvester resultant of two univariate polynomials.
/// Convention: res(f, c) = c^{deg f} for constant c; res(0, g) = 0.
pub fn resultant_univariate(f: &Poly, g: &Poly) -> Rational {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Rational::zero();
    };
    if n == 0 {
        return g.coeff(0).pow(m as i32);
    }
    if m == 0 {
        return f.coeff(0).pow(n as i32);
    }
    if m < n {
        let s = if (m * n) % 2 == 1 { -Rational::one() } else { Rational::one() };
        return s * resultant_univariate(g, f);
    }
    // m >= n >= 1: f = q g + r
    let r = f.rem(g);
    if r.is_zero() {
        return Rational::zero();
    }
    let dr = r.degree().unwrap();
    let sign = if (m * n) % 2 == 1 { -Rational::one() } else { Rational::one() };
    sign * g.lc().pow((m - dr) as i32) * resultant_univariate(g, &r)
}

pub fn discriminant(f: &Poly) -> Rational {
    let n = f.degree().unwrap_or(0);
    let r = resultant_univariate(f, &f.derivative());
    let s = if (n * (n.saturating_sub(1)) / 2) % 2 == 1 { -Rational::one() } else { Rational::one() };
    s * r / f.lc()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Var {
    X,
    Y,
}

/// Sparse bivariate polynomial; key (i, j) is the monomial x^i y^j.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), Rational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((usize, usize), Rational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in it {
            p.add_term(k.0, k.1, c);
        }
        p
    }

    pub fn from_int_terms(t: &[((usize, usize), i64)]) -> Self {
        Self::from_terms(t.iter().map(|&(k, c)| (k, rational::int(c))))
    }

    /// Polynomial in x only.
    pub fn from_x(p: &Poly) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(i, c)| ((i, 0), c.clone())))
    }

    /// Polynomial in y only.
    pub fn from_y(p: &Poly) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(j, c)| ((0, j), c.clone())))
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_x(&self) -> usize {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> usize {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn swap_vars(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&(i, j), c) in &o.terms {
            r.add_term(i, j, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&(i, j), c) in &o.terms {
            r.add_term(i, j, -c.clone());
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                r.add_term(i + k, j + l, a * b);
            }
        }
        r
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c * x.pow(i as i32) * y.pow(j as i32))
            .sum()
    }

    /// Substitute x = x0, giving a polynomial in y.
    pub fn at_x(&self, x0: &Rational) -> Poly {
        let mut v = vec![Rational::zero(); self.deg_y() + 1];
        for (&(i, j), c) in &self.terms {
            v[j] += c * x0.pow(i as i32);
        }
        Poly::new(v)
    }

    /// Substitute y = y0, giving a polynomial in x.
    pub fn at_y(&self, y0: &Rational) -> Poly {
        self.swap_vars().at_x(y0)
    }

    /// Coefficient of y^j as a polynomial in x.
    pub fn coeff_y(&self, j: usize) -> Poly {
        let mut v = vec![Rational::zero(); self.deg_x() + 1];
        for (&(i, jj), c) in &self.terms {
            if jj == j {
                v[i] += c.clone();
            }
        }
        Poly::new(v)
    }

    /// p(x, y) with x replaced by a + b y (a, b rational).
    pub fn shear_x(&self, a: &Rational, b: &Rational) -> Self {
        let lin = BiPoly::from_terms([((0, 0), a.clone()), ((0, 1), b.clone())]);
        let mut r = Self::zero();
        for (&(i, j), c) in &self.terms {
            let mut t = BiPoly::from_terms([((0, j), c.clone())]);
            for _ in 0..i {
                t = t.mul(&lin);
            }
            r = r.add(&t);
        }
        r
    }
}

/// Sylvester resultant eliminating `eliminate`; returns a polynomial in the
/// other variable.
pub fn resultant(p: &BiPoly, q: &BiPoly, eliminate: Var) -> Result<Poly> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::Precondition("resultant of two zero polynomials is undefined".into()));
    }
    let (p, q) = match eliminate {
        Var::Y => (p.clone(), q.clone()),
        Var::X => (p.swap_vars(), q.swap_vars()),
    };
    if p.is_zero() || q.is_zero() {
        return Ok(Poly::zero());
    }
    let (m, n) = (p.deg_y(), q.deg_y());
    let bound = m * q.deg_x() + n * p.deg_x();
    let (lp, lq) = (p.coeff_y(m), q.coeff_y(n));
    Ok(interpolate_resultant(bound, |x0| {
        if lp.eval(x0).is_zero() || lq.eval(x0).is_zero() {
            return None;
        }
        Some(resultant_univariate(&p.at_x(x0), &q.at_x(x0)))
    }))
}

/// Interpolate a polynomial of degree <= `bound` from an evaluator that may
/// decline some nodes (returns `None` where a specialization is degenerate).
pub fn interpolate_resultant<F: FnMut(&Rational) -> Option<Rational>>(bound: usize, mut eval: F) -> Poly {
    let mut xs = vec![];
    let mut ys = vec![];
    let mut t: i64 = 0;
    while xs.len() < bound + 1 {
        let x0 = rational::int(if t % 2 == 0 { t / 2 } else { -(t + 1) / 2 });
        t += 1;
        if let Some(v) = eval(&x0) {
            xs.push(x0);
            ys.push(v);
        }
        assert!(t < 100_000, "no admissible interpolation nodes");
    }
    interpolate(&xs, &ys)
}
