//! Univariate polynomials with coefficients in a number field.

use super::field::{AlgebraicNumber, FieldRef};
use super::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct NfPoly {
    field: FieldRef,
    coeffs: Vec<AlgebraicNumber>,
}

impl NfPoly {
    pub fn new(field: &FieldRef, coeffs: Vec<AlgebraicNumber>) -> Self {
        let mut c: Vec<AlgebraicNumber> = coeffs
            .into_iter()
            .map(|a| a.coerce(field).expect("coefficient outside the polynomial's field"))
            .collect();
        while c.last().is_some_and(|a| a.is_zero()) {
            c.pop();
        }
        NfPoly { field: field.clone(), coeffs: c }
    }

    pub fn from_q(field: &FieldRef, p: &Poly) -> Self {
        Self::new(
            field,
            p.coeffs().iter().map(|c| AlgebraicNumber::rational(field, c.clone())).collect(),
        )
    }

    pub fn zero(field: &FieldRef) -> Self {
        Self::new(field, vec![])
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn coeffs(&self) -> &[AlgebraicNumber] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> AlgebraicNumber {
        self.coeffs.get(i).cloned().unwrap_or_else(|| AlgebraicNumber::zero_in(&self.field))
    }

    pub fn lc(&self) -> AlgebraicNumber {
        self.coeff(self.coeffs.len().saturating_sub(1))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(&self.field, (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(&self.field, (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.field);
        }
        let mut v = vec![AlgebraicNumber::zero_in(&self.field); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        Self::new(&self.field, v)
    }

    pub fn scale(&self, c: &AlgebraicNumber) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv().unwrap())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let Some(n) = self.degree() else {
            return (self.clone(), self.clone());
        };
        if n < dd {
            return (Self::zero(&self.field), self.clone());
        }
        let inv = d.lc().inv().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![AlgebraicNumber::zero_in(&self.field); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &(&c * dc);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(&self.field, q), Self::new(&self.field, r))
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, x: &AlgebraicNumber) -> AlgebraicNumber {
        let mut acc = AlgebraicNumber::zero_in(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &AlgebraicNumber::from_int(i as i64))
                .collect(),
        )
    }

    /// Roots lying in the field itself, found through the linear factors of
    /// the gcd with each rational factor of the norm.
    pub fn roots_in_field(&self) -> Vec<AlgebraicNumber> {
        super::primitive::roots_in_field(self)
    }
}
