//! Number fields Q(γ) = Q[x]/(m) and their elements in the power basis.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::factor::factor_poly_q;
use super::linalg;
use super::poly::Poly;
use super::rational::{self, Rational};
use super::resultant::resultant_univariate;
use super::roots::{certified_roots, CRoot};
use crate::error::{Error, Result};

const U: f64 = f64::EPSILON / 2.0;

pub struct NumberField {
    min_poly: Poly,
    name: String,
    roots: OnceLock<Result<Vec<CRoot>>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q({}: {})", self.name, self.min_poly)
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
    }
}
impl Eq for NumberField {}

impl Serialize for NumberField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NumberField", 2)?;
        st.serialize_field("min_poly", &self.min_poly)?;
        st.serialize_field("generator_name", &self.name)?;
        st.end()
    }
}

pub type FieldRef = Arc<NumberField>;

impl NumberField {
    /// Field defined by an irreducible polynomial (made monic). Irreducibility
    /// is verified by factoring.
    pub fn new(min_poly: &Poly, name: &str) -> Result<FieldRef> {
        let m = min_poly.monic();
        match m.degree() {
            None | Some(0) => return Err(Error::Precondition("field polynomial must be nonconstant".into())),
            _ => {}
        }
        let f = factor_poly_q(&m);
        if f.len() != 1 || f[0].1 != 1 {
            return Err(Error::Precondition(format!("{m} is not irreducible over Q")));
        }
        Ok(Self::new_unchecked(m, name))
    }

    /// Caller guarantees `min_poly` is monic and irreducible.
    pub fn new_unchecked(min_poly: Poly, name: &str) -> FieldRef {
        debug_assert!(min_poly.is_monic());
        Arc::new(NumberField { min_poly, name: name.to_string(), roots: OnceLock::new() })
    }

    pub fn rationals() -> FieldRef {
        static Q: OnceLock<FieldRef> = OnceLock::new();
        Q.get_or_init(|| Self::new_unchecked(Poly::x(), "a")).clone()
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap()
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    pub fn min_poly(&self) -> &Poly {
        &self.min_poly
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Complex embeddings, ordered by (re, im) of the image of the generator.
    pub fn complex_roots(&self) -> Result<&[CRoot]> {
        match self.roots.get_or_init(|| certified_roots(&self.min_poly)) {
            Ok(v) => Ok(v.as_slice()),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn same(a: &FieldRef, b: &FieldRef) -> bool {
        Arc::ptr_eq(a, b) || a.min_poly == b.min_poly
    }
}

pub fn generator(k: &FieldRef) -> AlgebraicNumber {
    AlgebraicNumber::from_poly(k, &Poly::x())
}

#[derive(Clone)]
pub struct AlgebraicNumber {
    field: FieldRef,
    coords: Vec<Rational>,
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_rationals() {
            return write!(f, "{}", rational::to_string(&self.coords[0]));
        }
        let s = self.to_poly().to_string().replace('x', &self.field.name);
        write!(f, "{s}")
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        if NumberField::same(&self.field, &other.field) {
            return self.coords == other.coords;
        }
        // a rational is equal to the same rational in any field
        match (self.as_rational(), other.as_rational()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for AlgebraicNumber {}

impl Hash for AlgebraicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.as_rational() {
            Some(r) => r.hash(state),
            None => {
                self.field.min_poly.hash(state);
                self.coords.hash(state);
            }
        }
    }
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(r) = self.as_rational() {
            return s.serialize_str(&rational::to_string(&r));
        }
        let mut st = s.serialize_struct("AlgebraicNumber", 2)?;
        st.serialize_field("field", &*self.field)?;
        let c: Vec<String> = self.coords.iter().map(rational::to_string).collect();
        st.serialize_field("coords", &c)?;
        st.end()
    }
}

impl AlgebraicNumber {
    pub fn from_poly(k: &FieldRef, p: &Poly) -> Self {
        let r = if p.degree().is_some_and(|d| d >= k.degree()) { p.rem(&k.min_poly) } else { p.clone() };
        let mut coords = r.into_coeffs();
        coords.resize(k.degree(), Rational::zero());
        AlgebraicNumber { field: k.clone(), coords }
    }

    pub fn from_coords(k: &FieldRef, coords: Vec<Rational>) -> Self {
        assert_eq!(coords.len(), k.degree(), "coordinate vector length must equal field degree");
        AlgebraicNumber { field: k.clone(), coords }
    }

    pub fn rational(k: &FieldRef, r: Rational) -> Self {
        Self::from_poly(k, &Poly::constant(r))
    }

    pub fn from_q(r: Rational) -> Self {
        Self::rational(&NumberField::rationals(), r)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_q(rational::int(n))
    }

    pub fn zero_in(k: &FieldRef) -> Self {
        Self::rational(k, Rational::zero())
    }

    pub fn one_in(k: &FieldRef) -> Self {
        Self::rational(k, Rational::one())
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.coords[1..].iter().all(Zero::is_zero).then(|| self.coords[0].clone())
    }

    /// Move into field `k`; only rationals can change fields.
    pub fn coerce(&self, k: &FieldRef) -> Option<Self> {
        if NumberField::same(&self.field, k) {
            return Some(self.clone());
        }
        self.as_rational().map(|r| Self::rational(k, r))
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        if NumberField::same(&self.field, &o.field) {
            return (self.clone(), o.clone());
        }
        if let Some(b) = o.coerce(&self.field) {
            return (self.clone(), b);
        }
        if let Some(a) = self.coerce(&o.field) {
            return (a, o.clone());
        }
        panic!("arithmetic between different number fields {:?} and {:?}", self.field, o.field);
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (g, s, _) = self.to_poly().xgcd(&self.field.min_poly);
        debug_assert!(g == Poly::one());
        Some(Self::from_poly(&self.field, &s))
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one_in(&self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Some(acc)
    }

    /// Monic minimal polynomial over Q.
    pub fn minimal_polynomial(&self) -> Poly {
        let n = self.field.degree();
        // find the first linear dependency among 1, a, a^2, ...
        let mut powers: Vec<Vec<Rational>> = vec![Self::one_in(&self.field).coords];
        let mut cur = Self::one_in(&self.field);
        for k in 1..=n {
            cur = &cur * self;
            powers.push(cur.coords.clone());
            // columns are powers; solve sum c_i a^i = 0 with c_k = 1
            let rows: Vec<Vec<Rational>> = (0..n)
                .map(|r| powers.iter().map(|v| v[r].clone()).collect())
                .collect();
            let ker = linalg::kernel(&rows, k + 1);
            if let Some(v) = ker.into_iter().find(|v| !v[k].is_zero()) {
                return Poly::new(v).monic();
            }
        }
        unreachable!("element of a degree-{n} field must satisfy a degree-{n} relation")
    }

    pub fn degree(&self) -> usize {
        if self.as_rational().is_some() {
            1
        } else {
            self.minimal_polynomial().degree().unwrap()
        }
    }

    /// N_{K/Q}
    pub fn norm(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        resultant_univariate(&self.field.min_poly, &self.to_poly())
    }

    /// Image under embedding `k` with an absolute error bound.
    pub fn complex_value(&self, k: usize) -> Result<(Complex64, f64)> {
        let roots = self.field.complex_roots()?;
        let root = roots[k];
        let z = root.z();
        let r = root.radius;
        let zn = z.norm();
        let mut v = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut deriv_bound = 0.0;
        let n = self.coords.len();
        for (i, c) in self.coords.iter().enumerate().rev() {
            let cf = rational::to_f64(c);
            v = v * z + cf;
            abs_sum = abs_sum * zn + cf.abs();
            if i >= 1 {
                deriv_bound += cf.abs() * i as f64 * (zn + r).powi(i as i32 - 1);
            }
        }
        let err = deriv_bound * r + (4.0 * n as f64 + 8.0) * U * abs_sum * 1.01;
        Ok((v, err))
    }

    pub fn complex_values(&self) -> Result<Vec<(Complex64, f64)>> {
        (0..self.field.degree()).map(|k| self.complex_value(k)).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(rational::to_string).collect()
    }
}

macro_rules! alg_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a AlgebraicNumber> for &'a AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, o: &AlgebraicNumber) -> AlgebraicNumber {
                let (a, b) = self.common(o);
                let f: fn(&AlgebraicNumber, &AlgebraicNumber) -> AlgebraicNumber = $body;
                f(&a, &b)
            }
        }
        impl $tr<AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, o: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$m(&o)
            }
        }
    };
}

alg_binop!(Add, add, |a, b| AlgebraicNumber {
    field: a.field.clone(),
    coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
});
alg_binop!(Sub, sub, |a, b| AlgebraicNumber {
    field: a.field.clone(),
    coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
});
alg_binop!(Mul, mul, |a, b| {
    if a.field.is_rationals() {
        return AlgebraicNumber { field: a.field.clone(), coords: vec![&a.coords[0] * &b.coords[0]] };
    }
    AlgebraicNumber::from_poly(&a.field, &(&a.to_poly() * &b.to_poly()))
});
alg_binop!(Div, div, |a, b| a * &b.inv().expect("division by zero algebraic number"));

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber { field: self.field.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

/// Modulus of each complex embedding: (value, error bound).
pub fn complex_abs_values(a: &AlgebraicNumber) -> Result<Vec<(f64, f64)>> {
    Ok(a.complex_values()?.into_iter().map(|(z, e)| (z.norm(), e)).collect())
}

/// Certified comparison of |value| against a threshold with decision margin `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Above,
    Below,
    Indeterminate,
}

pub fn compare_abs(value: f64, err: f64, threshold: f64, eps: f64) -> Decision {
    if value - err > threshold + eps {
        Decision::Above
    } else if value + err < threshold - eps {
        Decision::Below
    } else {
        Decision::Indeterminate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    fn sqrt(n: i64) -> AlgebraicNumber {
        let k = NumberField::new(&Poly::from_ints(&[-n, 0, 1]), "s").unwrap();
        generator(&k)
    }

    #[test]
    fn field_arithmetic() {
        let s = sqrt(2);
        assert_eq!(&s * &s, AlgebraicNumber::from_int(2));
        let t = &s + &AlgebraicNumber::from_int(1);
        let ti = t.inv().unwrap();
        assert!((&t * &ti).is_one());
        assert_eq!(t.minimal_polynomial(), Poly::from_ints(&[-1, -2, 1]));
        assert_eq!(t.norm(), int(-1));
        assert_eq!(AlgebraicNumber::from_int(3).minimal_polynomial(), Poly::from_ints(&[-3, 1]));
    }

    #[test]
    fn reducible_rejected() {
        assert!(NumberField::new(&Poly::from_ints(&[-1, 0, 1]), "a").is_err());
    }

    #[test]
    fn moduli_of_two_plus_sqrt3() {
        let s = sqrt(3);
        let a = &s + &AlgebraicNumber::from_int(2);
        let mut v = complex_abs_values(&a).unwrap();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        assert!((v[0].0 - (2.0 - 3f64.sqrt())).abs() <= v[0].1 + 1e-15);
        assert!((v[1].0 - (2.0 + 3f64.sqrt())).abs() <= v[1].1 + 1e-15);
        assert!(v.iter().all(|x| x.1 < 1e-12));
        assert_eq!(compare_abs(v[0].0, v[0].1, 1.0, 1e-9), Decision::Below);
        assert_eq!(compare_abs(v[1].0, v[1].1, 1.0, 1e-9), Decision::Above);
    }

    #[test]
    fn spec_abs_examples() {
        let two = AlgebraicNumber::from_int(2);
        let v = complex_abs_values(&two).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0].0 - 2.0).abs() <= v[0].1 + 1e-300);
        let s = sqrt(2);
        let v = complex_abs_values(&s).unwrap();
        assert_eq!(v.len(), 2);
        for (m, e) in v {
            assert!((m - 2f64.sqrt()).abs() <= e + 1e-15);
        }
    }
}
