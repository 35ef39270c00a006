//! Points of P^1, P^2, (P^1)^N and endomorphisms given by homogeneous forms.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::{AlgebraicNumber, MPoly, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Space {
    P1,
    P2,
    P1xN(usize),
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::P1 => write!(f, "P1"),
            Space::P2 => write!(f, "P2"),
            Space::P1xN(n) => write!(f, "P1x{n}"),
        }
    }
}

/// A point with homogeneous coordinates per factor, stored in canonical
/// scaling (last nonzero coordinate of each factor equal to 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    space: Space,
    factors: Vec<Vec<AlgebraicNumber>>,
}

fn canonical(mut v: Vec<AlgebraicNumber>) -> Result<Vec<AlgebraicNumber>> {
    let Some(last) = v.iter().rposition(|c| !c.is_zero()) else {
        return Err(Error::Precondition("all homogeneous coordinates vanish".into()));
    };
    let inv = v[last].inv().unwrap();
    for c in v.iter_mut() {
        *c = &*c * &inv;
    }
    // keep rational coordinates in Q so equality and hashing do not depend on
    // the field a rational value happens to carry
    for c in v.iter_mut() {
        if let Some(r) = c.as_rational() {
            *c = AlgebraicNumber::from_q(r);
        }
    }
    Ok(v)
}

impl ProjPoint {
    pub fn new(space: Space, factors: Vec<Vec<AlgebraicNumber>>) -> Result<Self> {
        let shape_ok = match space {
            Space::P1 => factors.len() == 1 && factors[0].len() == 2,
            Space::P2 => factors.len() == 1 && factors[0].len() == 3,
            Space::P1xN(n) => factors.len() == n && factors.iter().all(|f| f.len() == 2),
        };
        if !shape_ok {
            return Err(Error::Precondition(format!("coordinates do not match space {space}")));
        }
        let factors = factors.into_iter().map(canonical).collect::<Result<_>>()?;
        Ok(ProjPoint { space, factors })
    }

    /// The affine point x of P^1, i.e. [x : 1].
    pub fn p1(x: AlgebraicNumber) -> Self {
        ProjPoint::new(Space::P1, vec![vec![x, AlgebraicNumber::from_int(1)]]).unwrap()
    }

    pub fn p1_rat(x: Rational) -> Self {
        Self::p1(AlgebraicNumber::from_q(x))
    }

    pub fn p1_inf() -> Self {
        ProjPoint::new(Space::P1, vec![vec![AlgebraicNumber::from_int(1), AlgebraicNumber::from_int(0)]])
            .unwrap()
    }

    pub fn p2(c: [AlgebraicNumber; 3]) -> Result<Self> {
        ProjPoint::new(Space::P2, vec![c.to_vec()])
    }

    /// Product point from P^1 factors.
    pub fn product(parts: &[ProjPoint]) -> Result<Self> {
        let mut f = vec![];
        for p in parts {
            if p.space != Space::P1 {
                return Err(Error::Precondition("product of non-P1 points".into()));
            }
            f.push(p.factors[0].clone());
        }
        ProjPoint::new(Space::P1xN(parts.len()), f)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn factors(&self) -> &[Vec<AlgebraicNumber>] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> ProjPoint {
        ProjPoint { space: Space::P1, factors: vec![self.factors[i].clone()] }
    }

    /// Affine coordinate of a P^1 point (None at infinity).
    pub fn affine(&self) -> Option<AlgebraicNumber> {
        let f = &self.factors[0];
        if f.len() != 2 || f[1].is_zero() {
            return None;
        }
        Some(f[0].clone())
    }

    pub fn is_infinity(&self) -> bool {
        self.space == Space::P1 && self.factors[0][1].is_zero()
    }

    /// Multiply every coordinate of every factor by a nonzero scalar.
    pub fn rescaled(&self, lambda: &AlgebraicNumber) -> Vec<Vec<AlgebraicNumber>> {
        self.factors.iter().map(|f| f.iter().map(|c| c * lambda).collect()).collect()
    }

    /// Total bit size of the rational coordinates.
    pub fn height_bits(&self) -> u64 {
        self.factors
            .iter()
            .flatten()
            .flat_map(|c| c.coords().iter())
            .map(|r| r.numer().bits() + r.denom().bits())
            .sum()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|v| {
                let c: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("[{}]", c.join(":"))
            })
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors.serialize(s)
    }
}

/// Homogeneous binary form of degree d stored through its dehomogenization:
/// F(X, Y) = Y^d f(X/Y).
fn hom_eval(f: &Poly, d: usize, x: &AlgebraicNumber, y: &AlgebraicNumber) -> AlgebraicNumber {
    let mut acc = AlgebraicNumber::from_int(0);
    let mut ypow = AlgebraicNumber::from_int(1);
    // Horner in X with Y powers accumulated from the top
    for i in (0..=d).rev() {
        let c = AlgebraicNumber::from_q(f.coeff(i));
        acc = &(&acc * x) + &(&c * &ypow);
        if i > 0 {
            ypow = &ypow * y;
        }
    }
    acc
}

/// A self-map of P^1 given by coprime forms (F1, F2) of equal degree d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Map {
    f1: Poly,
    f2: Poly,
    d: usize,
}

impl P1Map {
    /// [X : Y] -> [F1 : F2] with F_i(X, Y) = Y^d f_i(X/Y).
    pub fn new(f1: Poly, f2: Poly, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("map degree must be at least 1".into()));
        }
        if f1.deg().max(f2.deg()) != d as i64 {
            return Err(Error::Precondition("forms do not have the declared degree".into()));
        }
        // a form of lower degree is divisible by Y; max degree d rules out Y | both
        if f1.is_zero() || f2.is_zero() || !f1.gcd(&f2).is_constant() {
            return Err(Error::Precondition("forms have a common zero".into()));
        }
        let inv = Rational::one() / f2.lc();
        Ok(P1Map { f1: f1.scale(&inv), f2: f2.scale(&inv), d })
    }

    /// The polynomial map x -> p(x).
    pub fn polynomial(p: &Poly) -> Result<Self> {
        let d = p.degree().unwrap_or(0);
        Self::new(p.clone(), Poly::one(), d)
    }

    /// x -> num(x) / den(x) in lowest terms.
    pub fn rational(num: &Poly, den: &Poly) -> Result<Self> {
        let g = num.gcd(den);
        let (n, m) = (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap());
        let d = n.deg().max(m.deg()).max(0) as usize;
        Self::new(n, m, d)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn num(&self) -> &Poly {
        &self.f1
    }

    pub fn den(&self) -> &Poly {
        &self.f2
    }

    /// Some(p) when the map is x -> p(x).
    pub fn as_polynomial(&self) -> Option<Poly> {
        if self.f2.is_constant() {
            Some(self.f1.scale(&(Rational::one() / self.f2.coeff(0))))
        } else {
            None
        }
    }

    pub fn eval_coords(&self, x: &AlgebraicNumber, y: &AlgebraicNumber) -> [AlgebraicNumber; 2] {
        [hom_eval(&self.f1, self.d, x, y), hom_eval(&self.f2, self.d, x, y)]
    }

    pub fn eval_point(&self, p: &ProjPoint) -> Result<ProjPoint> {
        let v = &p.factors[0];
        let [a, b] = self.eval_coords(&v[0], &v[1]);
        ProjPoint::new(Space::P1, vec![vec![a, b]]).map_err(|_| Error::IndeterminatePoint)
    }

    /// self o g
    pub fn compose(&self, g: &P1Map) -> P1Map {
        let (g1, g2) = (&g.f1, &g.f2);
        let mut a = Poly::zero();
        let mut b = Poly::zero();
        for i in 0..=self.d {
            let t = g1.pow(i as u32) * g2.pow((self.d - i) as u32);
            a = a + t.scale(&self.f1.coeff(i));
            b = b + t.scale(&self.f2.coeff(i));
        }
        P1Map::new(a, b, self.d * g.d).expect("composition of endomorphisms")
    }

    pub fn iterate(&self, n: usize) -> P1Map {
        let mut r = self.clone();
        for _ in 1..n.max(1) {
            r = r.compose(self);
        }
        if n == 0 {
            return P1Map::new(Poly::x(), Poly::one(), 1).unwrap();
        }
        r
    }

    /// Derivative of the map in the affine chart at a finite point x with f(x) finite.
    pub fn derivative_at(&self, x: &AlgebraicNumber) -> Option<AlgebraicNumber> {
        let ev = |p: &Poly| -> AlgebraicNumber {
            p.coeffs().iter().rev().fold(AlgebraicNumber::from_int(0), |acc, c| {
                &(&acc * x) + &AlgebraicNumber::from_q(c.clone())
            })
        };
        let (a, b) = (ev(&self.f1), ev(&self.f2));
        if b.is_zero() {
            return None;
        }
        let (da, db) = (ev(&self.f1.derivative()), ev(&self.f2.derivative()));
        Some(&(&(&da * &b) - &(&a * &db)) / &(&b * &b))
    }

    /// Multiplier at a fixed point, using the chart w = 1/x at infinity.
    pub fn multiplier(&self, p: &ProjPoint) -> Result<AlgebraicNumber> {
        match p.affine() {
            Some(x) => self
                .derivative_at(&x)
                .ok_or_else(|| Error::Precondition("not a fixed point".into())),
            None => {
                // g(w) = F2(1, w) / F1(1, w) with F(1, w) = sum c_i w^(d-i)
                let rev = |f: &Poly| Poly::new((0..=self.d).map(|i| f.coeff(self.d - i)).collect());
                let chart = P1Map { f1: rev(&self.f2), f2: rev(&self.f1), d: self.d };
                chart
                    .derivative_at(&AlgebraicNumber::from_int(0))
                    .ok_or_else(|| Error::Precondition("not a fixed point".into()))
            }
        }
    }
}

impl fmt::Display for P1Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_polynomial() {
            Some(p) => write!(f, "{p}"),
            None => write!(f, "({}) / ({})", self.f1, self.f2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasePointCheck {
    Checked,
    Unchecked,
}

/// A self-map of P^2 by three forms of degree d in X, Y, Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P2Map {
    forms: [MPoly; 3],
    d: usize,
    pub base_points: BasePointCheck,
}

impl P2Map {
    pub fn new(forms: [MPoly; 3], d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("map degree must be at least 1".into()));
        }
        for f in &forms {
            if f.nvars() != 3 || !f.is_homogeneous(d as u32) {
                return Err(Error::Precondition(format!("forms are not homogeneous of degree {d}")));
            }
        }
        if forms.iter().all(|f| f.is_zero()) {
            return Err(Error::Precondition("all forms vanish".into()));
        }
        Ok(P2Map { forms, d, base_points: BasePointCheck::Unchecked })
    }

    pub fn forms(&self) -> &[MPoly; 3] {
        &self.forms
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn eval_point(&self, p: &ProjPoint) -> Result<ProjPoint> {
        let v = &p.factors[0];
        let img: Vec<AlgebraicNumber> = self.forms.iter().map(|f| f.eval_alg(v)).collect();
        ProjPoint::new(Space::P2, vec![img]).map_err(|_| Error::IndeterminatePoint)
    }

    /// self o g
    pub fn compose(&self, g: &P2Map) -> P2Map {
        let subs: Vec<MPoly> = g.forms.to_vec();
        let forms = [
            self.forms[0].substitute(&subs),
            self.forms[1].substitute(&subs),
            self.forms[2].substitute(&subs),
        ];
        P2Map { forms, d: self.d * g.d, base_points: BasePointCheck::Unchecked }
    }
}

/// An endomorphism of P^1, P^2 or a split endomorphism of (P^1)^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapSpec {
    P1(P1Map),
    P2(P2Map),
    P1xN(Vec<P1Map>),
}

impl MapSpec {
    pub fn space(&self) -> Space {
        match self {
            MapSpec::P1(_) => Space::P1,
            MapSpec::P2(_) => Space::P2,
            MapSpec::P1xN(v) => Space::P1xN(v.len()),
        }
    }

    pub fn split(factors: Vec<P1Map>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Precondition("split map needs at least one factor".into()));
        }
        Ok(MapSpec::P1xN(factors))
    }

    pub fn compose(&self, g: &MapSpec) -> Result<MapSpec> {
        Ok(match (self, g) {
            (MapSpec::P1(a), MapSpec::P1(b)) => MapSpec::P1(a.compose(b)),
            (MapSpec::P2(a), MapSpec::P2(b)) => MapSpec::P2(a.compose(b)),
            (MapSpec::P1xN(a), MapSpec::P1xN(b)) if a.len() == b.len() => {
                MapSpec::P1xN(a.iter().zip(b).map(|(x, y)| x.compose(y)).collect())
            }
            _ => return Err(Error::Precondition("composition of maps on different spaces".into())),
        })
    }

    pub fn iterate(&self, n: usize) -> Result<MapSpec> {
        if n == 0 {
            return Err(Error::Precondition("iterate count must be positive".into()));
        }
        let mut r = self.clone();
        for _ in 1..n {
            r = r.compose(self)?;
        }
        Ok(r)
    }
}

/// Canonical-scaled image of a point.
pub fn evaluate(f: &MapSpec, x: &ProjPoint) -> Result<ProjPoint> {
    if f.space() != x.space() {
        return Err(Error::Precondition(format!(
            "point in {} but map on {}",
            x.space(),
            f.space()
        )));
    }
    match f {
        MapSpec::P1(m) => m.eval_point(x),
        MapSpec::P2(m) => m.eval_point(x),
        MapSpec::P1xN(ms) => {
            let parts = ms
                .iter()
                .enumerate()
                .map(|(i, m)| m.eval_point(&x.factor(i)))
                .collect::<Result<Vec<_>>>()?;
            ProjPoint::product(&parts)
        }
    }
}

/// Wire form: {"space": "P1"|"P2"|"P1xN", "n": int, "coeffs": [[rational strings]]}.
///
/// For P1 and P2, `n` is the degree d and `coeffs` holds one list per form.
/// For P1xN, `n` is the number of factors and `coeffs` holds 2N lists, the
/// two forms of each factor in turn; each factor's degree is its list length
/// minus one. Monomials are listed in descending lexicographic order of the
/// exponent vector (X^d, X^(d-1) Y, ..., Y^d for binary forms and
/// X^d, X^(d-1) Y, X^(d-1) Z, X^(d-2) Y^2, ..., Z^d for ternary forms).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapSpecWire {
    pub space: String,
    pub n: usize,
    pub coeffs: Vec<Vec<String>>,
}

/// Exponents (a, b, c) of degree d in descending lex order.
pub fn ternary_monomials(d: u32) -> Vec<[u32; 3]> {
    let mut out = vec![];
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

fn parse_list(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| rational::parse(s)).collect()
}

fn binary_from_wire(c: &[Rational]) -> (Poly, usize) {
    // listed X^d ... Y^d, i.e. descending powers of x
    let d = c.len() - 1;
    (Poly::new(c.iter().rev().cloned().collect()), d)
}

fn binary_to_wire(f: &Poly, d: usize) -> Vec<String> {
    (0..=d).rev().map(|i| rational::to_string(&f.coeff(i))).collect()
}

impl MapSpecWire {
    pub fn to_map(&self) -> Result<MapSpec> {
        let lists = self.coeffs.iter().map(|l| parse_list(l)).collect::<Result<Vec<_>>>()?;
        if lists.iter().any(|l| l.is_empty()) {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        let p1_pair = |a: &[Rational], b: &[Rational]| -> Result<P1Map> {
            if a.len() != b.len() {
                return Err(Error::Parse("forms of one P1 map need equal length".into()));
            }
            let (f1, d) = binary_from_wire(a);
            let (f2, _) = binary_from_wire(b);
            P1Map::new(f1, f2, d).map_err(|e| Error::Parse(e.to_string()))
        };
        match self.space.as_str() {
            "P1" => {
                if lists.len() != 2 || lists[0].len() != self.n + 1 {
                    return Err(Error::Parse("P1 spec needs two lists of n+1 coefficients".into()));
                }
                Ok(MapSpec::P1(p1_pair(&lists[0], &lists[1])?))
            }
            "P2" => {
                let mons = ternary_monomials(self.n as u32);
                if lists.len() != 3 || lists.iter().any(|l| l.len() != mons.len()) {
                    return Err(Error::Parse(format!(
                        "P2 spec needs three lists of {} coefficients",
                        mons.len()
                    )));
                }
                let forms: Vec<MPoly> = lists
                    .iter()
                    .map(|l| MPoly::from_terms(3, mons.iter().zip(l).map(|(m, c)| (m.to_vec(), c.clone()))))
                    .collect();
                let forms: [MPoly; 3] = forms.try_into().unwrap();
                P2Map::new(forms, self.n).map(MapSpec::P2).map_err(|e| Error::Parse(e.to_string()))
            }
            "P1xN" => {
                if lists.len() != 2 * self.n || self.n == 0 {
                    return Err(Error::Parse("P1xN spec needs 2n coefficient lists".into()));
                }
                let fs = (0..self.n)
                    .map(|i| p1_pair(&lists[2 * i], &lists[2 * i + 1]))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MapSpec::P1xN(fs))
            }
            s => Err(Error::Parse(format!("unknown space '{s}'"))),
        }
    }

    pub fn from_map(f: &MapSpec) -> Self {
        match f {
            MapSpec::P1(m) => MapSpecWire {
                space: "P1".into(),
                n: m.d,
                coeffs: vec![binary_to_wire(&m.f1, m.d), binary_to_wire(&m.f2, m.d)],
            },
            MapSpec::P2(m) => {
                let mons = ternary_monomials(m.d as u32);
                let coeffs = m
                    .forms
                    .iter()
                    .map(|f| {
                        let terms: std::collections::HashMap<Vec<u32>, Rational> =
                            f.terms().map(|(e, c)| (e.to_vec(), c.clone())).collect();
                        mons.iter()
                            .map(|e| rational::to_string(terms.get(&e.to_vec()).unwrap_or(&Rational::zero())))
                            .collect()
                    })
                    .collect();
                MapSpecWire { space: "P2".into(), n: m.d, coeffs }
            }
            MapSpec::P1xN(ms) => MapSpecWire {
                space: "P1xN".into(),
                n: ms.len(),
                coeffs: ms
                    .iter()
                    .flat_map(|m| [binary_to_wire(&m.f1, m.d), binary_to_wire(&m.f2, m.d)])
                    .collect(),
            },
        }
    }
}

impl Serialize for MapSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapSpecWire::from_map(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MapSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MapSpecWire::deserialize(d)?;
        w.to_map().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    fn sq() -> MapSpec {
        MapSpec::P1(P1Map::polynomial(&Poly::from_ints(&[0, 0, 1])).unwrap())
    }

    #[test]
    fn spec_examples() {
        let x = ProjPoint::p1_rat(int(2));
        assert_eq!(evaluate(&sq(), &x).unwrap(), ProjPoint::p1_rat(int(4)));

        let f = MapSpec::split(vec![
            P1Map::polynomial(&Poly::from_ints(&[0, 0, 1])).unwrap(),
            P1Map::polynomial(&Poly::from_ints(&[0, 0, 0, 1])).unwrap(),
        ])
        .unwrap();
        let pt = ProjPoint::product(&[ProjPoint::p1_rat(int(2)), ProjPoint::p1_rat(int(2))]).unwrap();
        let img = evaluate(&f, &pt).unwrap();
        assert_eq!(img, ProjPoint::product(&[ProjPoint::p1_rat(int(4)), ProjPoint::p1_rat(int(8))]).unwrap());

        let w = MapSpecWire {
            space: "P2".into(),
            n: 2,
            coeffs: vec![
                vec!["1", "0", "0", "0", "0", "0"],
                vec!["0", "0", "0", "1", "0", "0"],
                vec!["0", "0", "0", "0", "0", "1"],
            ]
            .into_iter()
            .map(|v| v.into_iter().map(String::from).collect())
            .collect(),
        };
        let f = w.to_map().unwrap();
        let a = |n| AlgebraicNumber::from_int(n);
        let img = evaluate(&f, &ProjPoint::p2([a(1), a(2), a(3)]).unwrap()).unwrap();
        assert_eq!(img, ProjPoint::p2([a(1), a(4), a(9)]).unwrap());
    }

    #[test]
    fn infinity_and_indeterminacy() {
        assert_eq!(evaluate(&sq(), &ProjPoint::p1_inf()).unwrap(), ProjPoint::p1_inf());
        // [x^2 : y^2 : xy] at [0:0:1] hits a base point
        let m = |e: [u32; 3]| MPoly::from_terms(3, [(e.to_vec(), int(1))]);
        let f = MapSpec::P2(P2Map::new([m([2, 0, 0]), m([0, 2, 0]), m([1, 1, 0])], 2).unwrap());
        let a = |n| AlgebraicNumber::from_int(n);
        let p = ProjPoint::p2([a(0), a(0), a(1)]).unwrap();
        assert_eq!(evaluate(&f, &p), Err(Error::IndeterminatePoint));
    }

    #[test]
    fn wire_round_trip() {
        let f = MapSpec::P1(
            P1Map::rational(&Poly::from_ints(&[0, -8, 0, 0, 1]), &Poly::from_ints(&[4, 0, 0, 4])).unwrap(),
        );
        let s = serde_json::to_string(&f).unwrap();
        let g: MapSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
