//! Fixed points and their multipliers.

use num_traits::{One, Zero};
use serde::Serialize;

use super::map::{MapSpec, P1Map, P2Map, ProjPoint, Space};
use crate::error::{Error, Result};
use crate::exactnum::primitive::{adjoin_root, field_of_root};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::resultant::{resultant, BiPoly, Var};
use crate::exactnum::{factor_poly_q, generator, AlgebraicNumber, FieldRef, MPoly, NfPoly, Poly};

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointData {
    pub point: ProjPoint,
    /// Eigenvalues of the tangent map.
    pub multipliers: Vec<AlgebraicNumber>,
    pub multiplicity: usize,
    pub degenerate: bool,
    /// For each P^1 factor (or the single P^2 point), the index of the complex
    /// embedding of the coordinate field this entry stands for. Rational
    /// points use 0. Conjugate fixed points share the same abstract
    /// coordinates and differ only here.
    pub embeddings: Vec<usize>,
}

pub fn fixed_points(f: &MapSpec) -> Result<Vec<FixedPointData>> {
    match f {
        MapSpec::P1(m) => p1_fixed(m),
        MapSpec::P1xN(ms) => split_fixed(ms),
        MapSpec::P2(m) => p2_fixed(m),
    }
}

/// Roots of a rational polynomial grouped by irreducible factor: (field,
/// root in that field, multiplicity, number of conjugates).
fn roots_by_factor(p: &Poly, name: &str) -> Vec<(FieldRef, AlgebraicNumber, usize, usize)> {
    factor_poly_q(p)
        .into_iter()
        .map(|(h, mult)| {
            let k = field_of_root(&h, name);
            let deg = h.degree().unwrap();
            let root = if deg == 1 {
                AlgebraicNumber::rational(&k, -h.coeff(0))
            } else {
                generator(&k)
            };
            (k, root, mult, deg)
        })
        .collect()
}

pub(crate) fn p1_fixed(m: &P1Map) -> Result<Vec<FixedPointData>> {
    let d = m.degree();
    // Y F1 - X F2 dehomogenized
    let fix = m.num() - &(&Poly::x() * m.den());
    if fix.is_zero() {
        return Err(Error::PositiveDimensionalFixedLocus);
    }
    let mut out = vec![];
    for (_, root, mult, deg) in roots_by_factor(&fix, "a") {
        let pt = ProjPoint::p1(root.clone());
        let lam = m.multiplier(&pt)?;
        for k in 0..deg {
            out.push(FixedPointData {
                point: pt.clone(),
                multipliers: vec![lam.clone()],
                multiplicity: mult,
                degenerate: mult > 1,
                embeddings: vec![k],
            });
        }
    }
    let inf_mult = d + 1 - fix.degree().unwrap();
    if inf_mult > 0 {
        let pt = ProjPoint::p1_inf();
        let lam = m.multiplier(&pt)?;
        out.push(FixedPointData {
            point: pt,
            multipliers: vec![lam],
            multiplicity: inf_mult,
            degenerate: inf_mult > 1,
            embeddings: vec![0],
        });
    }
    Ok(out)
}

fn split_fixed(ms: &[P1Map]) -> Result<Vec<FixedPointData>> {
    let per: Vec<Vec<FixedPointData>> = ms.iter().map(p1_fixed).collect::<Result<_>>()?;
    let mut out: Vec<FixedPointData> = vec![];
    let mut idx = vec![0usize; per.len()];
    if per.iter().any(|v| v.is_empty()) {
        return Ok(out);
    }
    loop {
        let parts: Vec<&FixedPointData> = idx.iter().zip(&per).map(|(&i, v)| &v[i]).collect();
        let pts: Vec<ProjPoint> = parts.iter().map(|p| p.point.clone()).collect();
        let mult: usize = parts.iter().map(|p| p.multiplicity).product();
        out.push(FixedPointData {
            point: ProjPoint::product(&pts)?,
            multipliers: parts.iter().map(|p| p.multipliers[0].clone()).collect(),
            multiplicity: mult,
            degenerate: parts.iter().any(|p| p.degenerate),
            embeddings: parts.iter().map(|p| p.embeddings[0]).collect(),
        });
        // odometer
        let mut j = per.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < per[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn lin(c: [i64; 3]) -> MPoly {
    let mut p = MPoly::zero(3);
    for (i, &ci) in c.iter().enumerate() {
        let mut e = vec![0; 3];
        e[i] = 1;
        p.add_term(e, rational::int(ci));
    }
    p
}

/// Forms of M^-1 o F o M for M = [[1,0,0],[0,1,0],[k1,k2,1]].
fn conjugate(forms: &[MPoly; 3], k1: i64, k2: i64) -> [MPoly; 3] {
    let subs = [lin([1, 0, 0]), lin([0, 1, 0]), lin([k1, k2, 1])];
    let g: Vec<MPoly> = forms.iter().map(|f| f.substitute(&subs)).collect();
    let g2 = g[2]
        .sub(&g[0].scale(&rational::int(k1)))
        .sub(&g[1].scale(&rational::int(k2)));
    [g[0].clone(), g[1].clone(), g2]
}

fn at_chart(f: &MPoly, fixed: usize, value: &Rational) -> BiPoly {
    // restrict to the other two variables in order
    let mut b = BiPoly::zero();
    for (e, c) in f.terms() {
        let free: Vec<usize> = (0..3).filter(|&i| i != fixed).collect();
        let t = c * value.pow(e[fixed] as i32);
        b.add_term(e[free[0]] as usize, e[free[1]] as usize, t);
    }
    b
}

fn univ_at_infinity(f: &MPoly) -> Poly {
    // f(x, 1, 0)
    let mut v = vec![Rational::zero(); f.total_degree() as usize + 1];
    for (e, c) in f.terms() {
        if e[2] == 0 {
            v[e[0] as usize] += c;
        }
    }
    Poly::new(v)
}

fn has_fixed_point_at_infinity(g: &[MPoly; 3]) -> bool {
    let a = univ_at_infinity(&g[2]);
    let b = &(&Poly::x() * &univ_at_infinity(&g[1])) - &univ_at_infinity(&g[0]);
    if a.is_zero() && b.is_zero() {
        return true;
    }
    if !a.gcd(&b).is_constant() {
        return true;
    }
    let e100 = |f: &MPoly| f.eval(&[Rational::one(), Rational::zero(), Rational::zero()]);
    e100(&g[1]).is_zero() && e100(&g[2]).is_zero()
}

/// A common zero of two polynomials in the chart z = 1.
pub(crate) struct AffineSolution {
    pub x: AlgebraicNumber,
    pub y: AlgebraicNumber,
    pub mult: usize,
    pub conjugates: usize,
}

fn bi_at_x(p: &BiPoly, k: &FieldRef, a: &AlgebraicNumber) -> NfPoly {
    let mut coeffs = vec![AlgebraicNumber::zero_in(k); p.deg_y() + 1];
    for (&(i, j), c) in p.terms() {
        let t = &AlgebraicNumber::rational(k, c.clone()) * &a.pow(i as i64).unwrap();
        coeffs[j] = &coeffs[j] + &t;
    }
    NfPoly::new(k, coeffs)
}

/// Affine common zeros of p and q (3-variable polynomials restricted to z = 1).
/// A shear x -> x + k y is chosen so that distinct solutions have distinct
/// x-coordinates; the solution count is then read off the resultant.
pub(crate) fn affine_solutions(p: &MPoly, q: &MPoly) -> Result<Vec<AffineSolution>> {
    for k in 0..=32i64 {
        let subs = [lin([1, k, 0]), lin([0, 1, 0]), lin([0, 0, 1])];
        let ps = at_chart(&p.substitute(&subs), 2, &Rational::one());
        let qs = at_chart(&q.substitute(&subs), 2, &Rational::one());
        let r = resultant(&ps, &qs, Var::Y)?;
        if r.is_zero() {
            return Err(Error::PositiveDimensionalFixedLocus);
        }
        let mut sols = vec![];
        let mut generic = true;
        for (h, mult) in factor_poly_q(&r) {
            let kf = field_of_root(&h, "a");
            let deg = h.degree().unwrap();
            let alpha = if deg == 1 {
                AlgebraicNumber::rational(&kf, -h.coeff(0))
            } else {
                generator(&kf)
            };
            let g = bi_at_x(&ps, &kf, &alpha).gcd(&bi_at_x(&qs, &kf, &alpha));
            match g.degree() {
                None | Some(0) => continue,
                _ => {}
            }
            let sf = g.div_rem(&g.gcd(&g.derivative())).0.monic();
            if sf.degree() != Some(1) {
                generic = false;
                break;
            }
            let beta = -sf.coeff(0);
            let x = &alpha + &(&AlgebraicNumber::from_int(k) * &beta);
            sols.push(AffineSolution { x, y: beta, mult, conjugates: deg });
        }
        if generic {
            return Ok(sols);
        }
    }
    Err(Error::Resolution("no generic projection found for the fixed-point system".into()))
}

/// Eigenvalues of a 2x2 matrix over a number field.
pub(crate) fn eigenvalues2(m: [[AlgebraicNumber; 2]; 2]) -> Result<Vec<AlgebraicNumber>> {
    let tr = &m[0][0] + &m[1][1];
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    let k = [&m[0][0], &m[0][1], &m[1][0], &m[1][1]]
        .iter()
        .find(|a| a.as_rational().is_none())
        .map(|a| a.field().clone())
        .unwrap_or_else(crate::exactnum::NumberField::rationals);
    let cp = NfPoly::new(&k, vec![det.coerce(&k).unwrap(), (-&tr).coerce(&k).unwrap(), AlgebraicNumber::one_in(&k)]);
    let (_, emb, l1) = adjoin_root(&cp)?;
    let l2 = &emb.apply(&tr) - &l1;
    let mut v = vec![l1, l2];
    v.sort_by(|a, b| a.coords().cmp(b.coords()));
    Ok(v)
}

/// Jacobian at an affine fixed point (x, y, 1) of the map (G0/G2, G1/G2).
fn jacobian_chart(g: &[MPoly; 3], x: &AlgebraicNumber, y: &AlgebraicNumber) -> [[AlgebraicNumber; 2]; 2] {
    let pt = [x.clone(), y.clone(), AlgebraicNumber::from_int(1)];
    let g2 = g[2].eval_alg(&pt);
    let coord = [x, y];
    let entry = |i: usize, c: usize| {
        let a = g[i].partial(c).eval_alg(&pt);
        let b = g[2].partial(c).eval_alg(&pt);
        &(&a - &(coord[i] * &b)) / &g2
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// Sequence of (k1, k2) for the change of coordinates.
fn chart_shifts() -> impl Iterator<Item = (i64, i64)> {
    (0..8i64).flat_map(|s| (0..=s).map(move |a| (a, s - a)))
}

fn p2_fixed(m: &P2Map) -> Result<Vec<FixedPointData>> {
    let forms = m.forms();
    for (k1, k2) in chart_shifts() {
        let g = conjugate(forms, k1, k2);
        if has_fixed_point_at_infinity(&g) {
            continue;
        }
        let x = MPoly::var(3, 0);
        let y = MPoly::var(3, 1);
        let p = g[0].sub(&x.mul(&g[2]));
        let q = g[1].sub(&y.mul(&g[2]));
        let sols = affine_solutions(&p, &q)?;
        let mut out = vec![];
        for s in sols {
            let z = &(&(&AlgebraicNumber::from_int(k1) * &s.x) + &(&AlgebraicNumber::from_int(k2) * &s.y))
                + &AlgebraicNumber::from_int(1);
            // a common zero of all three forms solves both equations
            if g[2].eval_alg(&[s.x.clone(), s.y.clone(), AlgebraicNumber::from_int(1)]).is_zero() {
                return Err(Error::IndeterminatePoint);
            }
            let point = ProjPoint::new(Space::P2, vec![vec![s.x.clone(), s.y.clone(), z]])?;
            let lams = eigenvalues2(jacobian_chart(&g, &s.x, &s.y))?;
            for e in 0..s.conjugates {
                out.push(FixedPointData {
                    point: point.clone(),
                    multipliers: lams.clone(),
                    multiplicity: s.mult,
                    degenerate: s.mult > 1,
                    embeddings: vec![e],
                });
            }
        }
        return Ok(out);
    }
    Err(Error::PositiveDimensionalFixedLocus)
}

/// Verify that three forms have no common zero; on success the map is
/// recorded as checked.
pub fn check_base_point_free(m: &mut P2Map) -> Result<()> {
    let forms = m.forms().clone();
    for (k1, k2) in chart_shifts() {
        let subs = [lin([1, 0, 0]), lin([0, 1, 0]), lin([k1, k2, 1])];
        let g: Vec<MPoly> = forms.iter().map(|f| f.substitute(&subs)).collect();
        // common zeros of g0, g1 on the line z = 0 must be absent for this chart
        let a = univ_at_infinity(&g[0]);
        let b = univ_at_infinity(&g[1]);
        let e100 = |f: &MPoly| f.eval(&[Rational::one(), Rational::zero(), Rational::zero()]);
        if (a.is_zero() && b.is_zero()) || !a.gcd(&b).is_constant() || (e100(&g[0]).is_zero() && e100(&g[1]).is_zero()) {
            continue;
        }
        let sols = match affine_solutions(&g[0], &g[1]) {
            Ok(s) => s,
            Err(Error::PositiveDimensionalFixedLocus) => return Err(Error::IndeterminatePoint),
            Err(e) => return Err(e),
        };
        for s in sols {
            let v = g[2].eval_alg(&[s.x, s.y, AlgebraicNumber::from_int(1)]);
            if v.is_zero() {
                return Err(Error::IndeterminatePoint);
            }
        }
        m.base_points = super::map::BasePointCheck::Checked;
        return Ok(());
    }
    Err(Error::IndeterminatePoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    fn poly_map(c: &[i64]) -> MapSpec {
        MapSpec::P1(P1Map::polynomial(&Poly::from_ints(c)).unwrap())
    }

    fn values(a: &AlgebraicNumber, k: usize) -> f64 {
        a.complex_value(k).unwrap().0.re
    }

    #[test]
    fn spec_examples() {
        let fx = fixed_points(&poly_map(&[0, 0, 1])).unwrap();
        let mut got: Vec<(String, String)> =
            fx.iter().map(|f| (f.point.to_string(), f.multipliers[0].to_string())).collect();
        got.sort();
        assert_eq!(
            got,
            vec![
                ("[0:1]".into(), "0".into()),
                ("[1:0]".into(), "0".into()),
                ("[1:1]".into(), "2".into())
            ]
        );

        let fx = fixed_points(&poly_map(&[-1, 0, 1])).unwrap();
        assert_eq!(fx.len(), 3);
        let mut lams: Vec<f64> = fx
            .iter()
            .filter(|f| !f.point.is_infinity())
            .map(|f| values(&f.multipliers[0], f.embeddings[0]))
            .collect();
        lams.sort_by(f64::total_cmp);
        let s5 = 5f64.sqrt();
        assert!((lams[0] - (1.0 - s5)).abs() < 1e-9 && (lams[1] - (1.0 + s5)).abs() < 1e-9);
        let inf = fx.iter().find(|f| f.point.is_infinity()).unwrap();
        assert!(inf.multipliers[0].is_zero());

        let sq = P1Map::polynomial(&Poly::from_ints(&[0, 0, 1])).unwrap();
        let fx = fixed_points(&MapSpec::split(vec![sq.clone(), sq]).unwrap()).unwrap();
        assert_eq!(fx.len(), 9);
        for f in &fx {
            for l in &f.multipliers {
                assert!(l.is_zero() || *l == AlgebraicNumber::from_int(2));
            }
        }
    }

    #[test]
    fn p2_fixed_points_of_power_map() {
        let m = |e: [u32; 3]| MPoly::from_terms(3, [(e.to_vec(), int(1))]);
        let mut f = P2Map::new([m([2, 0, 0]), m([0, 2, 0]), m([0, 0, 2])], 2).unwrap();
        check_base_point_free(&mut f).unwrap();
        let fx = fixed_points(&MapSpec::P2(f.clone())).unwrap();
        let total: usize = fx.iter().map(|x| x.multiplicity).sum();
        assert_eq!(total, 7);
        assert_eq!(fx.len(), 7);
        for x in &fx {
            assert_eq!(super::super::map::evaluate(&MapSpec::P2(f.clone()), &x.point).unwrap(), x.point);
            for l in &x.multipliers {
                assert!(l.is_zero() || *l == AlgebraicNumber::from_int(2));
            }
        }
    }

    #[test]
    fn p2_irrational_fixed_points() {
        // [x^2 + y z : y^2 - z^2 + x z : z^2]
        let t = |e: [u32; 3], c: i64| (e.to_vec(), int(c));
        let f0 = MPoly::from_terms(3, [t([2, 0, 0], 1), t([0, 1, 1], 1)]);
        let f1 = MPoly::from_terms(3, [t([0, 2, 0], 1), t([0, 0, 2], -1), t([1, 0, 1], 1)]);
        let f2 = MPoly::from_terms(3, [t([0, 0, 2], 1)]);
        let f = MapSpec::P2(P2Map::new([f0, f1, f2], 2).unwrap());
        let fx = fixed_points(&f).unwrap();
        let total: usize = fx.iter().map(|x| x.multiplicity).sum();
        assert_eq!(total, 7);
        for x in &fx {
            assert_eq!(super::super::map::evaluate(&f, &x.point).unwrap(), x.point);
        }
    }

    #[test]
    fn identity_is_positive_dimensional() {
        assert_eq!(
            fixed_points(&poly_map(&[0, 1])).unwrap_err(),
            Error::PositiveDimensionalFixedLocus
        );
    }
}
