//! Scaled affine charts at a fixed point in which a polynomial map of the
//! plane becomes a self-map of the unit polydisk with triangular reduction.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::MPoly;
use crate::projdyn::{FixedPointData, MapSpec};
use crate::tate::{PolydiskMap, TateSeries2};

#[derive(Clone, Debug, Serialize)]
pub struct InvariantPolydisk {
    pub prime: u64,
    /// z1 = p^r u1, z2 = p^(r+s) u2 after centering and triangularizing.
    pub r: i64,
    pub s: i64,
    /// Centering point and the integral change of basis (columns).
    pub center: [String; 2],
    pub basis: [[String; 2]; 2],
    /// Exact components of the conjugated map in (u1, u2).
    #[serde(serialize_with = "ser_mpolys")]
    pub components: [MPoly; 2],
    /// Linear part mod p: [[l1, eps], [0, l2]].
    pub reduction: [[u64; 2]; 2],
    pub map: PolydiskMap,
}

fn ser_mpolys<S: serde::Serializer>(c: &[MPoly; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut q = s.serialize_seq(Some(2))?;
    for p in c {
        q.serialize_element(&p.to_string())?;
    }
    q.end()
}

/// The two affine components of a polynomial self-map of A^2, from a P2 map
/// whose third form is c Z^d or from a pair of polynomial maps of the line.
pub fn affine_polynomial_pair(f: &MapSpec) -> Result<[MPoly; 2]> {
    let not_poly = || Error::Precondition("the map must be polynomial in the affine chart".into());
    match f {
        MapSpec::P2(g) => {
            let d = g.degree() as u32;
            let forms = g.forms();
            let lead = forms[2].terms().next().ok_or_else(not_poly)?;
            if forms[2].terms().count() != 1 || lead.0 != [0, 0, d] {
                return Err(not_poly());
            }
            let c = lead.1.clone();
            let subs = [MPoly::var(2, 0), MPoly::var(2, 1), MPoly::constant(2, Rational::one())];
            let inv = Rational::one() / c;
            Ok([forms[0].substitute(&subs).scale(&inv), forms[1].substitute(&subs).scale(&inv)])
        }
        MapSpec::P1xN(v) if v.len() == 2 => {
            let a = v[0].as_polynomial().ok_or_else(not_poly)?;
            let b = v[1].as_polynomial().ok_or_else(not_poly)?;
            Ok([MPoly::from_poly(2, 0, &a), MPoly::from_poly(2, 1, &b)])
        }
        _ => Err(Error::Precondition("expected a map of P2 or of P1 x P1".into())),
    }
}

fn affine_fixed_point(o: &FixedPointData, f: &MapSpec) -> Result<[Rational; 2]> {
    let q = |a: &crate::exactnum::AlgebraicNumber| {
        a.as_rational().ok_or_else(|| Error::Precondition("the fixed point must be rational".into()))
    };
    let fs = o.point.factors();
    let pt = match f {
        MapSpec::P2(_) => {
            let c = &fs[0];
            if c[2].is_zero() {
                return Err(Error::Precondition("the fixed point lies at infinity".into()));
            }
            [q(&c[0])?, q(&c[1])?]
        }
        _ => {
            if fs.len() != 2 || fs[0][1].is_zero() || fs[1][1].is_zero() {
                return Err(Error::Precondition("the fixed point lies at infinity".into()));
            }
            [q(&fs[0][0])?, q(&fs[1][0])?]
        }
    };
    Ok(pt)
}

fn linear_coeff(f: &MPoly, i: usize) -> Rational {
    let mut e = vec![0u32; 2];
    e[i] = 1;
    f.terms().find(|(m, _)| *m == e.as_slice()).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
}

fn val(r: &Rational, p: u64) -> Option<i64> {
    rational::valuation(r, p)
}

/// Linear change of variables z = B w applied as B^{-1} F(B w).
fn conjugate_linear(fs: &[MPoly; 2], b: [[Rational; 2]; 2]) -> [MPoly; 2] {
    let w = |i: usize| MPoly::var(2, i);
    let subs = [
        w(0).scale(&b[0][0]).add(&w(1).scale(&b[0][1])),
        w(0).scale(&b[1][0]).add(&w(1).scale(&b[1][1])),
    ];
    let g = [fs[0].substitute(&subs), fs[1].substitute(&subs)];
    let det = &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0];
    let inv = [
        [&b[1][1] / &det, -&b[0][1] / &det],
        [-&b[1][0] / &det, &b[0][0] / &det],
    ];
    [
        g[0].scale(&inv[0][0]).add(&g[1].scale(&inv[0][1])),
        g[0].scale(&inv[1][0]).add(&g[1].scale(&inv[1][1])),
    ]
}

/// Minimal r >= 0 making every nonlinear coefficient of valuation >= 1 after
/// z1 = p^r u1, z2 = p^(r+s) u2.
pub fn minimal_radius(fs: &[MPoly; 2], s: i64, p: u64) -> i64 {
    let mut r = 0i64;
    for (k, f) in fs.iter().enumerate() {
        for (m, c) in f.terms() {
            let deg = (m[0] + m[1]) as i64;
            if deg < 2 {
                continue;
            }
            let v = val(c, p).unwrap();
            // p^(r deg + s m2 - r - s k) c
            let need = 1 - v - s * m[1] as i64 + s * k as i64;
            let q = deg - 1;
            r = r.max((need + q - 1).div_euclid(q));
        }
    }
    r
}

fn scaled(fs: &[MPoly; 2], r: i64, s: i64, p: u64) -> [MPoly; 2] {
    let pp = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from(crate::padic::element::ppow(p, e))
        } else {
            Rational::one() / Rational::from(crate::padic::element::ppow(p, -e))
        }
    };
    let shifts = [r, r + s];
    let mut out = [MPoly::zero(2), MPoly::zero(2)];
    for (k, f) in fs.iter().enumerate() {
        let terms = f.terms().map(|(m, c)| {
            let e = shifts[0] * m[0] as i64 + shifts[1] * m[1] as i64 - shifts[k];
            (m.to_vec(), c * pp(e))
        });
        out[k] = MPoly::from_terms(2, terms);
    }
    out
}

/// Whether all coefficients of both components are integral and all
/// nonlinear ones divisible by p.
pub fn is_reduced_triangular(fs: &[MPoly; 2], p: u64) -> bool {
    fs.iter().all(|f| {
        f.terms().all(|(m, c)| {
            let v = val(c, p).unwrap_or(i64::MAX);
            let deg = m[0] + m[1];
            if deg >= 2 || deg == 0 {
                v >= 1
            } else {
                v >= 0
            }
        })
    }) && val(&linear_coeff(&fs[1], 0), p).is_none_or(|v| v >= 1)
}

fn reduce(r: &Rational, p: u64) -> u64 {
    let fp = crate::exactnum::fp::Fp::new(p);
    if val(r, p).is_none_or(|v| v >= 1) {
        return 0;
    }
    fp.mul(fp.reduce_int(r.numer()), fp.inv(fp.reduce_int(r.denom())))
}

/// Conjugate f near the rational fixed point o into a self-map of the unit
/// polydisk with reduction (l1 z1 + eps z2, l2 z2).
pub fn invariant_polydisk(f: &MapSpec, o: &FixedPointData, p: u64, m: i64) -> Result<InvariantPolydisk> {
    let fs = affine_polynomial_pair(f)?;
    let c = affine_fixed_point(o, f)?;
    let subs = [
        MPoly::var(2, 0).add(&MPoly::constant(2, c[0].clone())),
        MPoly::var(2, 1).add(&MPoly::constant(2, c[1].clone())),
    ];
    let centered = [
        fs[0].substitute(&subs).sub(&MPoly::constant(2, c[0].clone())),
        fs[1].substitute(&subs).sub(&MPoly::constant(2, c[1].clone())),
    ];
    if centered.iter().any(|g| g.terms().any(|(mm, v)| mm == [0, 0] && !v.is_zero())) {
        return Err(Error::Precondition("the point is not fixed".into()));
    }
    let a = [
        [linear_coeff(&centered[0], 0), linear_coeff(&centered[0], 1)],
        [linear_coeff(&centered[1], 0), linear_coeff(&centered[1], 1)],
    ];
    let tr = &a[0][0] + &a[1][1];
    let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
    // eigenvalues are integral iff the monic characteristic polynomial is
    if val(&tr, p).is_some_and(|v| v < 0) || val(&det, p).is_some_and(|v| v < 0) {
        return Err(Error::NotAttracting);
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    let basis: [[Rational; 2]; 2] = if a[1][0].is_zero() {
        [[one.clone(), zero.clone()], [zero.clone(), one.clone()]]
    } else if a[0][1].is_zero() {
        [[zero.clone(), one.clone()], [one.clone(), zero.clone()]]
    } else {
        let charp = crate::exactnum::Poly::new(vec![det.clone(), -tr.clone(), one.clone()]);
        let roots = charp.rational_roots();
        let Some(lam) = roots.first() else {
            return Err(Error::Resolution("linear part is not triangularizable over Q".into()));
        };
        let v = crate::exactnum::linalg::primitive_vector(&[a[0][1].clone(), lam - &a[0][0]]);
        let w = if val(&v[0], p) == Some(0) { [zero.clone(), one.clone()] } else { [one.clone(), zero.clone()] };
        [[v[0].clone(), w[0].clone()], [v[1].clone(), w[1].clone()]]
    };
    let tri = conjugate_linear(&centered, basis.clone());
    let eps = linear_coeff(&tri[0], 1);
    let s = val(&eps, p).map_or(0, |v| (-v).max(0));
    let r = minimal_radius(&tri, s, p);
    let comps = scaled(&tri, r, s, p);
    debug_assert!(is_reduced_triangular(&comps, p));
    let deg = comps.iter().map(|g| g.total_degree()).max().unwrap().max(1);
    let to_series = |g: &MPoly| {
        let terms: Vec<(u32, u32, Rational)> = g.terms().map(|(mm, cc)| (mm[0], mm[1], cc.clone())).collect();
        TateSeries2::from_terms(p, deg, m, &terms)
    };
    let map = PolydiskMap::general(to_series(&comps[0]), to_series(&comps[1]))?;
    let reduction = [
        [reduce(&linear_coeff(&comps[0], 0), p), reduce(&linear_coeff(&comps[0], 1), p)],
        [reduce(&linear_coeff(&comps[1], 0), p), reduce(&linear_coeff(&comps[1], 1), p)],
    ];
    let ts = |x: &Rational| rational::to_string(x);
    Ok(InvariantPolydisk {
        prime: p,
        r,
        s,
        center: [ts(&c[0]), ts(&c[1])],
        basis: [[ts(&basis[0][0]), ts(&basis[0][1])], [ts(&basis[1][0]), ts(&basis[1][1])]],
        components: comps,
        reduction,
        map,
    })
}

/// The conjugated components for a given r, used to check minimality.
pub fn components_at_radius(result: &InvariantPolydisk, r: i64) -> [MPoly; 2] {
    let p = result.prime;
    let back = scaled(&result.components, -result.r, 0, p);
    let back = [back[0].clone(), back[1].clone()];
    scaled(&back, r, 0, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::exactnum::{AlgebraicNumber, Poly};
    use crate::projdyn::{P1Map, ProjPoint};

    fn fixed_at(x: i64, y: i64) -> FixedPointData {
        let pt = ProjPoint::product(&[ProjPoint::p1_rat(int(x)), ProjPoint::p1_rat(int(y))]).unwrap();
        FixedPointData {
            point: pt,
            multipliers: vec![AlgebraicNumber::from_int(1), AlgebraicNumber::from_int(1)],
            multiplicity: 1,
            degenerate: false,
            embeddings: vec![0],
        }
    }

    fn split(a: &[i64], b: &[i64]) -> MapSpec {
        MapSpec::split(vec![
            P1Map::polynomial(&Poly::from_ints(a)).unwrap(),
            P1Map::polynomial(&Poly::from_ints(b)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn spec_example_r1() {
        let f = split(&[0, 4, 1], &[0, 3]);
        let d = invariant_polydisk(&f, &fixed_at(0, 0), 3, 20).unwrap();
        assert_eq!((d.r, d.s), (1, 0));
        let expect0 = MPoly::from_terms(2, [(vec![1, 0], int(4)), (vec![2, 0], int(3))]);
        assert_eq!(d.components[0], expect0);
        assert_eq!(d.components[1], MPoly::from_terms(2, [(vec![0, 1], int(3))]));
        assert_eq!(d.reduction, [[1, 0], [0, 0]]);
        let at0 = components_at_radius(&d, 0);
        assert!(!is_reduced_triangular(&at0, 3));
    }

    #[test]
    fn linear_is_unchanged() {
        let f = split(&[0, 2], &[0, 3]);
        let d = invariant_polydisk(&f, &fixed_at(0, 0), 3, 20).unwrap();
        assert_eq!(d.r, 0);
        assert_eq!(d.components[0], MPoly::from_terms(2, [(vec![1, 0], int(2))]));
    }

    #[test]
    fn cubic_with_denominator() {
        // x + x^3/3: (i + j - 1) r >= 2 gives r = 1
        let f = MapSpec::split(vec![
            P1Map::polynomial(&Poly::new(vec![int(0), int(1), int(0), crate::exactnum::rational::rat(1, 3)])).unwrap(),
            P1Map::polynomial(&Poly::from_ints(&[0, 3])).unwrap(),
        ])
        .unwrap();
        let d = invariant_polydisk(&f, &fixed_at(0, 0), 3, 20).unwrap();
        assert_eq!(d.r, 1);
        assert!(!is_reduced_triangular(&components_at_radius(&d, 0), 3));
    }

    #[test]
    fn expanding_is_rejected() {
        let g = MapSpec::split(vec![
            P1Map::polynomial(&Poly::from_ints(&[0, 1, 1])).unwrap(),
            P1Map::polynomial(&Poly::new(vec![int(0), crate::exactnum::rational::rat(1, 3)])).unwrap(),
        ])
        .unwrap();
        assert_eq!(invariant_polydisk(&g, &fixed_at(0, 0), 3, 20).unwrap_err(), Error::NotAttracting);
    }

    #[test]
    fn triangularizes_rational_eigenvalues() {
        // P2 map (x + y + x^2, 2x + 2y) written with z^2 as the third form
        let x = MPoly::var(3, 0);
        let y = MPoly::var(3, 1);
        let z = MPoly::var(3, 2);
        let f0 = x.mul(&z).add(&y.mul(&z)).add(&x.mul(&x));
        let f1 = y.mul(&z).add(&x.mul(&z)).scale(&int(2));
        let f2 = z.mul(&z);
        let f = MapSpec::P2(crate::projdyn::P2Map::new([f0, f1, f2], 2).unwrap());
        let pt = ProjPoint::p2([AlgebraicNumber::from_int(0), AlgebraicNumber::from_int(0), AlgebraicNumber::from_int(1)]).unwrap();
        let fp = FixedPointData { point: pt, ..fixed_at(0, 0) };
        let d = invariant_polydisk(&f, &fp, 5, 20).unwrap();
        assert!(is_reduced_triangular(&d.components, 5));
        assert_eq!(d.reduction[1][0], 0);
    }
}
