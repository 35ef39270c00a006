//! Backward chains p_0, p_1, ... with f(p_i) = p_(i-1).

use num_traits::Zero;
use serde::Serialize;

use super::map::{P1Map, ProjPoint};
use crate::error::{Error, Result};
use crate::exactnum::primitive::field_of_root;
use crate::exactnum::rational::Rational;
use crate::exactnum::{factor_poly_q, generator, Poly};

pub const DEFAULT_DEGREE_CAP: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct ChainLink {
    pub point: ProjPoint,
    /// Degree over Q of the field generated by p_0, ..., p_i.
    pub field_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreimageChain {
    pub links: Vec<ChainLink>,
    /// Every ratio of successive field degrees divides d!.
    pub ratios_divide: bool,
    /// Set when the chain stopped early.
    pub truncated: Option<String>,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

struct Candidate {
    degree: usize,
    key: (u8, Option<Rational>, Vec<Rational>),
    point: ProjPoint,
    minpoly: Option<Poly>,
}

fn candidates(f: &P1Map, target: &ProjPoint) -> Vec<Candidate> {
    let d = f.degree();
    let (n1, n2) = (f.num(), f.den());
    let mut out = vec![];
    // numerator of m(f(x)) where m is the minimal polynomial of the target
    let (poly, inf_maps_here) = match target.affine() {
        None => (n2.clone(), n2.deg() < d as i64),
        Some(a) => {
            let m = a.minimal_polynomial();
            let k = m.degree().unwrap();
            let mut acc = Poly::zero();
            for (i, c) in m.coeffs().iter().enumerate() {
                acc = acc + (n1.pow(i as u32) * n2.pow((k - i) as u32)).scale(c);
            }
            // infinity maps to [c1 : c2] with c_i the X^d coefficients
            let (c1, c2) = (n1.coeff(d), n2.coeff(d));
            let hit = !c2.is_zero() && m.eval(&(c1 / c2)).is_zero();
            (acc, hit && k == 1)
        }
    };
    if !poly.is_zero() {
        for (h, _) in factor_poly_q(&poly) {
            let deg = h.degree().unwrap();
            if deg == 0 {
                continue;
            }
            let (point, key) = if deg == 1 {
                let r = -h.coeff(0);
                (ProjPoint::p1_rat(r.clone()), (0u8, Some(r), vec![]))
            } else {
                let k = field_of_root(&h, "b");
                (ProjPoint::p1(generator(&k)), (1u8, None, h.coeffs().to_vec()))
            };
            out.push(Candidate { degree: deg, key, point, minpoly: Some(h) });
        }
    }
    if inf_maps_here {
        out.push(Candidate { degree: 1, key: (0, None, vec![]), point: ProjPoint::p1_inf(), minpoly: None });
    }
    out.sort_by(|a, b| (a.degree, &a.key).cmp(&(b.degree, &b.key)));
    out
}

fn same_class(a: &ProjPoint, b: &ProjPoint) -> bool {
    match (a.affine(), b.affine()) {
        (None, None) => true,
        (Some(x), Some(y)) => x.minimal_polynomial() == y.minimal_polynomial(),
        _ => false,
    }
}

/// Chain of length n starting at p0. Each step picks the preimage of least
/// field degree, ties broken by rational value then by minimal polynomial
/// coefficients, avoiding points (up to conjugacy) already on the chain
/// when another choice exists.
pub fn preimage_chain(f: &P1Map, p0: &ProjPoint, n: usize, degree_cap: usize) -> Result<PreimageChain> {
    let d = f.degree();
    if d < 2 {
        return Err(Error::Precondition("preimage chains need degree >= 2".into()));
    }
    let deg0 = match p0.affine() {
        Some(a) => a.degree(),
        None => 1,
    };
    let mut links = vec![ChainLink { point: p0.clone(), field_degree: deg0 }];
    let mut truncated = None;
    for step in 1..=n {
        let cur = links.last().unwrap().point.clone();
        let cands = candidates(f, &cur);
        let fresh = cands
            .iter()
            .find(|c| !links.iter().any(|l| same_class(&l.point, &c.point)));
        let Some(choice) = fresh.or(cands.first()) else {
            truncated = Some(format!("no preimage found at step {step}"));
            break;
        };
        // the new coordinate generates the whole prefix field since p_(i-1) = f(p_i)
        let deg = choice.minpoly.as_ref().map(|h| h.degree().unwrap()).unwrap_or(1);
        if deg > degree_cap {
            truncated = Some(format!("field degree {deg} exceeds cap {degree_cap} at step {step}"));
            break;
        }
        links.push(ChainLink { point: choice.point.clone(), field_degree: deg });
    }
    let fact = factorial(d);
    let ratios_divide = links.windows(2).all(|w| {
        let (a, b) = (w[0].field_degree, w[1].field_degree);
        b % a == 0 && fact % ((b / a) as u128) == 0
    });
    Ok(PreimageChain { links, ratios_divide, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::projdyn::map::{evaluate, MapSpec};

    fn pm(c: &[i64]) -> P1Map {
        P1Map::polynomial(&Poly::from_ints(c)).unwrap()
    }

    fn degs(c: &PreimageChain) -> Vec<usize> {
        c.links.iter().map(|l| l.field_degree).collect()
    }

    #[test]
    fn spec_examples() {
        let f = pm(&[0, 0, 1]);
        let c = preimage_chain(&f, &ProjPoint::p1_rat(int(1)), 2, 64).unwrap();
        assert_eq!(degs(&c), vec![1, 1, 2]);
        assert_eq!(c.links[1].point, ProjPoint::p1_rat(int(-1)));
        let i = c.links[2].point.affine().unwrap();
        assert_eq!(i.minimal_polynomial(), Poly::from_ints(&[1, 0, 1]));
        assert!(c.ratios_divide);

        let c = preimage_chain(&f, &ProjPoint::p1_rat(int(0)), 3, 64).unwrap();
        assert_eq!(degs(&c), vec![1, 1, 1, 1]);
        assert!(c.links.iter().all(|l| l.point == ProjPoint::p1_rat(int(0))));

        let c = preimage_chain(&pm(&[-2, 0, 1]), &ProjPoint::p1_rat(int(2)), 1, 64).unwrap();
        assert_eq!(degs(&c), vec![1, 1]);
        assert_eq!(c.links[1].point, ProjPoint::p1_rat(int(-2)));
    }

    #[test]
    fn chain_maps_back() {
        let f = pm(&[1, 1, 1]);
        let c = preimage_chain(&f, &ProjPoint::p1_rat(int(3)), 3, 64).unwrap();
        let fm = MapSpec::P1(f);
        for w in c.links.windows(2) {
            let img = evaluate(&fm, &w[1].point).unwrap();
            let (a, b) = (img.affine().unwrap(), w[0].point.affine().unwrap());
            assert_eq!(a.minimal_polynomial(), b.minimal_polynomial());
        }
    }
}
