//! Monomial, Lattès and nonexceptional maps of P^1 via the orbifold signature
//! of the postcritical portrait, with explicit semiconjugacy witnesses.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::critical::{critical_orbits, critical_points, image, orbit_key, p1_of, point_label, CriticalData, Pt};
use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::Poly;
use crate::projdyn::{MapSpec, P1Map};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapType {
    Monomial,
    Lattes,
    Nonexceptional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Certified,
    Evidence,
}

/// Orbifold weight; None is infinity.
pub type Weight = Option<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// "semiconjugacy" when pi and h are given and checked, else "portrait".
    pub kind: String,
    pub pi: Option<String>,
    pub h: Option<String>,
    pub verified: bool,
    /// Postcritical points with their weights ("inf" for infinity).
    pub portrait: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeVerdict {
    #[serde(rename = "type")]
    pub kind: MapType,
    pub pcf: bool,
    pub confidence: Confidence,
    pub witness: Option<Witness>,
    pub signature: Vec<String>,
    pub bound_used: usize,
}

/// Möbius map x -> (a x + b) / (c x + d).
pub fn mobius(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<P1Map> {
    if (&a * &d - &b * &c).is_zero() {
        return Err(Error::Precondition("singular Möbius map".into()));
    }
    P1Map::new(Poly::new(vec![b, a]), Poly::new(vec![d, c]), 1)
}

pub fn mobius_inverse(m: &P1Map) -> P1Map {
    let (b, a) = (m.num().coeff(0), m.num().coeff(1));
    let (d, c) = (m.den().coeff(0), m.den().coeff(1));
    mobius(d, -b, -c, a).expect("inverse of an invertible map")
}

/// m^-1 o f o m
pub fn conjugate(f: &P1Map, m: &P1Map) -> P1Map {
    mobius_inverse(m).compose(&f.compose(m))
}

/// f o pi = pi o h, checked by cross-multiplying the two quotients.
pub fn verify_semiconjugacy(pi: &P1Map, h: &MapSpec, f: &MapSpec) -> Result<bool> {
    let (MapSpec::P1(h), MapSpec::P1(f)) = (h, f) else {
        return Err(Error::Precondition("semiconjugacy is checked for maps of P1".into()));
    };
    let lhs = f.compose(pi);
    let rhs = pi.compose(h);
    if lhs.degree() != rhs.degree() {
        return Ok(false);
    }
    Ok(lhs.num() * rhs.den() == lhs.den() * rhs.num())
}

fn lcm_w(a: Weight, b: Weight) -> Weight {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.lcm(&b)),
        _ => None,
    }
}

/// Orbifold weights on the postcritical Galois orbits.
fn weights(cd: &CriticalData) -> BTreeMap<String, Weight> {
    let g = &cd.graph;
    let mut nu: BTreeMap<String, Weight> = g.keys().map(|k| (k.clone(), Some(1))).collect();
    // a cycle through a critical point has infinite weight
    for start in g.keys() {
        let mut cyc = vec![start.clone()];
        let mut cur = g[start].image.clone();
        while let Some(k) = cur {
            if k == *start {
                if cyc.iter().any(|c| g[c].e > 1) {
                    for c in &cyc {
                        nu.insert(c.clone(), None);
                    }
                }
                break;
            }
            if cyc.contains(&k) || cyc.len() > g.len() {
                break;
            }
            cyc.push(k.clone());
            cur = g[&k].image.clone();
        }
    }
    loop {
        let mut changed = false;
        for (w, node) in g {
            let Some(z) = &node.image else { continue };
            let push = nu[w].map(|v| v * node.e);
            let new = lcm_w(nu[z], push);
            if new != nu[z] {
                nu.insert(z.clone(), new);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    nu
}

/// Keys of f^n(c), n >= 1, over all critical c.
fn postcritical(cd: &CriticalData) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for c in &cd.points {
        let mut cur = cd.graph[&c.key].image.clone();
        while let Some(k) = cur {
            if !out.insert(k.clone()) {
                break;
            }
            cur = cd.graph[&k].image.clone();
        }
    }
    out
}

fn weight_str(w: Weight) -> String {
    w.map_or("inf".into(), |v| v.to_string())
}

/// Sorted weights > 1 over postcritical points, conjugates counted separately.
fn signature(cd: &CriticalData, nu: &BTreeMap<String, Weight>) -> Vec<Weight> {
    let mut s = vec![];
    for k in postcritical(cd) {
        if nu[&k] != Some(1) {
            for _ in 0..cd.graph[&k].size {
                s.push(nu[&k]);
            }
        }
    }
    s.sort_by_key(|w| w.unwrap_or(u64::MAX));
    s
}

fn rational_point(p: &Pt) -> Option<Option<Rational>> {
    match p {
        None => Some(None),
        Some(x) => x.as_rational().map(Some),
    }
}

fn is_monomial_map(h: &P1Map) -> bool {
    let nz = |p: &Poly| p.coeffs().iter().filter(|c| !c.is_zero()).count();
    nz(h.num()) == 1 && nz(h.den()) == 1
}

/// pi with pi(0) = a and pi(inf) = b.
fn pair_chart(a: Option<Rational>, b: Option<Rational>) -> Result<P1Map> {
    let (o, z) = (Rational::one(), Rational::zero());
    match (a, b) {
        (Some(a), None) => mobius(o.clone(), a, z, o),
        (None, Some(b)) => mobius(b, o.clone(), o, z),
        (Some(a), Some(b)) => mobius(b, a, o.clone(), o),
        (None, None) => unreachable!("distinct points"),
    }
}

fn monomial_witness(f: &P1Map, pair: [&Pt; 2]) -> Option<(P1Map, P1Map)> {
    let a = rational_point(pair[0])?;
    let b = rational_point(pair[1])?;
    let pi = pair_chart(a, b).ok()?;
    let h = conjugate(f, &pi);
    is_monomial_map(&h).then_some((pi, h))
}

/// pi = M^-1 o (alpha (z + 1/z) + beta) with M(b) = inf, h = +-z^d.
fn chebyshev_witness(f: &P1Map, b: &Pt, c: [&Pt; 2]) -> Option<(P1Map, P1Map)> {
    let b = rational_point(b)?;
    let (o, z) = (Rational::one(), Rational::zero());
    let m = match &b {
        None => mobius(o.clone(), z.clone(), z.clone(), o.clone()).ok()?,
        Some(b) => mobius(z.clone(), o.clone(), o.clone(), -b.clone()).ok()?,
    };
    let mut cs = vec![];
    for ci in c {
        let y = image(&m, ci)?.as_rational()?;
        cs.push(y);
    }
    let beta = (&cs[0] + &cs[1]) / rational::int(2);
    let alpha = ((&cs[0] - &cs[1]) / rational::int(4)).abs();
    let d = f.degree();
    // t -> -t flips the sign of alpha; prefer alpha > 0, so x^2 - 2 gets z + 1/z
    for a in [alpha.clone(), -alpha] {
        let t = P1Map::new(Poly::new(vec![a.clone(), beta.clone(), a]), Poly::x(), 2).ok()?;
        let pi = mobius_inverse(&m).compose(&t);
        for sign in [1, -1] {
            let h = P1Map::polynomial(&Poly::monomial(rational::int(sign), d)).ok()?;
            if verify_semiconjugacy(&pi, &MapSpec::P1(h.clone()), &MapSpec::P1(f.clone())).ok()? {
                return Some((pi, h));
            }
        }
    }
    None
}

fn is_lattes_signature(s: &[Weight]) -> bool {
    let s: Vec<u64> = match s.iter().copied().collect::<Option<Vec<u64>>>() {
        Some(v) => v,
        None => return false,
    };
    matches!(s.as_slice(), [2, 2, 2, 2] | [2, 4, 4] | [3, 3, 3] | [2, 3, 6])
}

pub fn classify_type(f: &MapSpec, n_bound: usize) -> Result<TypeVerdict> {
    let g = p1_of(f)?;
    let cd = critical_orbits(f, n_bound)?;
    if !cd.is_pcf() {
        let confidence = if cd.certified_not_pcf() { Confidence::Certified } else { Confidence::Evidence };
        return Ok(TypeVerdict {
            kind: MapType::Nonexceptional,
            pcf: false,
            confidence,
            witness: None,
            signature: vec![],
            bound_used: n_bound,
        });
    }
    let nu = weights(&cd);
    let sig = signature(&cd, &nu);
    let portrait: Vec<(String, String)> = postcritical(&cd)
        .into_iter()
        .map(|k| (point_label(&cd.graph[&k].rep), weight_str(nu[&k])))
        .collect();
    let heavy: Vec<&String> = postcritical_sorted(&cd, &nu);
    let reps: Vec<&Pt> = heavy.iter().map(|k| &cd.graph[*k].rep).collect();
    let (kind, found) = if sig == [None, None] {
        let w = if reps.len() == 2 { monomial_witness(g, [reps[0], reps[1]]) } else { None };
        (MapType::Monomial, w)
    } else if sig == [Some(2), Some(2), None] {
        let w = if reps.len() == 3 { chebyshev_witness(g, reps[2], [reps[0], reps[1]]) } else { None };
        (MapType::Monomial, w)
    } else if is_lattes_signature(&sig) {
        (MapType::Lattes, None)
    } else {
        (MapType::Nonexceptional, None)
    };
    let witness = match found {
        Some((pi, h)) => {
            let verified = verify_semiconjugacy(&pi, &MapSpec::P1(h.clone()), f)?;
            Witness { kind: "semiconjugacy".into(), pi: Some(pi.to_string()), h: Some(h.to_string()), verified, portrait }
        }
        None => Witness { kind: "portrait".into(), pi: None, h: None, verified: false, portrait },
    };
    Ok(TypeVerdict {
        kind,
        pcf: true,
        confidence: Confidence::Certified,
        witness: Some(witness),
        signature: sig.iter().map(|w| weight_str(*w)).collect(),
        bound_used: n_bound,
    })
}

/// Postcritical keys with weight > 1, finite weights first.
fn postcritical_sorted<'a>(cd: &'a CriticalData, nu: &BTreeMap<String, Weight>) -> Vec<&'a String> {
    let mut v: Vec<&String> = cd.graph.keys().filter(|k| postcritical(cd).contains(*k) && nu[*k] != Some(1)).collect();
    v.sort_by_key(|k| nu[*k].unwrap_or(u64::MAX));
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalReport {
    pub points: Vec<String>,
    /// Chart in which f^2 (f itself for one point) is a polynomial.
    pub chart: Option<String>,
    pub chart_verified: bool,
    pub confidence: Confidence,
}

/// Points with finite backward orbit: totally ramified points of period 1 or 2
/// whose image is again totally ramified.
pub fn exceptional_points(f: &MapSpec, _n_bound: usize) -> Result<ExceptionalReport> {
    let g = p1_of(f)?;
    let d = g.degree();
    let full: Vec<Pt> = critical_points(g).into_iter().filter(|c| c.1 == d - 1).map(|c| c.0).collect();
    let keys: BTreeSet<String> = full.iter().map(orbit_key).collect();
    let mut pts: Vec<Pt> = vec![];
    for c in &full {
        let y = image(g, c);
        if keys.contains(&orbit_key(&y)) && image(g, &y) == *c {
            pts.push(c.clone());
            if y != *c && !pts.iter().any(|p| orbit_key(p) == orbit_key(&y)) {
                pts.push(y);
            }
        }
    }
    pts.dedup_by_key(|p| orbit_key(p));
    let labels: Vec<String> = pts.iter().map(point_label).collect();
    let (chart, verified) = match pts.first() {
        None => (None, false),
        Some(a) => match rational_point(a) {
            Some(a) => {
                let (o, z) = (Rational::one(), Rational::zero());
                let (m, name) = match &a {
                    None => (mobius(o.clone(), z.clone(), z, o)?, "x".to_string()),
                    Some(a) => (mobius(z, o.clone(), o, -a.clone())?, format!("1/(x - {})", rational::to_string(a))),
                };
                // in the chart y = m^-1(x) the point a sits at infinity
                let h = conjugate(&g.iterate(2), &m);
                (Some(name), h.as_polynomial().is_some())
            }
            None => (Some(format!("chart sending {} to infinity", labels[0])), false),
        },
    };
    Ok(ExceptionalReport { points: labels, chart, chart_verified: verified, confidence: Confidence::Certified })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MapSpec {
        MapSpec::P1(P1Map::polynomial(&Poly::from_ints(c)).unwrap())
    }

    fn lattes() -> MapSpec {
        MapSpec::P1(P1Map::rational(&Poly::from_ints(&[0, -8, 0, 0, 1]), &Poly::from_ints(&[4, 0, 0, 4])).unwrap())
    }

    #[test]
    fn cube_is_monomial() {
        let v = classify_type(&poly(&[0, 0, 0, 1]), 64).unwrap();
        assert_eq!(v.kind, MapType::Monomial);
        assert!(v.pcf);
        assert!(v.witness.unwrap().verified);
    }

    #[test]
    fn chebyshev_is_monomial_type() {
        let v = classify_type(&poly(&[-2, 0, 1]), 64).unwrap();
        assert_eq!(v.kind, MapType::Monomial);
        assert_eq!(v.signature, vec!["2", "2", "inf"]);
        let w = v.witness.unwrap();
        assert!(w.verified, "{w:?}");
    }

    #[test]
    fn basilica_is_nonexceptional() {
        let v = classify_type(&poly(&[-1, 0, 1]), 64).unwrap();
        assert_eq!(v.kind, MapType::Nonexceptional);
        assert!(v.pcf);
        let w = v.witness.unwrap();
        let pts: Vec<&str> = w.portrait.iter().map(|p| p.0.as_str()).collect();
        assert_eq!(pts.len(), 3);
        for x in ["-1", "0", "inf"] {
            assert!(pts.contains(&x));
        }
    }

    #[test]
    fn lattes_signature() {
        let v = classify_type(&lattes(), 64).unwrap();
        assert_eq!(v.kind, MapType::Lattes);
        assert_eq!(v.signature, vec!["2", "2", "2", "2"]);
    }

    #[test]
    fn non_pcf_is_nonexceptional() {
        let v = classify_type(&poly(&[1, 0, 1]), 64).unwrap();
        assert_eq!((v.kind, v.pcf, v.confidence), (MapType::Nonexceptional, false, Confidence::Certified));
    }

    #[test]
    fn semiconjugacy_examples() {
        // pi = z + 1/z
        let pi = P1Map::new(Poly::from_ints(&[1, 0, 1]), Poly::x(), 2).unwrap();
        let sq = poly(&[0, 0, 1]);
        assert!(verify_semiconjugacy(&pi, &sq, &poly(&[-2, 0, 1])).unwrap());
        assert!(!verify_semiconjugacy(&pi, &sq, &sq).unwrap());
        let id = P1Map::polynomial(&Poly::x()).unwrap();
        let f = lattes();
        assert!(verify_semiconjugacy(&id, &f, &f).unwrap());
    }

    #[test]
    fn exceptional_examples() {
        let e = exceptional_points(&poly(&[0, 0, 1]), 64).unwrap();
        assert_eq!(e.points, vec!["inf", "0"]);
        assert!(e.chart_verified);
        let e = exceptional_points(&poly(&[-1, 0, 1]), 64).unwrap();
        assert_eq!(e.points, vec!["inf"]);
        assert!(exceptional_points(&lattes(), 64).unwrap().points.is_empty());
        // 1/x^2 swaps 0 and infinity
        let g = MapSpec::P1(P1Map::rational(&Poly::one(), &Poly::from_ints(&[0, 0, 1])).unwrap());
        let e = exceptional_points(&g, 64).unwrap();
        assert_eq!(e.points.len(), 2);
        assert!(e.chart_verified);
    }

    #[test]
    fn conjugation_and_iteration_keep_type() {
        let m = mobius(rational::int(2), rational::int(1), rational::int(1), rational::int(3)).unwrap();
        for (c, t) in [(vec![0, 0, 0, 1], MapType::Monomial), (vec![-2, 0, 1], MapType::Monomial), (vec![-1, 0, 1], MapType::Nonexceptional)] {
            let MapSpec::P1(f) = poly(&c) else { unreachable!() };
            let h = MapSpec::P1(conjugate(&f, &m));
            assert_eq!(classify_type(&h, 64).unwrap().kind, t);
            let f2 = MapSpec::P1(f.iterate(2));
            assert_eq!(classify_type(&f2, 64).unwrap().kind, t);
        }
    }
}
