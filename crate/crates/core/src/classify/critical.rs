//! Critical points of a map of P^1 and their forward orbits, computed exactly
//! in Q(c) for one representative c of each Galois orbit.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::factor_poly_q;
use crate::exactnum::primitive::field_of_root;
use crate::exactnum::{generator, AlgebraicNumber, Poly};
use crate::projdyn::{MapSpec, P1Map};

pub const DEFAULT_N_BOUND: usize = 64;
/// Critical factors of larger degree are not iterated.
pub const FIELD_DEGREE_CAP: usize = 24;
/// Iteration stops once the minimal polynomial of an orbit point is this tall.
pub const HEIGHT_CAP_BITS: u64 = 4096;
/// Consecutive strict height increases that certify an infinite orbit.
pub const GROWTH_STEPS: usize = 8;

/// A point of P^1 over Qbar; None is infinity.
pub type Pt = Option<AlgebraicNumber>;

pub(crate) fn image(f: &P1Map, x: &Pt) -> Pt {
    let one = AlgebraicNumber::from_int(1);
    let zero = AlgebraicNumber::from_int(0);
    let [a, b] = match x {
        Some(x) => f.eval_coords(x, &AlgebraicNumber::one_in(x.field())),
        None => f.eval_coords(&one, &zero),
    };
    if b.is_zero() {
        None
    } else {
        Some(&a / &b)
    }
}

/// Label of the Galois orbit of x: "inf" or its monic minimal polynomial.
pub fn orbit_key(x: &Pt) -> String {
    match x {
        None => "inf".into(),
        Some(x) => x.minimal_polynomial().monic().to_string(),
    }
}

fn height(x: &Pt) -> (usize, u64) {
    match x {
        None => (1, 0),
        Some(x) => {
            let m = x.minimal_polynomial();
            (m.degree().unwrap_or(0), m.height_bits())
        }
    }
}

/// Human-readable point: a rational, "inf", or "root of m(x)".
pub fn point_label(x: &Pt) -> String {
    match x {
        None => "inf".into(),
        Some(x) => match x.as_rational() {
            Some(r) => crate::exactnum::rational::to_string(&r),
            None => format!("root of {}", x.minimal_polynomial().monic()),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitStatus {
    /// The exact orbit closed up.
    Preperiodic,
    /// Heights grew strictly for GROWTH_STEPS steps in a fixed degree.
    HeightGrowth,
    /// Neither happened within the bounds.
    Undecided,
    /// The field degree exceeded FIELD_DEGREE_CAP.
    DegreeCap,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    /// Galois orbit key and a readable label for one representative.
    pub key: String,
    pub label: String,
    pub galois_size: usize,
    /// e - 1 at each conjugate.
    pub multiplicity: usize,
    /// Galois orbit keys of c, f(c), f^2(c), ...
    pub orbit: Vec<String>,
    pub tail: Option<usize>,
    pub cycle: Option<usize>,
    pub status: OrbitStatus,
}

/// One Galois orbit of points met by the critical orbits.
#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub size: usize,
    /// Ramification index at each conjugate.
    pub e: u64,
    pub image: Option<String>,
    pub rep: Pt,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalData {
    pub degree: usize,
    pub points: Vec<CriticalPoint>,
    /// Sum of (e - 1) over all critical points with conjugates.
    pub ramification_total: usize,
    pub n_bound: usize,
    #[serde(skip)]
    pub(crate) graph: BTreeMap<String, Node>,
}

impl CriticalData {
    pub fn is_pcf(&self) -> bool {
        self.points.iter().all(|c| c.status == OrbitStatus::Preperiodic)
    }

    /// Some orbit is certified infinite.
    pub fn certified_not_pcf(&self) -> bool {
        self.points.iter().any(|c| c.status == OrbitStatus::HeightGrowth)
    }
}

pub(crate) fn p1_of(f: &MapSpec) -> Result<&P1Map> {
    match f {
        MapSpec::P1(g) if g.degree() >= 2 => Ok(g),
        MapSpec::P1(_) => Err(Error::Precondition("degree must be at least 2".into())),
        _ => Err(Error::Precondition("expected a map of P1".into())),
    }
}

/// Critical points as (Galois orbit representative, e - 1). The Wronskian
/// num' den - num den' has degree 2d - 2 minus the order at infinity.
pub fn critical_points(f: &P1Map) -> Vec<(Pt, usize, Poly)> {
    let d = f.degree();
    let w = &(&f.num().derivative() * f.den()) - &(f.num() * &f.den().derivative());
    let mut out = vec![];
    let at_inf = 2 * d - 2 - w.degree().unwrap_or(0);
    if at_inf > 0 {
        out.push((None, at_inf, Poly::one()));
    }
    for (g, m) in factor_poly_q(&w) {
        let k = field_of_root(&g, "c");
        let c = if g.degree() == Some(1) {
            AlgebraicNumber::from_q(-g.coeff(0))
        } else {
            generator(&k)
        };
        out.push((Some(c), m, g));
    }
    out
}

/// Exact forward orbits of all critical points with cycle detection.
pub fn critical_orbits(f: &MapSpec, n_bound: usize) -> Result<CriticalData> {
    let f = p1_of(f)?;
    let d = f.degree();
    let mut graph: BTreeMap<String, Node> = BTreeMap::new();
    let mut points = vec![];
    let mut total = 0;
    let crit = critical_points(f);
    for (c, m, _) in &crit {
        let key = orbit_key(c);
        let size = height(c).0.max(1);
        total += m * size;
        graph.insert(key, Node { size, e: *m as u64 + 1, image: None, rep: c.clone() });
    }
    for (c, m, g) in crit {
        let key = orbit_key(&c);
        let size = g.degree().unwrap_or(1);
        let mut cp = CriticalPoint {
            key: key.clone(),
            label: point_label(&c),
            galois_size: size,
            multiplicity: m,
            orbit: vec![key],
            tail: None,
            cycle: None,
            status: OrbitStatus::Undecided,
        };
        if size > FIELD_DEGREE_CAP {
            cp.status = OrbitStatus::DegreeCap;
            points.push(cp);
            continue;
        }
        let mut vals: Vec<Pt> = vec![c];
        let mut hs = vec![height(&vals[0])];
        for _ in 0..n_bound {
            let y = image(f, vals.last().unwrap());
            let ky = orbit_key(&y);
            let kx = cp.orbit.last().unwrap().clone();
            graph.get_mut(&kx).unwrap().image = Some(ky.clone());
            let h = height(&y);
            graph
                .entry(ky.clone())
                .or_insert_with(|| Node { size: h.0.max(1), e: 1, image: None, rep: y.clone() });
            if let Some(i) = vals.iter().position(|v| *v == y) {
                cp.tail = Some(i);
                cp.cycle = Some(vals.len() - i);
                cp.status = OrbitStatus::Preperiodic;
                break;
            }
            vals.push(y);
            cp.orbit.push(ky);
            hs.push(h);
            if grows(&hs) {
                cp.status = OrbitStatus::HeightGrowth;
                break;
            }
            if h.1 > HEIGHT_CAP_BITS {
                break;
            }
        }
        points.push(cp);
    }
    Ok(CriticalData { degree: d, points, ramification_total: total, n_bound, graph })
}

fn grows(hs: &[(usize, u64)]) -> bool {
    if hs.len() <= GROWTH_STEPS {
        return false;
    }
    let w = &hs[hs.len() - GROWTH_STEPS - 1..];
    w.windows(2).all(|p| p[0].0 == p[1].0 && p[0].1 < p[1].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MapSpec {
        MapSpec::P1(P1Map::polynomial(&Poly::from_ints(c)).unwrap())
    }

    #[test]
    fn square_map() {
        let cd = critical_orbits(&poly(&[0, 0, 1]), 64).unwrap();
        assert!(cd.is_pcf());
        assert_eq!(cd.ramification_total, 2);
        let keys: Vec<_> = cd.points.iter().map(|c| (c.label.clone(), c.cycle)).collect();
        assert_eq!(keys, vec![("inf".into(), Some(1)), ("0".into(), Some(1))]);
    }

    #[test]
    fn basilica_cycle() {
        let cd = critical_orbits(&poly(&[-1, 0, 1]), 64).unwrap();
        assert!(cd.is_pcf());
        let zero = cd.points.iter().find(|c| c.label == "0").unwrap();
        assert_eq!((zero.tail, zero.cycle), (Some(0), Some(2)));
    }

    #[test]
    fn growth_certifies_non_pcf() {
        // oracle: the integer orbit 0, 1, 2, 5, 26, ... is strictly increasing
        let mut x: u128 = 0;
        let mut prev = 0;
        for i in 0..6 {
            x = x * x + 1;
            assert!(i == 0 || x > prev);
            prev = x;
        }
        let cd = critical_orbits(&poly(&[1, 0, 1]), 64).unwrap();
        assert!(!cd.is_pcf());
        assert!(cd.certified_not_pcf());
    }

    #[test]
    fn riemann_hurwitz_on_rational_maps() {
        let lattes = P1Map::rational(&Poly::from_ints(&[0, -8, 0, 0, 1]), &Poly::from_ints(&[4, 0, 0, 4])).unwrap();
        let cd = critical_orbits(&MapSpec::P1(lattes), 64).unwrap();
        assert_eq!(cd.ramification_total, 6);
        assert!(cd.is_pcf());
    }
}
