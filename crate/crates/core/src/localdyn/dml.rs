//! Return-time sets {n : f^n(x) in Z} from Strassmann bounds on the arc
//! classes, cross-checked against a direct orbit search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use super::arc::{affine_start, polynomial_map, ArcFlow};
use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::Poly;
use crate::padic::{strassmann_count, PadicElement, PadicSeries1, StrassmannCount, TailBound};
use crate::projdyn::{MapSpec, ProjPoint};

pub const DEFAULT_N_DIRECT: usize = 500;

/// Orbit heights beyond this many bits are followed modulo auxiliary primes.
const EXACT_BITS: u64 = 1 << 14;
const AUX_PRIMES: [u64; 4] = [2_305_843_009_213_693_951, 2_147_483_647, 1_000_000_007, 998_244_353];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub a: u64,
    pub b: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassKind {
    Full,
    Finite { strassmann_bound: usize, hits: Vec<u64> },
    Undecided { reason: String, hits: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassVerdict {
    pub offset: u64,
    pub modulus: u64,
    #[serde(flatten)]
    pub kind: ClassKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Certified,
    Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DmlVerdict {
    /// Hits outside the full progressions, from the direct search.
    pub hits: Vec<u64>,
    pub progressions: Vec<Progression>,
    pub confidence: Confidence,
    pub n_direct: usize,
    pub prime: u64,
    pub precision: i64,
    pub classes: Vec<ClassVerdict>,
    /// Hits whose exact check was replaced by residues modulo auxiliary primes.
    pub modular_hits: Vec<u64>,
}

/// Truncated series over Z_p with a lower bound on the valuation of dropped terms.
#[derive(Clone)]
struct Series {
    c: Vec<PadicElement>,
    tail: i64,
}

impl Series {
    fn mul(&self, o: &Series) -> Series {
        let t = self.c.len().max(o.c.len());
        let prec = self.c.iter().chain(&o.c).map(|x| x.prec()).min().unwrap();
        let p = self.c[0].prime();
        let mut c = vec![PadicElement::zero(p, prec); t];
        let mut tail = self.tail.min(o.tail);
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                let prod = a * b;
                if i + j < t {
                    c[i + j] = &c[i + j] + &prod;
                } else {
                    tail = tail.min(prod.val_or_prec());
                }
            }
        }
        Series { c, tail: tail.min(prec) }
    }

    fn add_const(&mut self, k: &PadicElement) {
        self.c[0] = &self.c[0] + k;
    }
}

fn compose_poly(h: &[BigInt], s: &Series) -> Series {
    let p = s.c[0].prime();
    let prec = s.c.iter().map(|x| x.prec()).min().unwrap();
    let mut acc = Series { c: vec![PadicElement::zero(p, prec); s.c.len()], tail: prec };
    for a in h.iter().rev() {
        acc = acc.mul(s);
        acc.add_const(&PadicElement::from_bigint(p, a, prec));
    }
    acc
}

enum OrbitValue {
    Exact(Rational),
    Modular(Vec<u64>),
}

fn mod_q(r: &Rational, q: u64) -> Option<u64> {
    let qb = BigInt::from(q);
    let d = r.denom().mod_floor(&qb);
    if d.is_zero() {
        return None;
    }
    let inv = crate::padic::element::mod_inverse(&d, &qb);
    let v = (r.numer().mod_floor(&qb) * inv).mod_floor(&qb);
    Some(u64::try_from(v).unwrap())
}

fn eval_mod(f: &[u64], x: u64, q: u64) -> u64 {
    f.iter().rev().fold(0u128, |acc, c| (acc * x as u128 + *c as u128) % q as u128) as u64
}

/// Direct search for n <= n_direct with all h(f^n(x)) = 0; the flag marks
/// hits decided only modulo the auxiliary primes.
pub fn direct_hits(f: &Poly, x0: &Rational, z: &[Poly], n_direct: usize) -> Vec<(u64, bool)> {
    let reduce = |p: &Poly| -> Option<Vec<Vec<u64>>> {
        AUX_PRIMES
            .iter()
            .map(|&q| p.coeffs().iter().map(|c| mod_q(c, q)).collect::<Option<Vec<u64>>>())
            .collect()
    };
    let f_mod = reduce(f);
    let z_mod: Vec<Option<Vec<Vec<u64>>>> = z.iter().map(reduce).collect();
    let mut out = Vec::new();
    let mut cur = OrbitValue::Exact(x0.clone());
    for n in 0..=n_direct {
        let hit = match &cur {
            OrbitValue::Exact(v) => z.iter().all(|h| h.eval(v).is_zero()).then_some(false),
            OrbitValue::Modular(vs) => {
                let all = z_mod.iter().all(|hm| {
                    let hm = hm.as_ref().unwrap();
                    vs.iter().zip(AUX_PRIMES).zip(hm).all(|((v, q), hq)| eval_mod(hq, *v, q) == 0)
                });
                all.then_some(true)
            }
        };
        if let Some(modular) = hit {
            out.push((n as u64, modular));
        }
        if n == n_direct {
            break;
        }
        cur = match cur {
            OrbitValue::Exact(v) => {
                let next = f.eval(&v);
                let bits = next.numer().bits() + next.denom().bits();
                let can_switch = f_mod.is_some() && z_mod.iter().all(|m| m.is_some());
                if bits > EXACT_BITS && can_switch {
                    match AUX_PRIMES.iter().map(|&q| mod_q(&next, q)).collect::<Option<Vec<u64>>>() {
                        Some(vs) => OrbitValue::Modular(vs),
                        None => OrbitValue::Exact(next),
                    }
                } else {
                    OrbitValue::Exact(next)
                }
            }
            OrbitValue::Modular(vs) => {
                let fm = f_mod.as_ref().unwrap();
                OrbitValue::Modular(vs.iter().zip(AUX_PRIMES).zip(fm).map(|((v, q), fq)| eval_mod(fq, *v, q)).collect())
            }
        };
    }
    out
}

fn class_series(arc: &ArcFlow, class: usize, h: &Poly) -> Series {
    let s = &arc.classes[class].series;
    let tail = match s.tail {
        TailBound::AtLeast(k) => k,
        TailBound::Zero => arc.precision,
        TailBound::Uncertified => 0,
    };
    let base = Series { c: s.coeffs.clone(), tail };
    let hi = h.primitive_int();
    compose_poly(&hi, &base)
}

/// Return times of x to Z = {h_1 = ... = h_r = 0} under a polynomial map of the line.
pub fn dml_decide(f: &MapSpec, x: &ProjPoint, z: &[Poly], arc: &ArcFlow, n_direct: usize) -> Result<DmlVerdict> {
    let g = polynomial_map(f)?;
    if &g != arc.map() {
        return Err(Error::Precondition("arc was built for a different map".into()));
    }
    let x0 = affine_start(x)?;
    let z: Vec<Poly> = z.iter().filter(|h| !h.is_zero()).cloned().collect();
    let direct = direct_hits(&g, &x0, &z, n_direct);
    let p = arc.prime;
    let m = arc.period as u64;
    let mut classes = Vec::new();
    let mut certified = true;
    let mut progressions = Vec::new();
    for (j, cls) in arc.classes.iter().enumerate() {
        let offset = cls.offset as u64;
        let in_class: Vec<u64> = direct.iter().map(|h| h.0).filter(|&n| n >= offset && (n - offset) % m == 0).collect();
        let mut bound: Option<usize> = None;
        let mut all_zero = true;
        let mut reason = None;
        for h in &z {
            let s = class_series(arc, j, h);
            let series = PadicSeries1::new(p, s.c, TailBound::AtLeast(s.tail));
            match strassmann_count(&series) {
                Ok(StrassmannCount::IdenticallyZero) => {}
                Ok(StrassmannCount::Zeros(n)) => {
                    all_zero = false;
                    bound = Some(bound.map_or(n, |b| b.min(n)));
                }
                Err(e) => {
                    all_zero = false;
                    reason = Some(e.to_string());
                }
            }
        }
        let kind = if let Some(b) = bound {
            if in_class.len() > b {
                return Err(Error::Indeterminate(format!(
                    "class {offset} mod {m}: {} direct hits exceed the Strassmann bound {b}",
                    in_class.len()
                )));
            }
            if in_class.len() < b {
                certified = false;
            }
            ClassKind::Finite { strassmann_bound: b, hits: in_class }
        } else if all_zero {
            let expected = (offset..=n_direct as u64).step_by(m as usize).count();
            if in_class.len() != expected {
                certified = false;
                ClassKind::Undecided { reason: "series vanishes at precision but the orbit misses Z".into(), hits: in_class }
            } else {
                progressions.push(Progression { a: offset, b: m });
                ClassKind::Full
            }
        } else {
            certified = false;
            ClassKind::Undecided { reason: reason.unwrap_or_default(), hits: in_class }
        };
        classes.push(ClassVerdict { offset, modulus: m, kind });
    }
    let covered = |n: u64| progressions.iter().any(|pr| n >= pr.a && (n - pr.a) % pr.b == 0);
    let hits: Vec<u64> = direct.iter().map(|h| h.0).filter(|&n| !covered(n)).collect();
    let modular_hits: Vec<u64> = direct.iter().filter(|h| h.1).map(|h| h.0).collect();
    if !modular_hits.is_empty() {
        certified = false;
    }
    Ok(DmlVerdict {
        hits,
        progressions,
        confidence: if certified { Confidence::Certified } else { Confidence::Evidence },
        n_direct,
        prime: p,
        precision: arc.precision,
        classes,
        modular_hits,
    })
}

/// Parse one target polynomial, coefficients from the constant term up.
pub fn target_from_strings(c: &[String]) -> Result<Poly> {
    Ok(Poly::new(c.iter().map(|s| rational::parse(s)).collect::<Result<_>>()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::localdyn::{build_arc_auto, find_good_prime};
    use crate::projdyn::P1Map;

    fn run(c: &[i64], x0: i64, h: &[i64]) -> DmlVerdict {
        let f = MapSpec::P1(P1Map::polynomial(&Poly::from_ints(c)).unwrap());
        let x = ProjPoint::p1_rat(int(x0));
        let r = find_good_prime(&f, &x, 3, 50).unwrap();
        let (arc, _) = build_arc_auto(&f, &r, &x, 20).unwrap();
        dml_decide(&f, &x, &[Poly::from_ints(h)], &arc, DEFAULT_N_DIRECT).unwrap()
    }

    #[test]
    fn spec_examples() {
        let v = run(&[0, 2], 1, &[-8, 1]);
        assert_eq!(v.hits, vec![3]);
        assert!(v.progressions.is_empty());
        assert_eq!(v.confidence, Confidence::Certified);

        let v = run(&[0, 1], 4, &[-4, 1]);
        assert!(v.hits.is_empty());
        assert_eq!(v.progressions, vec![Progression { a: 0, b: 1 }]);
        assert_eq!(v.confidence, Confidence::Certified);

        let v = run(&[1, 1], -5, &[0, 1]);
        assert_eq!(v.hits, vec![5]);
        assert_eq!(v.confidence, Confidence::Certified);
    }

    #[test]
    fn quadratic_orbit() {
        // 2 -> 3 -> 8 -> 63 under x^2 - 1
        let v = run(&[-1, 0, 1], 2, &[-63, 1]);
        assert_eq!(v.hits, vec![3]);
        let v = run(&[1, -1], 0, &[-1, 1]);
        assert_eq!(v.progressions, vec![Progression { a: 1, b: 2 }]);
        assert!(v.hits.is_empty());
    }
}
