//! Primes of good reduction carrying a periodic residue point with
//! df^m = id mod p along the reduced orbit.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::fp::{is_prime, Fp, FpPoly};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::Poly;
use crate::projdyn::{MapSpec, P1Map, ProjPoint};

/// Cap on the period m searched for.
pub const DEFAULT_M_MAX: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodPrimeReport {
    pub prime: u64,
    /// Reduced forms, coefficients of x^0, x^1, ... over F_p.
    pub reduced_num: Vec<u64>,
    pub reduced_den: Vec<u64>,
    pub good_reduction: bool,
    pub periodic_residue_found: bool,
    /// Steps until the reduced orbit of x enters its cycle.
    pub preperiod: usize,
    pub cycle_length: usize,
    /// df^m = id mod p on the residue cycle.
    pub period: usize,
    /// Residues of the cycle, None at infinity.
    pub residue_cycle: Vec<Option<u64>>,
}

fn reduce_rational(r: &Rational, fp: &Fp) -> Option<u64> {
    let p = fp.p;
    if rational::int_valuation(r.denom(), p) > 0 {
        return None;
    }
    Some(fp.mul(fp.reduce_int(r.numer()), fp.inv(fp.reduce_int(r.denom()))))
}

fn reduce_poly(f: &Poly, fp: &Fp) -> Option<FpPoly> {
    let c: Option<Vec<u64>> = f.coeffs().iter().map(|c| reduce_rational(c, fp)).collect();
    Some(fp.norm(c?))
}

fn padded_rev(f: &FpPoly, d: usize, fp: &Fp) -> FpPoly {
    fp.norm((0..=d).map(|i| f.get(d - i).copied().unwrap_or(0)).collect())
}

struct Reduced {
    fp: Fp,
    num: FpPoly,
    den: FpPoly,
    d: usize,
}

impl Reduced {
    fn new(f: &P1Map, p: u64) -> std::result::Result<Self, String> {
        let fp = Fp::new(p);
        let num = reduce_poly(f.num(), &fp).ok_or("coefficient denominator divisible by p")?;
        let den = reduce_poly(f.den(), &fp).ok_or("coefficient denominator divisible by p")?;
        let d = f.degree();
        if fp.deg(&num).max(fp.deg(&den)) != d as i64 || fp.deg(&fp.gcd(&num, &den)) > 0 {
            return Err("bad reduction (resultant vanishes mod p)".into());
        }
        Ok(Reduced { fp, num, den, d })
    }

    fn coeff(v: &FpPoly, i: usize) -> u64 {
        v.get(i).copied().unwrap_or(0)
    }

    /// Image of a residue; None stands for infinity.
    fn eval(&self, y: Option<u64>) -> Option<u64> {
        let fp = &self.fp;
        match y {
            Some(y) => {
                let b = fp.eval(&self.den, y);
                (b != 0).then(|| fp.mul(fp.eval(&self.num, y), fp.inv(b)))
            }
            None => {
                let b = Self::coeff(&self.den, self.d);
                (b != 0).then(|| fp.mul(Self::coeff(&self.num, self.d), fp.inv(b)))
            }
        }
    }

    /// Derivative of f from the chart at a to the chart at b = f(a).
    fn local_derivative(&self, a: Option<u64>, b: Option<u64>) -> u64 {
        let fp = &self.fp;
        let (aa, bb, s) = match a {
            Some(a) => (self.num.clone(), self.den.clone(), a),
            None => (padded_rev(&self.num, self.d, fp), padded_rev(&self.den, self.d, fp), 0),
        };
        let (top, bot) = if b.is_some() { (aa, bb) } else { (bb, aa) };
        let (t, u) = (fp.eval(&top, s), fp.eval(&bot, s));
        let (dt, du) = (fp.eval(&fp.derivative(&top), s), fp.eval(&fp.derivative(&bot), s));
        let num = fp.sub(fp.mul(dt, u), fp.mul(t, du));
        fp.mul(num, fp.inv(fp.mul(u, u)))
    }
}

fn mult_order(fp: &Fp, mu: u64, cap: usize) -> Option<usize> {
    let mut acc = mu;
    for k in 1..=cap {
        if acc == 1 {
            return Some(k);
        }
        acc = fp.mul(acc, mu);
    }
    None
}

fn rational_point(x: &ProjPoint) -> Result<(Rational, Rational)> {
    let f = &x.factors()[0];
    let a = f[0].as_rational();
    let b = f[1].as_rational();
    match (a, b) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Precondition("the start point must have rational coordinates".into())),
    }
}

fn reduce_point(x: &ProjPoint, fp: &Fp) -> std::result::Result<Option<u64>, String> {
    let (a, b) = rational_point(x).map_err(|e| e.to_string())?;
    if b.is_zero() {
        return Ok(None);
    }
    reduce_rational(&(a / b), fp).map(Some).ok_or_else(|| "denominator of x divisible by p".into())
}

fn try_prime(f: &P1Map, x: &ProjPoint, p: u64, m_max: usize) -> std::result::Result<GoodPrimeReport, String> {
    let red = Reduced::new(f, p)?;
    let fp = &red.fp;
    let x0 = reduce_point(x, fp)?;
    let mut seen: Vec<Option<u64>> = vec![x0];
    let (tail, cycle) = loop {
        let y = red.eval(*seen.last().unwrap());
        if let Some(i) = seen.iter().position(|z| *z == y) {
            break (i, seen.len() - i);
        }
        seen.push(y);
    };
    let residue_cycle: Vec<Option<u64>> = seen[tail..].to_vec();
    let mut mu = 1u64;
    for (i, a) in residue_cycle.iter().enumerate() {
        let b = residue_cycle[(i + 1) % cycle];
        mu = fp.mul(mu, red.local_derivative(*a, b));
    }
    let base = GoodPrimeReport {
        prime: p,
        reduced_num: red.num.clone(),
        reduced_den: red.den.clone(),
        good_reduction: true,
        periodic_residue_found: true,
        preperiod: tail,
        cycle_length: cycle,
        period: 0,
        residue_cycle,
    };
    if mu == 0 {
        return Err("residue cycle is superattracting mod p".into());
    }
    let cap = m_max / cycle;
    match mult_order(fp, mu, cap) {
        Some(k) => Ok(GoodPrimeReport { period: cycle * k, ..base }),
        None => Err(format!("period exceeds m_max = {m_max}")),
    }
}

/// Smallest prime in [p_min, p_max] with good reduction, integral x and a
/// residue cycle on the reduced orbit of x whose multiplier has finite order.
pub fn find_good_prime(f: &MapSpec, x: &ProjPoint, p_min: u64, p_max: u64) -> Result<GoodPrimeReport> {
    find_good_prime_capped(f, x, p_min, p_max, DEFAULT_M_MAX)
}

pub fn find_good_prime_capped(
    f: &MapSpec,
    x: &ProjPoint,
    p_min: u64,
    p_max: u64,
    m_max: usize,
) -> Result<GoodPrimeReport> {
    let MapSpec::P1(f) = f else {
        return Err(Error::Precondition("good-prime search is implemented for maps of P1".into()));
    };
    if p_min > p_max {
        return Err(Error::Precondition("empty prime range".into()));
    }
    rational_point(x)?;
    let mut reasons = Vec::new();
    for p in (p_min.max(2)..=p_max).filter(|&p| is_prime(p)) {
        match try_prime(f, x, p, m_max) {
            Ok(r) => return Ok(r),
            Err(why) => reasons.push((p, why)),
        }
    }
    Err(Error::NoGoodPrime(reasons))
}

/// The reduced iterate check used by tests: f^m(y) = y and (f^m)'(y) = 1 mod p.
pub fn residue_period_holds(f: &P1Map, report: &GoodPrimeReport) -> bool {
    let Ok(red) = Reduced::new(f, report.prime) else { return false };
    let fp = &red.fp;
    let Some(start) = report.residue_cycle.first().copied() else { return false };
    let mut y = start;
    let mut mu = 1u64;
    for _ in 0..report.period {
        let z = red.eval(y);
        mu = fp.mul(mu, red.local_derivative(y, z));
        y = z;
    }
    y == start && mu == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    fn poly_map(c: &[i64]) -> MapSpec {
        MapSpec::P1(P1Map::polynomial(&Poly::from_ints(c)).unwrap())
    }

    #[test]
    fn spec_examples() {
        let r = find_good_prime(&poly_map(&[0, 2]), &ProjPoint::p1_rat(int(1)), 3, 50).unwrap();
        assert_eq!((r.prime, r.period), (3, 2));
        for p in [3, 5, 7, 11] {
            let r = find_good_prime(&poly_map(&[1, 1]), &ProjPoint::p1_rat(int(0)), p, p).unwrap();
            assert_eq!(r.period as u64, p);
        }
        let r = find_good_prime(&poly_map(&[0, 0, 1]), &ProjPoint::p1_rat(int(1)), 3, 50).unwrap();
        assert_eq!((r.prime, r.cycle_length, r.period), (3, 1, 2));
        let r = find_good_prime(&poly_map(&[0, 0, 1]), &ProjPoint::p1_rat(int(1)), 5, 50).unwrap();
        assert_eq!(r.period, 4);
    }

    #[test]
    fn failures_are_listed() {
        // 3x has bad reduction at 3 and the residue 0 is superattracting for x^2 at 0
        let e = find_good_prime(&poly_map(&[0, 3]), &ProjPoint::p1_rat(int(1)), 3, 3).unwrap_err();
        assert!(matches!(e, Error::NoGoodPrime(ref v) if v.len() == 1));
        let e = find_good_prime(&poly_map(&[0, 0, 1]), &ProjPoint::p1_rat(int(0)), 3, 7).unwrap_err();
        assert!(matches!(e, Error::NoGoodPrime(ref v) if v.len() == 3));
    }

    #[test]
    fn rational_map_through_infinity() {
        // x -> 1/x swaps 0 and infinity; (f^2)' = 1 everywhere
        let f = P1Map::rational(&Poly::from_ints(&[1]), &Poly::from_ints(&[0, 1])).unwrap();
        let r = find_good_prime(&MapSpec::P1(f.clone()), &ProjPoint::p1_rat(int(0)), 3, 10).unwrap();
        assert_eq!((r.cycle_length, r.period), (2, 2));
        assert!(residue_period_holds(&f, &r));
    }
}
