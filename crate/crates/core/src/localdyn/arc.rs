//! The analytic flow Phi(t, .) interpolating n -> f^{mn} on residue disks.
//!
//! With g = f^m and Delta = g^* - id, Phi(t, z) = exp(t log(1 + Delta))(z)
//! = sum_k binom(t, k) (Delta^k x)(z). The k-th term is bounded by
//! p^-(rho + k delta - v(k!)), which decays once delta > 1/(p - 1).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::goodprime::GoodPrimeReport;
use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::Poly;
use crate::padic::element::ppow;
use crate::padic::{eval_poly, PadicElement, PadicSeries1, TailBound};
use crate::projdyn::{MapSpec, ProjPoint};

#[derive(Clone, Debug, Serialize)]
pub struct ArcClass {
    /// Phi(k, start) = f^(offset + m k)(x)
    pub offset: usize,
    pub start: PadicElement,
    /// The disk is center + p^rho Z_p.
    pub rho: i64,
    pub center: String,
    /// ||Delta|| <= p^-delta on the disk.
    pub delta: i64,
    /// Phi(t, start) as a series in t.
    pub series: PadicSeries1,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcFlow {
    pub prime: u64,
    pub dimension: usize,
    pub period: usize,
    pub preperiod: usize,
    pub precision: i64,
    /// Number of Mahler terms kept.
    pub terms: usize,
    pub classes: Vec<ArcClass>,
    #[serde(skip)]
    map: Poly,
}

pub(crate) fn polynomial_map(f: &MapSpec) -> Result<Poly> {
    match f {
        MapSpec::P1(g) => g
            .as_polynomial()
            .ok_or_else(|| Error::Precondition("arcs are built for polynomial maps of the line".into())),
        _ => Err(Error::Precondition("arcs are built for polynomial maps of the line".into())),
    }
}

pub(crate) fn affine_start(x: &ProjPoint) -> Result<Rational> {
    x.affine()
        .and_then(|a| a.as_rational())
        .ok_or_else(|| Error::Precondition("the start point must be a finite rational point".into()))
}

fn v_factorial(k: usize, p: u64) -> i64 {
    let (mut s, mut q) = (0i64, p as usize);
    while q <= k {
        s += (k / q) as i64;
        q = q.saturating_mul(p as usize);
        if q == usize::MAX {
            break;
        }
    }
    s
}

fn reduce_mod(r: &Rational, m: &BigInt) -> BigInt {
    let inv = crate::padic::element::mod_inverse(&r.denom().mod_floor(m), m);
    (r.numer() * inv).mod_floor(m)
}

/// Truncated Taylor iteration of f in the disk coordinate u, x = c + p u,
/// modulo p^(cap+1); returns min(cap, min valuation of G(u) - u).
fn residue_disk_delta(f: &Poly, m: usize, c: &BigInt, p: u64, cap: i64) -> i64 {
    let modulus = ppow(p, cap + 1);
    let len = (cap + 2) as usize;
    let fc: Vec<BigInt> = f.coeffs().iter().map(|a| reduce_mod(a, &modulus)).collect();
    let mul = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] = (&out[i + j] + x * y).mod_floor(&modulus);
            }
        }
        out
    };
    let mut h = vec![BigInt::zero(); len];
    h[0] = c.mod_floor(&modulus);
    h[1] = BigInt::from(p);
    for _ in 0..m {
        let mut acc = vec![BigInt::zero(); len];
        for a in fc.iter().rev() {
            acc = mul(&acc, &h);
            acc[0] = (&acc[0] + a).mod_floor(&modulus);
        }
        h = acc;
    }
    // G(u) - u = (h(u) - c - p u) / p
    h[0] = (&h[0] - c).mod_floor(&modulus);
    h[1] = (&h[1] - BigInt::from(p)).mod_floor(&modulus);
    h.iter()
        .filter(|x| !x.is_zero())
        .map(|x| rational::int_valuation(x, p) - 1)
        .min()
        .unwrap_or(cap)
        .min(cap)
}

/// f^m = a u + b exactly for affine f; returns min valuation of (a - 1, b) on Z_p.
fn affine_delta(f: &Poly, m: usize, p: u64, cap: i64) -> i64 {
    let (a1, b1) = (f.coeff(1), f.coeff(0));
    let (mut a, mut b) = (Rational::one(), Rational::zero());
    for _ in 0..m {
        b = &a1 * &b + &b1;
        a = &a1 * &a;
    }
    let va = rational::valuation(&(a - Rational::one()), p).unwrap_or(cap);
    let vb = rational::valuation(&b, p).unwrap_or(cap);
    va.min(vb).min(cap)
}

/// Smallest K with rho + (K+1) delta - K/(p-1) >= M.
fn mahler_terms(rho: i64, delta: i64, p: u64, m: i64) -> usize {
    let q = p as i64 - 1;
    let mut k = 0i64;
    while (rho + (k + 1) * delta) * q - k < m * q {
        k += 1;
    }
    k as usize
}

fn stirling_first(n: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); n + 1]; n + 1];
    s[0][0] = BigInt::one();
    for k in 0..n {
        for i in 1..=k + 1 {
            s[k + 1][i] = &s[k][i - 1] - BigInt::from(k) * &s[k][i];
        }
    }
    s
}

/// Forward differences (Delta^k x)(z) for k <= K from the orbit z, g z, g^2 z, ...
fn differences(orbit: &[PadicElement]) -> Vec<PadicElement> {
    let mut row = orbit.to_vec();
    let mut out = Vec::with_capacity(orbit.len());
    while !row.is_empty() {
        out.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

impl ArcFlow {
    pub fn map(&self) -> &Poly {
        &self.map
    }

    fn working_precision(&self) -> i64 {
        self.precision + v_factorial(self.terms + 1, self.prime) + 4
    }

    fn iterate_m(&self, z: &PadicElement) -> PadicElement {
        let mut w = z.clone();
        for _ in 0..self.period {
            w = eval_poly(&self.map, &w).with_prec(z.prec());
        }
        w
    }

    /// Class whose disk contains z.
    pub fn class_of(&self, z: &PadicElement) -> Option<usize> {
        self.classes.iter().position(|c| {
            if c.rho == 0 {
                return z.is_integral();
            }
            let center = PadicElement::from_rational(self.prime, &rational::parse(&c.center).unwrap(), z.prec());
            (z - &center).val_or_prec() >= c.rho
        })
    }

    /// Phi(t, z) for t in Z_p and z in one of the arc's disks.
    pub fn flow(&self, t: &PadicElement, z: &PadicElement) -> Result<PadicElement> {
        if !t.is_integral() {
            return Err(Error::Precondition("flow time must lie in Z_p".into()));
        }
        if self.class_of(z).is_none() {
            return Err(Error::Precondition("point outside the arc's disks".into()));
        }
        let p = self.prime;
        let w = self.working_precision();
        let mut orbit = vec![z.lift_to(w)];
        for _ in 0..self.terms {
            let next = self.iterate_m(orbit.last().unwrap());
            orbit.push(next);
        }
        let diffs = differences(&orbit);
        let t = t.lift_to(w);
        let mut binom = PadicElement::one(p, w);
        let mut acc = PadicElement::zero(p, w);
        for (k, d) in diffs.iter().enumerate() {
            if k > 0 {
                let num = &t - &PadicElement::from_int(p, k as i64 - 1, w);
                let kk = PadicElement::from_int(p, k as i64, w + 64);
                binom = (&binom * &num).checked_div(&kk).unwrap();
            }
            acc = &acc + &(&binom * d);
        }
        Ok(acc.with_prec(self.precision))
    }

    /// f^(offset + m k) of the class start, computed by iteration.
    pub fn iterate_class(&self, class: usize, k: usize) -> PadicElement {
        let mut w = self.classes[class].start.clone();
        for _ in 0..k {
            w = self.iterate_m(&w);
        }
        w
    }
}

/// Build the flow for the period certified by `report`, one class per
/// residue j mod m, starting at f^(preperiod + j)(x).
pub fn build_arc(f: &MapSpec, report: &GoodPrimeReport, x: &ProjPoint, t_arc: Option<usize>, m: i64) -> Result<ArcFlow> {
    let g = polynomial_map(f)?;
    let x0 = affine_start(x)?;
    let p = report.prime;
    let period = report.period;
    if period == 0 {
        return Err(Error::Precondition("report carries no period".into()));
    }
    let need = if p == 2 { 2 } else { 1 };
    let cap = m.max(need + 1);
    let degree = g.degree().unwrap_or(0);
    if degree == 0 {
        return Err(Error::Precondition("constant maps have no arc".into()));
    }
    // disk data per class
    let preperiod = report.preperiod;
    let mut classes_meta = Vec::with_capacity(period);
    for j in 0..period {
        let residue = report.residue_cycle[j % report.cycle_length];
        let Some(residue) = residue else {
            return Err(Error::Precondition("the residue cycle meets infinity".into()));
        };
        let (rho, center, delta) = if degree == 1 {
            (0, BigInt::zero(), affine_delta(&g, period, p, cap))
        } else {
            let c = BigInt::from(residue);
            (1, c.clone(), residue_disk_delta(&g, period, &c, p, cap))
        };
        if delta < need {
            return Err(Error::IterateFurther);
        }
        classes_meta.push((rho, center, delta));
    }
    let k_max = classes_meta.iter().map(|(r, _, d)| mahler_terms(*r, *d, p, m)).max().unwrap();
    let t_arc = t_arc.unwrap_or(k_max);
    let w = m + v_factorial(k_max + 1, p) + 4;
    let mut arc = ArcFlow {
        prime: p,
        dimension: 1,
        period,
        preperiod,
        precision: m,
        terms: k_max,
        classes: Vec::new(),
        map: g.clone(),
    };
    // p-adic orbit of x long enough for every class
    let total = preperiod + period * (k_max + 1) + 1;
    let mut orbit = vec![PadicElement::from_rational(p, &x0, w)];
    if !orbit[0].is_integral() {
        return Err(Error::Precondition("start point is not p-integral".into()));
    }
    for _ in 1..total {
        let next = eval_poly(&g, orbit.last().unwrap()).with_prec(w);
        orbit.push(next);
    }
    let stirling = stirling_first(k_max);
    let mut fact = BigInt::one();
    let facts: Vec<BigInt> = (0..=k_max)
        .map(|k| {
            if k > 0 {
                fact *= k;
            }
            fact.clone()
        })
        .collect();
    for (j, (rho, center, delta)) in classes_meta.into_iter().enumerate() {
        let offset = preperiod + j;
        let pts: Vec<PadicElement> = (0..=k_max).map(|k| orbit[offset + period * k].clone()).collect();
        let diffs = differences(&pts);
        let scaled: Vec<PadicElement> = diffs
            .iter()
            .zip(&facts)
            .map(|(d, f)| d.checked_div(&PadicElement::from_bigint(p, f, w + 64)).unwrap())
            .collect();
        let keep = t_arc.min(k_max);
        let mut coeffs = Vec::with_capacity(keep + 1);
        for i in 0..=keep {
            let mut acc = PadicElement::zero(p, w);
            for k in i..=k_max {
                let s = &stirling[k][i];
                if s.is_zero() {
                    continue;
                }
                acc = &acc + &(&scaled[k] * &PadicElement::from_bigint(p, s, w + 64));
            }
            coeffs.push(acc.with_prec(m));
        }
        let tail = if keep >= k_max {
            m
        } else {
            let q = p as i64 - 1;
            let tt = keep as i64;
            Integer::div_floor(&((rho + (tt + 1) * delta) * q - tt), &q).min(m)
        };
        let center_q = if rho == 0 { Rational::zero() } else { Rational::from(center.clone()) };
        arc.classes.push(ArcClass {
            offset,
            start: pts[0].with_prec(m),
            rho,
            center: rational::to_string(&center_q),
            delta,
            series: PadicSeries1::new(p, coeffs, TailBound::AtLeast(tail)),
        });
    }
    Ok(arc)
}

/// A copy of `report` asking for the period m * k.
pub fn with_period_multiple(report: &GoodPrimeReport, k: usize) -> GoodPrimeReport {
    GoodPrimeReport { period: report.period * k, ..report.clone() }
}

/// build_arc, multiplying the period by p while the difference operator is too large.
pub fn build_arc_auto(f: &MapSpec, report: &GoodPrimeReport, x: &ProjPoint, m: i64) -> Result<(ArcFlow, GoodPrimeReport)> {
    let mut r = report.clone();
    for _ in 0..3 {
        match build_arc(f, &r, x, None, m) {
            Ok(a) => return Ok((a, r)),
            Err(Error::IterateFurther) => r = with_period_multiple(&r, report.prime as usize),
            Err(e) => return Err(e),
        }
    }
    Err(Error::IterateFurther)
}
