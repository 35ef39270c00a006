//! Degree-bounded vanishing ideals of orbits: the exact kernel of the
//! evaluation matrix of all forms of bounded (multi)degree on orbit points.

use num_traits::Zero;
use serde::Serialize;

use super::modq;
use crate::error::{Error, Result};
use crate::exactnum::fp::Fp;
use crate::exactnum::{linalg, MPoly, Rational};
use crate::projdyn::{evaluate, MapSpec, ProjPoint};

/// Orbit points are computed exactly up to this height.
pub const EXACT_BITS: u64 = 1 << 14;
/// Primes used for held-out checks past the exact range.
pub const MODULAR_PRIMES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureVerdict {
    /// No form of the bounded degree vanishes on the sample.
    DenseAtD,
    ClosureCandidate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub space: String,
    pub degree_bound: Vec<u32>,
    pub mpts: usize,
    pub monomials: usize,
    pub verdict: ClosureVerdict,
    pub forms: Vec<String>,
    pub variables: Vec<String>,
    pub held_out: usize,
    pub held_out_exact: usize,
    /// Held-out points checked only modulo `modular_primes`.
    pub held_out_modular: usize,
    pub modular_primes: Vec<u64>,
    /// Forms dropped because they failed a held-out point.
    pub dropped: usize,
    #[serde(skip)]
    pub polys: Vec<MPoly>,
}

fn variables(f: &MapSpec) -> Vec<String> {
    match f {
        MapSpec::P1(_) => vec!["X".into(), "Y".into()],
        MapSpec::P2(_) => vec!["X".into(), "Y".into(), "Z".into()],
        MapSpec::P1xN(v) => (1..=v.len()).flat_map(|i| [format!("X{i}"), format!("Y{i}")]).collect(),
    }
}

/// Exponent vectors of all forms of the given (multi)degree.
fn monomials(f: &MapSpec, bound: &[u32]) -> Result<Vec<Vec<u32>>> {
    let binary = |d: u32| (0..=d).rev().map(move |k| [k, d - k]);
    match f {
        MapSpec::P1(_) => Ok(binary(bound[0]).map(|m| m.to_vec()).collect()),
        MapSpec::P2(_) => Ok(crate::projdyn::map::ternary_monomials(bound[0]).into_iter().map(|m| m.to_vec()).collect()),
        MapSpec::P1xN(v) => {
            let bs: Vec<u32> = match bound.len() {
                1 => vec![bound[0]; v.len()],
                n if n == v.len() => bound.to_vec(),
                _ => return Err(Error::Precondition("one degree bound per factor expected".into())),
            };
            let mut out: Vec<Vec<u32>> = vec![vec![]];
            for d in bs {
                out = out.into_iter().flat_map(|m| binary(d).map(move |b| [m.clone(), b.to_vec()].concat())).collect();
            }
            Ok(out)
        }
    }
}

fn rational_coords(p: &ProjPoint) -> Result<Vec<Rational>> {
    p.factors()
        .iter()
        .flatten()
        .map(|a| a.as_rational().ok_or_else(|| Error::Precondition("orbit points must be rational".into())))
        .collect()
}

fn mono_value(m: &[u32], x: &[Rational]) -> Rational {
    m.iter().zip(x).fold(Rational::from_integer(1.into()), |acc, (&e, v)| acc * num_traits::pow(v.clone(), e as usize))
}

fn mono_value_mod(fp: &Fp, m: &[u32], x: &[u64]) -> u64 {
    m.iter().zip(x).fold(1, |acc, (&e, &v)| fp.mul(acc, fp.pow(v, e as u64)))
}

/// The map acting on homogeneous coordinates modulo a prime; None on a
/// coefficient with a bad denominator or when the image vector vanishes.
fn step_mod(fp: &Fp, f: &MapSpec, x: &[u64]) -> Option<Vec<u64>> {
    let bin = |p: &crate::exactnum::Poly, d: usize, a: u64, b: u64| -> Option<u64> {
        let mut s = 0;
        for k in 0..=d {
            let c = modq::reduce(fp, &p.coeff(k))?;
            s = fp.add(s, fp.mul(c, fp.mul(fp.pow(a, k as u64), fp.pow(b, (d - k) as u64))));
        }
        Some(s)
    };
    let out = match f {
        MapSpec::P1(m) => vec![bin(m.num(), m.degree(), x[0], x[1])?, bin(m.den(), m.degree(), x[0], x[1])?],
        MapSpec::P1xN(ms) => {
            let mut v = vec![];
            for (i, m) in ms.iter().enumerate() {
                let (a, b) = (x[2 * i], x[2 * i + 1]);
                let pair = [bin(m.num(), m.degree(), a, b)?, bin(m.den(), m.degree(), a, b)?];
                if pair == [0, 0] {
                    return None;
                }
                v.extend(pair);
            }
            v
        }
        MapSpec::P2(m) => {
            let mut v = vec![];
            for form in m.forms() {
                let mut s = 0;
                for (e, c) in form.terms() {
                    s = fp.add(s, fp.mul(modq::reduce(fp, c)?, mono_value_mod(fp, e, x)));
                }
                v.push(s);
            }
            v
        }
    };
    (!out.iter().all(|&c| c == 0)).then_some(out)
}

fn eval_form_mod(fp: &Fp, p: &MPoly, x: &[u64]) -> Option<u64> {
    let mut s = 0;
    for (e, c) in p.terms() {
        s = fp.add(s, fp.mul(modq::reduce(fp, c)?, mono_value_mod(fp, e, x)));
    }
    Some(s)
}

/// Forms of degree `bound` vanishing on x, f(x), ..., f^(mpts-1)(x), each
/// re-checked on the next 2 mpts orbit points.
pub fn orbit_closure(f: &MapSpec, x: &ProjPoint, bound: &[u32], mpts: usize) -> Result<ClosureReport> {
    if bound.is_empty() {
        return Err(Error::Precondition("missing degree bound".into()));
    }
    let mons = monomials(f, bound)?;
    if mpts <= mons.len() {
        return Err(Error::InsufficientSample { needed: mons.len(), got: mpts });
    }
    let total = 3 * mpts;
    let mut exact: Vec<Vec<Rational>> = vec![rational_coords(x)?];
    let mut cur = x.clone();
    while exact.len() < total {
        let next = evaluate(f, &cur)?;
        if next.height_bits() > EXACT_BITS {
            break;
        }
        exact.push(rational_coords(&next)?);
        cur = next;
    }
    if exact.len() < mpts {
        return Err(Error::CapExceeded(format!(
            "orbit exceeds {EXACT_BITS} bits after {} of {mpts} interpolation points",
            exact.len()
        )));
    }
    let row = |p: &[Rational]| mons.iter().map(|m| mono_value(m, p)).collect::<Vec<Rational>>();
    let rows: Vec<Vec<Rational>> = exact[..mpts].iter().map(|p| row(p)).collect();
    let mut basis = linalg::kernel(&rows, mons.len());
    let held_exact = exact.len() - mpts;
    let fails = |b: &[Rational], p: &[Rational]| {
        b.iter().zip(&row(p)).fold(Rational::zero(), |acc, (u, v)| acc + u * v) != Rational::zero()
    };
    let mut dropped = 0;
    if basis.iter().any(|b| exact[mpts..].iter().any(|p| fails(b, p))) {
        let all: Vec<Vec<Rational>> = exact.iter().map(|p| row(p)).collect();
        let refined = linalg::kernel(&all, mons.len());
        dropped += basis.len() - refined.len();
        basis = refined;
    }
    let basis = linalg::rref_rows(&basis, mons.len());
    let nv = mons[0].len();
    let mut polys: Vec<MPoly> = basis
        .iter()
        .map(|b| MPoly::from_terms(nv, mons.iter().cloned().zip(b.iter().cloned())).primitive())
        .collect();
    // modular continuation of the orbit past the exact range
    let remaining = total - exact.len();
    let mut primes = vec![];
    let mut checked_mod = 0;
    if remaining > 0 {
        let last = exact.last().unwrap();
        let mut states: Vec<(Fp, Vec<u64>)> = modq::search_primes()
            .take(4 * MODULAR_PRIMES)
            .filter_map(|q| {
                let fp = Fp::new(q);
                let v: Option<Vec<u64>> = last.iter().map(|c| modq::reduce(&fp, c)).collect();
                v.map(|v| (fp, v))
            })
            .take(MODULAR_PRIMES)
            .collect();
        primes = states.iter().map(|s| s.0.p).collect();
        for _ in 0..remaining {
            let mut any = false;
            states.retain_mut(|(fp, v)| match step_mod(fp, f, v) {
                Some(w) => {
                    *v = w;
                    true
                }
                None => false,
            });
            let before = polys.len();
            polys.retain(|p| {
                states.iter().all(|(fp, v)| eval_form_mod(fp, p, v).is_none_or(|r| r == 0))
            });
            dropped += before - polys.len();
            if !states.is_empty() {
                any = true;
            }
            if any {
                checked_mod += 1;
            }
        }
    }
    let names = variables(f);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(ClosureReport {
        space: f.space().to_string(),
        degree_bound: bound.to_vec(),
        mpts,
        monomials: mons.len(),
        verdict: if polys.is_empty() { ClosureVerdict::DenseAtD } else { ClosureVerdict::ClosureCandidate },
        forms: polys.iter().map(|p| p.display_with(&refs)).collect(),
        variables: names.clone(),
        held_out: 2 * mpts,
        held_out_exact: held_exact,
        held_out_modular: checked_mod,
        modular_primes: primes,
        dropped,
        polys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::exactnum::AlgebraicNumber;
    use crate::projdyn::P2Map;

    fn squares() -> MapSpec {
        let v = |i| MPoly::var(3, i);
        MapSpec::P2(P2Map::new([v(0).pow(2), v(1).pow(2), v(2).pow(2)], 2).unwrap())
    }

    fn pt(x: i64, y: i64) -> ProjPoint {
        ProjPoint::p2([AlgebraicNumber::from_int(x), AlgebraicNumber::from_int(y), AlgebraicNumber::from_int(1)]).unwrap()
    }

    #[test]
    fn parabola_orbit() {
        let r = orbit_closure(&squares(), &pt(2, 4), &[2], 7).unwrap();
        assert_eq!(r.verdict, ClosureVerdict::ClosureCandidate);
        // oracle: (2^(2^k), 4^(2^k)) lies on Y Z = X^2 and the kernel is one-dimensional
        for k in 0..7u32 {
            let x = num_bigint::BigInt::from(2).pow(1 << k);
            assert_eq!(&x * &x, num_bigint::BigInt::from(4).pow(1 << k));
        }
        let expect = MPoly::parse("X^2 - Y*Z", &["X", "Y", "Z"]).unwrap();
        assert_eq!(r.polys.len(), 1);
        assert!(r.polys[0] == expect || r.polys[0] == expect.scale(&int(-1)));
        assert_eq!(r.held_out_exact + r.held_out_modular, 14);
        assert!(r.held_out_modular > 0);
    }

    #[test]
    fn independent_orbit_is_dense() {
        let r = orbit_closure(&squares(), &pt(2, 3), &[2], 12).unwrap();
        assert_eq!(r.verdict, ClosureVerdict::DenseAtD);
    }

    #[test]
    fn identity_gives_the_point() {
        let v = |i| MPoly::var(3, i);
        let id = MapSpec::P2(P2Map::new([v(0), v(1), v(2)], 1).unwrap());
        let r = orbit_closure(&id, &pt(2, 3), &[1], 4).unwrap();
        assert_eq!(r.polys.len(), 2);
        assert_eq!(r.verdict, ClosureVerdict::ClosureCandidate);
    }

    #[test]
    fn sample_must_exceed_monomials() {
        let e = orbit_closure(&squares(), &pt(2, 3), &[2], 6).unwrap_err();
        assert_eq!(e, Error::InsufficientSample { needed: 6, got: 6 });
    }

    #[test]
    fn split_multidegree() {
        use crate::exactnum::Poly;
        use crate::projdyn::P1Map;
        let sq = P1Map::polynomial(&Poly::from_ints(&[0, 0, 1])).unwrap();
        let f = MapSpec::split(vec![sq.clone(), sq]).unwrap();
        let x = ProjPoint::product(&[ProjPoint::p1_rat(int(2)), ProjPoint::p1_rat(int(4))]).unwrap();
        let r = orbit_closure(&f, &x, &[2, 1], 8).unwrap();
        let expect = MPoly::parse("X1^2*Y2 - X2*Y1^2", &["X1", "Y1", "X2", "Y2"]).unwrap();
        assert_eq!(r.polys.len(), 1);
        assert!(r.polys[0] == expect || r.polys[0] == expect.scale(&int(-1)));
    }
}
