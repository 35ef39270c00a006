//! Invariant hypersurfaces of split maps of (P^1)^N: look for a pair of
//! coordinates I and an invariant curve C with V inside the preimage of C.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::curves::{bihomogenize, invariant_curve_check, multidegree, pullback, BIHOM_NAMES};
use crate::classify::{classify_type, MapType, DEFAULT_N_BOUND};
use crate::error::{Error, Result};
use crate::exactnum::rational::rat;
use crate::exactnum::{linalg, MPoly, Rational};
use crate::projdyn::{MapSpec, P1Map};

pub const DEFAULT_SAMPLE_BUDGET: usize = 60;
pub const DEFAULT_PAIR_BIDEGREE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureVerdict {
    /// V lies in the preimage of an invariant curve in two coordinates.
    Pair,
    /// No form cuts V: it is the whole space.
    WholeSpace,
    NoPairWithinBounds,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub verdict: StructureVerdict,
    pub factors: usize,
    pub v_forms: Vec<String>,
    pub v_invariant: bool,
    /// Coordinate pair I (0-based) and the curve C in (X1, Y1, X2, Y2).
    pub pair: Option<[usize; 2]>,
    pub curve: Option<String>,
    pub bidegree: Option<(u32, u32)>,
    pub samples: usize,
    pub bidegree_bound: u32,
    pub seed: u64,
}

fn factors_of(f: &MapSpec) -> Result<&[P1Map]> {
    match f {
        MapSpec::P1xN(v) if v.len() >= 2 => Ok(v),
        _ => Err(Error::Precondition("expected a split map of (P1)^N with N >= 2".into())),
    }
}

fn check_hypothesis(fs: &[P1Map]) -> Result<()> {
    for (i, g) in fs.iter().enumerate() {
        if g.degree() < 2 {
            return Err(Error::HypothesisViolated(format!("factor {i} has degree {}", g.degree())));
        }
        let t = classify_type(&MapSpec::P1(g.clone()), DEFAULT_N_BOUND)?;
        if t.kind != MapType::Nonexceptional {
            return Err(Error::HypothesisViolated(format!("factor {i} is {:?}", t.kind)));
        }
    }
    Ok(())
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-12..=12), rng.gen_range(1..=5))
}

/// Affine points of V in the chart Y_i = 1, solving for one coordinate.
fn sample(p: &MPoly, n: usize, budget: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Rational>> {
    let affine = MPoly::from_terms(n, p.terms().map(|(m, c)| ((0..n).map(|i| m[2 * i]).collect(), c.clone())));
    let Some(j) = (0..n).filter(|&i| affine.degree_in(&[i]) > 0).min_by_key(|&i| affine.degree_in(&[i])) else {
        return vec![];
    };
    let mut out = vec![];
    for _ in 0..50 * budget {
        if out.len() >= budget {
            break;
        }
        let mut x: Vec<Rational> = (0..n).map(|_| small_rational(rng)).collect();
        let u = affine.to_univariate(j, &x);
        if let Some(r) = u.rational_roots().into_iter().next() {
            x[j] = r;
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// The form C in the coordinates of the pair, embedded in all 2N variables.
fn lift(c: &MPoly, n: usize, i: usize, j: usize) -> MPoly {
    MPoly::from_terms(
        2 * n,
        c.terms().map(|(m, k)| {
            let mut e = vec![0; 2 * n];
            e[2 * i] = m[0];
            e[2 * i + 1] = m[1];
            e[2 * j] = m[2];
            e[2 * j + 1] = m[3];
            (e, k.clone())
        }),
    )
}

/// Curves through the projected samples of least bidegree (a, b), a, b <= cap.
fn interpolate(pts: &[(Rational, Rational)], cap: u32) -> Vec<(MPoly, u32, u32)> {
    let mut degs: Vec<(u32, u32)> = (0..=cap).flat_map(|a| (0..=cap).map(move |b| (a, b))).filter(|&(a, b)| a + b > 0).collect();
    degs.sort_by_key(|&(a, b)| (a + b, a));
    for (a, b) in degs {
        let mons: Vec<(u32, u32)> = (0..=a).flat_map(|k| (0..=b).map(move |l| (k, l))).collect();
        if pts.len() <= mons.len() {
            break;
        }
        let rows: Vec<Vec<Rational>> = pts
            .iter()
            .map(|(x, y)| mons.iter().map(|&(k, l)| x.pow(k as i32) * y.pow(l as i32)).collect())
            .collect();
        let ker = linalg::kernel(&rows, mons.len());
        if ker.is_empty() {
            continue;
        }
        return linalg::rref_rows(&ker, mons.len())
            .into_iter()
            .map(|v| {
                let c = MPoly::from_terms(2, mons.iter().zip(v).map(|(&(k, l), c)| (vec![k, l], c)));
                (bihomogenize(&c, a, b).primitive(), a, b)
            })
            .collect();
    }
    vec![]
}

/// `v` holds at most one multihomogeneous form in (X1, Y1, ..., XN, YN).
pub fn split_invariant_structure(
    v: &[MPoly],
    f: &MapSpec,
    budget: usize,
    cap: u32,
    seed: u64,
) -> Result<StructureReport> {
    let fs = factors_of(f)?;
    let n = fs.len();
    check_hypothesis(fs)?;
    let names: Vec<String> = (1..=n).flat_map(|i| [format!("X{i}"), format!("Y{i}")]).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut report = StructureReport {
        verdict: StructureVerdict::WholeSpace,
        factors: n,
        v_forms: v.iter().map(|p| p.display_with(&refs)).collect(),
        v_invariant: true,
        pair: None,
        curve: None,
        bidegree: None,
        samples: 0,
        bidegree_bound: cap,
        seed,
    };
    let p = match v {
        [] => return Ok(report),
        [p] => p,
        _ => return Err(Error::Precondition("V must be cut out by a single form".into())),
    };
    if p.nvars() != 2 * n || p.is_zero() || multidegree(p).is_none() {
        return Err(Error::Precondition("V must be a nonzero multihomogeneous form in 2N variables".into()));
    }
    if pullback(p, fs).div_exact(p).is_none() {
        return Err(Error::Precondition("V is not invariant".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sample(p, n, budget, &mut rng);
    report.samples = pts.len();
    report.verdict = StructureVerdict::NoPairWithinBounds;
    for i in 0..n {
        for j in i + 1..n {
            let proj: Vec<(Rational, Rational)> = pts.iter().map(|x| (x[i].clone(), x[j].clone())).collect();
            for (c, a, b) in interpolate(&proj, cap) {
                if !invariant_curve_check(&c, &fs[i], &fs[j])?.invariant {
                    continue;
                }
                // V inside the preimage of C: the form of V divides the lifted C
                if lift(&c, n, i, j).div_exact(p).is_none() {
                    continue;
                }
                report.verdict = StructureVerdict::Pair;
                report.pair = Some([i, j]);
                report.curve = Some(c.display_with(&BIHOM_NAMES));
                report.bidegree = Some((a, b));
                return Ok(report);
            }
        }
    }
    Ok(report)
}
