//! Multiplier conditions at fixed points: multiplicative independence, good
//! fixed points and the R-property.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::fp::is_prime;
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::{compare_abs, to_joint_field, AlgebraicNumber, Decision, FieldRef};
use crate::padic::places::places_above;
use crate::projdyn::FixedPointData;
use crate::DEFAULT_PRECISION;

pub const DEFAULT_INDEPENDENCE_BOUND: i64 = 24;
/// Primes are extracted from norms by trial division up to this bound.
pub const TRIAL_DIVISION_LIMIT: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Independence {
    /// Valuations at two places give independent linear constraints.
    Independent,
    /// No relation with exponents up to the bound.
    IndependentUpToBound,
    Dependent,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplierPair {
    pub lambda1: String,
    pub lambda2: String,
    /// Minimal polynomial of the joint field generator.
    pub field: String,
    /// (m1, m2) with lambda1^m1 lambda2^m2 = 1, m1 > 0 or m1 = 0 < m2.
    pub relation: Option<(i64, i64)>,
    pub verdict: Independence,
    pub bound: i64,
    /// Primes whose places gave a nontrivial valuation constraint.
    pub pruning_primes: Vec<u64>,
    pub candidates_tested: usize,
}

pub(crate) fn label(a: &AlgebraicNumber) -> String {
    match a.as_rational() {
        Some(r) => rational::to_string(&r),
        None => format!("root of {}", a.minimal_polynomial().monic()),
    }
}

fn small_prime_factors(n: &BigInt, out: &mut Vec<u64>) {
    let mut n = n.abs();
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT && n > BigInt::one() {
        let bp = BigInt::from(p);
        if n.is_multiple_of(&bp) {
            out.push(p);
            while n.is_multiple_of(&bp) {
                n /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() && n <= BigInt::from(u64::MAX) && is_prime(n.to_u64().unwrap()) {
        out.push(n.to_u64().unwrap());
    }
}

/// Primes p at which a can have nonzero valuation: those dividing the leading
/// or constant coefficient of its primitive integral minimal polynomial.
pub fn candidate_primes(a: &AlgebraicNumber) -> Vec<u64> {
    let m = a.minimal_polynomial();
    let den = rational::common_denominator(m.coeffs());
    let c0 = (m.coeff(0) * Rational::from_integer(den.clone())).to_integer();
    let cn = (m.lc() * Rational::from_integer(den)).to_integer();
    let mut out = vec![];
    small_prime_factors(&c0, &mut out);
    small_prime_factors(&cn, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

fn log_moduli(a: &AlgebraicNumber) -> Result<Vec<Option<(f64, f64)>>> {
    Ok(a.complex_values()?
        .into_iter()
        .map(|(z, e)| {
            let r = z.norm();
            (r - e > 0.0).then(|| (r.ln(), e / (r - e)))
        })
        .collect())
}

fn relation_holds(a: &AlgebraicNumber, b: &AlgebraicNumber, m1: i64, m2: i64) -> bool {
    match (a.pow(m1), b.pow(m2)) {
        (Some(x), Some(y)) => (&x * &y).is_one(),
        _ => false,
    }
}

/// Exponent pairs with 0 < max(|m1|, |m2|) <= bound in search order.
fn exponent_pairs(bound: i64) -> impl Iterator<Item = (i64, i64)> {
    (1..=bound).flat_map(|k| {
        let mut v = vec![];
        for m1 in 0..=k {
            for m2 in -k..=k {
                if m1.abs().max(m2.abs()) != k || (m1 == 0 && m2 <= 0) {
                    continue;
                }
                v.push((m1, m2));
            }
        }
        v.into_iter()
    })
}

pub fn multiplicative_independence(l1: &AlgebraicNumber, l2: &AlgebraicNumber, bound: i64) -> Result<MultiplierPair> {
    if l1.is_zero() || l2.is_zero() {
        return Err(Error::Precondition("multipliers must be nonzero".into()));
    }
    let (field, v) = to_joint_field(&[l1.clone(), l2.clone()])?;
    let (a, b) = (&v[0], &v[1]);
    let mut primes = candidate_primes(a);
    primes.extend(candidate_primes(b));
    primes.sort_unstable();
    primes.dedup();
    // valuation constraints m1 v1 + m2 v2 = 0, kept as integer row vectors
    let mut rows: Vec<(BigInt, BigInt)> = vec![];
    let mut pruning_primes = vec![];
    for &p in &primes {
        let Ok(places) = places_above(&field, p, &[a.clone(), b.clone()], DEFAULT_PRECISION) else {
            continue;
        };
        for pl in places {
            let (Some(v1), Some(v2)) = (&pl.valuations[0], &pl.valuations[1]) else { continue };
            if v1.is_zero() && v2.is_zero() {
                continue;
            }
            let d = v1.denom().lcm(v2.denom());
            let r = ((v1 * Rational::from_integer(d.clone())).to_integer(), (v2 * Rational::from_integer(d)).to_integer());
            if !pruning_primes.contains(&p) {
                pruning_primes.push(p);
            }
            rows.push(r);
        }
    }
    let mut report = MultiplierPair {
        lambda1: label(l1),
        lambda2: label(l2),
        field: field.min_poly().to_string(),
        relation: None,
        verdict: Independence::IndependentUpToBound,
        bound,
        pruning_primes,
        candidates_tested: 0,
    };
    if let Some((r0, rest)) = rows.split_first() {
        if rest.iter().any(|r| &r0.0 * &r.1 != &r0.1 * &r.0) {
            report.verdict = Independence::Independent;
            return Ok(report);
        }
    }
    let logs = (log_moduli(a)?, log_moduli(b)?);
    let arch_ok = |m1: i64, m2: i64| {
        logs.0.iter().zip(&logs.1).all(|(x, y)| match (x, y) {
            (Some((la, ea)), Some((lb, eb))) => {
                let (m1, m2) = (m1 as f64, m2 as f64);
                (m1 * la + m2 * lb).abs() <= m1.abs() * ea + m2.abs() * eb + crate::exactnum::DEFAULT_EPS
            }
            _ => true,
        })
    };
    let candidates: Box<dyn Iterator<Item = (i64, i64)>> = match rows.first() {
        // the relation lattice lies on the line orthogonal to (v1, v2)
        Some((x, y)) => {
            let g = x.gcd(y);
            let (mut u1, mut u2) = ((y / &g).to_i64(), (-(x / &g)).to_i64());
            if let (Some(s1), Some(s2)) = (u1, u2) {
                if s1 < 0 || (s1 == 0 && s2 < 0) {
                    (u1, u2) = (Some(-s1), Some(-s2));
                }
            }
            match (u1, u2) {
                (Some(u1), Some(u2)) => {
                    Box::new((1..).map(move |t| (t * u1, t * u2)).take_while(move |&(m1, m2)| m1.abs().max(m2.abs()) <= bound))
                }
                _ => Box::new(std::iter::empty()),
            }
        }
        None => Box::new(exponent_pairs(bound)),
    };
    for (m1, m2) in candidates {
        if !arch_ok(m1, m2) {
            continue;
        }
        report.candidates_tested += 1;
        if relation_holds(a, b, m1, m2) {
            report.relation = Some((m1, m2));
            report.verdict = Independence::Dependent;
            break;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum GoodWitness {
    /// Condition (1): independent multipliers.
    Independent { verdict: Independence, bound: i64 },
    /// Condition (2): a place where both valuations are >= 0 with positive sum.
    Place { prime: u64, e: usize, f: usize, valuations: [String; 2] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GoodVerdict {
    Good,
    UnknownWithinBounds,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodFixedPoint {
    pub verdict: GoodVerdict,
    pub witness: Option<GoodWitness>,
    pub independence: MultiplierPair,
    pub p_max: u64,
}

pub fn good_fixed_point(fp: &FixedPointData, p_max: u64, bound: i64) -> Result<GoodFixedPoint> {
    let [l1, l2] = fp.multipliers.as_slice() else {
        return Err(Error::Precondition("good fixed points need exactly two multipliers".into()));
    };
    good_multipliers(l1, l2, p_max, bound)
}

pub fn good_multipliers(l1: &AlgebraicNumber, l2: &AlgebraicNumber, p_max: u64, bound: i64) -> Result<GoodFixedPoint> {
    if l1.is_zero() || l2.is_zero() {
        return Err(Error::Precondition("tangent map is not invertible".into()));
    }
    let independence = multiplicative_independence(l1, l2, bound)?;
    let mut out = GoodFixedPoint { verdict: GoodVerdict::UnknownWithinBounds, witness: None, independence, p_max };
    if out.independence.verdict != Independence::Dependent {
        out.verdict = GoodVerdict::Good;
        out.witness = Some(GoodWitness::Independent { verdict: out.independence.verdict, bound });
        return Ok(out);
    }
    let (field, v) = to_joint_field(&[l1.clone(), l2.clone()])?;
    for p in 2..=p_max {
        if !is_prime(p) {
            continue;
        }
        let places = places_above(&field, p, &v, DEFAULT_PRECISION)?;
        for pl in places {
            let (Some(v1), Some(v2)) = (&pl.valuations[0], &pl.valuations[1]) else { continue };
            if !v1.is_negative() && !v2.is_negative() && (v1 + v2).is_positive() {
                out.verdict = GoodVerdict::Good;
                out.witness = Some(GoodWitness::Place {
                    prime: p,
                    e: pl.e,
                    f: pl.f,
                    valuations: [rational::to_string(v1), rational::to_string(v2)],
                });
                return Ok(out);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RPoint {
    pub index: usize,
    /// Multiplier moduli with error bounds at the chosen embedding.
    pub moduli: Vec<(f64, f64)>,
    /// None when a modulus is within the margin of 1 + eps.
    pub verdict: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RProperty {
    /// None when no point is true and some point is indeterminate.
    pub verdict: Option<bool>,
    pub eps: f64,
    pub points: Vec<RPoint>,
}

fn factor_field(coords: &[AlgebraicNumber]) -> FieldRef {
    coords
        .iter()
        .map(|c| c.field())
        .find(|k| !k.is_rationals())
        .cloned()
        .unwrap_or_else(|| coords[0].field().clone())
}

fn decide(moduli: &[(f64, f64)], eps: f64) -> Option<bool> {
    let ds: Vec<Decision> = moduli.iter().map(|&(v, e)| compare_abs(v, e, 1.0, eps)).collect();
    if ds.iter().all(|d| *d == Decision::Above) {
        Some(true)
    } else if ds.iter().any(|d| *d == Decision::Below) {
        Some(false)
    } else {
        None
    }
}

/// Whether some fixed point has all multiplier moduli > 1 + eps.
pub fn r_property(fps: &[FixedPointData], eps: f64) -> Result<RProperty> {
    let mut points = vec![];
    for (index, fp) in fps.iter().enumerate() {
        let factors = fp.point.factors();
        let fields: Vec<FieldRef> = factors.iter().map(|c| factor_field(c)).collect();
        let n = fp.multipliers.len();
        // multiplier i is read in the field of factor i (split maps) or of the point
        let pinned: Option<Vec<(f64, f64)>> = fp
            .multipliers
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let j = if fields.len() == n { i } else { 0 };
                let k = fields.get(j)?;
                if m.field().is_rationals() {
                    m.complex_value(0).ok()
                } else if crate::exactnum::NumberField::same(m.field(), k) {
                    m.complex_value(*fp.embeddings.get(j)?).ok()
                } else {
                    None
                }
                .map(|(z, e)| (z.norm(), e))
            })
            .collect();
        let point = match pinned {
            Some(moduli) => RPoint { index, verdict: decide(&moduli, eps), moduli },
            None => {
                // multipliers generate a larger field: try every embedding of it
                let (_, v) = to_joint_field(&fp.multipliers)?;
                let per: Vec<Vec<(f64, f64)>> = v
                    .iter()
                    .map(|m| m.complex_values().map(|zs| zs.into_iter().map(|(z, e)| (z.norm(), e)).collect()))
                    .collect::<Result<_>>()?;
                let emb = per[0].len();
                let mut best = RPoint { index, moduli: vec![], verdict: Some(false) };
                for k in 0..emb {
                    let moduli: Vec<(f64, f64)> = per.iter().map(|p| p[k]).collect();
                    let d = decide(&moduli, eps);
                    if d == Some(true) || (d.is_none() && best.verdict == Some(false)) || best.moduli.is_empty() {
                        best = RPoint { index, moduli, verdict: d };
                    }
                    if d == Some(true) {
                        break;
                    }
                }
                best
            }
        };
        points.push(point);
    }
    let verdict = if points.iter().any(|p| p.verdict == Some(true)) {
        Some(true)
    } else if points.iter().any(|p| p.verdict.is_none()) {
        None
    } else {
        Some(false)
    };
    Ok(RProperty { verdict, eps, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::primitive::field_of_root;
    use crate::exactnum::{generator, Poly};
    use crate::projdyn::{fixed_points, MapSpec, P1Map};

    fn q(n: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_int(n)
    }

    fn sqrt2() -> AlgebraicNumber {
        generator(&field_of_root(&Poly::from_ints(&[-2, 0, 1]), "s"))
    }

    #[test]
    fn independence_examples() {
        let r = multiplicative_independence(&q(2), &q(3), 20).unwrap();
        assert_eq!(r.verdict, Independence::Independent);
        assert_eq!(r.candidates_tested, 0);
        let r = multiplicative_independence(&q(2), &q(4), 24).unwrap();
        assert_eq!(r.relation, Some((2, -1)));
        let r = multiplicative_independence(&sqrt2(), &q(2), 24).unwrap();
        assert_eq!(r.relation, Some((2, -1)));
        let r = multiplicative_independence(&q(1), &q(1), 24).unwrap();
        assert_eq!(r.relation, Some((0, 1)));
        let r = multiplicative_independence(&q(-1), &q(1), 24).unwrap();
        assert_eq!(r.relation, Some((0, 1)));
    }

    #[test]
    fn units_use_archimedean_pruning() {
        // 1 + sqrt2 and 3 + 2 sqrt2 = (1 + sqrt2)^2
        let u = &sqrt2() + &q(1);
        let r = multiplicative_independence(&u, &(&u * &u), 24).unwrap();
        assert_eq!(r.relation, Some((2, -1)));
        assert!(r.candidates_tested < 20);
        let r = multiplicative_independence(&u, &q(2), 10).unwrap();
        assert_ne!(r.verdict, Independence::Dependent);
    }

    #[test]
    fn good_fixed_point_examples() {
        let g = good_multipliers(&q(2), &q(4), 50, 24).unwrap();
        assert_eq!(g.verdict, GoodVerdict::Good);
        match g.witness.unwrap() {
            GoodWitness::Place { prime, valuations, .. } => {
                assert_eq!(prime, 2);
                assert_eq!(valuations, ["1".to_string(), "2".to_string()]);
            }
            w => panic!("{w:?}"),
        }
        let g = good_multipliers(&q(2), &q(3), 50, 24).unwrap();
        assert!(matches!(g.witness, Some(GoodWitness::Independent { .. })));
        let g = good_multipliers(&q(1), &q(1), 50, 24).unwrap();
        assert_eq!(g.verdict, GoodVerdict::UnknownWithinBounds);
        assert!(good_multipliers(&q(0), &q(1), 50, 24).is_err());
    }

    #[test]
    fn r_property_on_split_squares() {
        let sq = P1Map::polynomial(&Poly::from_ints(&[0, 0, 1])).unwrap();
        let f = MapSpec::split(vec![sq.clone(), sq]).unwrap();
        let fps = fixed_points(&f).unwrap();
        let r = r_property(&fps, 1e-9).unwrap();
        assert_eq!(r.verdict, Some(true));
        // only (1,1) has both multipliers equal to 2
        assert_eq!(r.points.iter().filter(|p| p.verdict == Some(true)).count(), 1);
        assert!(r.points.iter().all(|p| p.verdict.is_some()));
    }

    #[test]
    fn r_property_basilica_pair() {
        // fixed points of x^2 - 1 are (1 +- sqrt5)/2 with multipliers 1 +- sqrt5
        let b = P1Map::polynomial(&Poly::from_ints(&[-1, 0, 1])).unwrap();
        let f = MapSpec::split(vec![b.clone(), b]).unwrap();
        let fps = fixed_points(&f).unwrap();
        let r = r_property(&fps, 1e-9).unwrap();
        assert_eq!(r.verdict, Some(true));
        let mut mods: Vec<f64> = r.points.iter().flat_map(|p| p.moduli.iter().map(|m| m.0)).collect();
        mods.sort_by(f64::total_cmp);
        mods.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        // infinity is superattracting
        let expect = [0.0, 5f64.sqrt() - 1.0, 1.0 + 5f64.sqrt()];
        assert!(mods.iter().all(|m| expect.iter().any(|e| (m - e).abs() < 1e-9)));
    }
}
