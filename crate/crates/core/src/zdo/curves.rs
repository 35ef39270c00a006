//! Invariant curves of split maps (f1, f2) of P^1 x P^1.
//!
//! Curves are bihomogeneous forms in (X1, Y1, X2, Y2) with x = X1/Y1 and
//! y = X2/Y2. The search follows formal invariant branches through pairs of
//! fixed points, finds the lowest polynomial vanishing on each branch modulo a
//! large prime, and certifies every candidate exactly by division.

use num_traits::{One, Zero};
use serde::Serialize;

use super::modq::{self, reduce_poly, series_div, series_mul, taylor_shift};
use crate::error::{Error, Result};
use crate::exactnum::fp::{Fp, FpPoly};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::{MPoly, Poly};
use crate::projdyn::P1Map;

pub const BIHOM_NAMES: [&str; 4] = ["X1", "Y1", "X2", "Y2"];
pub const DEFAULT_BIDEGREE_CAP: u32 = 6;
/// Candidate primes tried when looking for one that splits all fixed points.
const PRIME_TRIES: usize = 400;
/// Cap on the number of formal branches followed per fixed-point pair.
const BRANCH_CAP: usize = 400;

/// F(X, Y) = Y^d f(X/Y) as forms in variables (x, y) of an n-variable ring.
pub fn hom_forms(f: &P1Map, x: usize, y: usize, n: usize) -> [MPoly; 2] {
    let d = f.degree() as u32;
    let form = |p: &Poly| {
        MPoly::from_terms(
            n,
            (0..=d).map(|k| {
                let mut e = vec![0; n];
                e[x] = k;
                e[y] = d - k;
                (e, p.coeff(k as usize))
            }),
        )
    };
    [form(f.num()), form(f.den())]
}

/// P(F1(X1, Y1), F2(X1, Y1), ..., for every factor).
pub fn pullback(p: &MPoly, maps: &[P1Map]) -> MPoly {
    let n = 2 * maps.len();
    assert_eq!(p.nvars(), n);
    let subs: Vec<MPoly> = maps.iter().enumerate().flat_map(|(i, m)| hom_forms(m, 2 * i, 2 * i + 1, n)).collect();
    p.substitute(&subs)
}

/// Multidegree of a multihomogeneous form in N pairs of variables.
pub fn multidegree(p: &MPoly) -> Option<Vec<u32>> {
    let n = p.nvars() / 2;
    let mut deg: Option<Vec<u32>> = None;
    for (m, _) in p.terms() {
        let d: Vec<u32> = (0..n).map(|i| m[2 * i] + m[2 * i + 1]).collect();
        match &deg {
            None => deg = Some(d),
            Some(e) if *e != d => return None,
            _ => {}
        }
    }
    deg
}

/// Affine polynomial in (x, y) of degree (a, b) to a form of bidegree (a, b).
pub fn bihomogenize(p: &MPoly, a: u32, b: u32) -> MPoly {
    MPoly::from_terms(4, p.terms().map(|(m, c)| (vec![m[0], a - m[0], m[1], b - m[1]], c.clone())))
}

/// Form in (X1, Y1, X2, Y2) to the affine chart Y1 = Y2 = 1.
pub fn dehomogenize(p: &MPoly) -> MPoly {
    MPoly::from_terms(2, p.terms().map(|(m, c)| (vec![m[0], m[2]], c.clone())))
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveCheck {
    pub invariant: bool,
    pub bidegree: (u32, u32),
    pub cofactor: Option<String>,
    #[serde(skip)]
    pub cofactor_poly: Option<MPoly>,
}

/// P o (f1 x f2) divisible by P.
pub fn invariant_curve_check(p: &MPoly, f1: &P1Map, f2: &P1Map) -> Result<CurveCheck> {
    if p.is_zero() || p.nvars() != 4 {
        return Err(Error::Precondition("expected a nonzero form in X1, Y1, X2, Y2".into()));
    }
    let deg = multidegree(p).ok_or_else(|| Error::Precondition("the form is not bihomogeneous".into()))?;
    let q = pullback(p, &[f1.clone(), f2.clone()]);
    let cof = q.div_exact(p);
    Ok(CurveCheck {
        invariant: cof.is_some(),
        bidegree: (deg[0], deg[1]),
        cofactor: cof.as_ref().map(|c| c.display_with(&BIHOM_NAMES)),
        cofactor_poly: cof,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FoundCurve {
    pub form: String,
    pub affine: String,
    pub bidegree: (u32, u32),
    /// Degree of the map induced on the curve.
    pub restricted_degree: usize,
    pub restricted_degree_in_range: bool,
    /// Multiplicity of the curve at each rational fixed point on it.
    pub fixed_point_multiplicities: Vec<(String, u32)>,
    pub multiplicity_bound: u32,
    #[serde(skip)]
    pub poly: MPoly,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveSearch {
    pub a_max: u32,
    pub b_max: u32,
    pub prime: u64,
    /// All fixed points of both factors were visible modulo the prime.
    pub complete_split: bool,
    pub rows: usize,
    pub branches_followed: usize,
    pub curves: Vec<FoundCurve>,
}

/// floor(d + 2 sqrt(d) + 1) + 1
pub fn branch_bound(d: usize) -> u32 {
    let mut s = 0u64;
    while (s + 1) * (s + 1) <= 4 * d as u64 {
        s += 1;
    }
    // floor(2 sqrt d) = floor(sqrt(4 d))
    (d as u64 + s + 1 + 1) as u32
}

struct ModMap {
    num: FpPoly,
    den: FpPoly,
}

fn mod_map(fp: &Fp, f: &P1Map) -> Option<ModMap> {
    let num = reduce_poly(fp, f.num())?;
    let den = reduce_poly(fp, f.den())?;
    let d = f.degree() as i64;
    (fp.deg(&num).max(fp.deg(&den)) == d).then_some(ModMap { num, den })
}

fn fixed_poly(f: &P1Map) -> Poly {
    let fix = f.num() - &(&Poly::x() * f.den());
    let g = fix.gcd(&fix.derivative());
    fix.div_exact(&g).unwrap()
}

/// A prime modulo which both squarefree fixed-point polynomials split into
/// distinct linear factors, falling back to the one seeing the most roots.
fn choose_prime(f1: &P1Map, f2: &P1Map) -> (u64, bool) {
    let fx = [fixed_poly(f1), fixed_poly(f2)];
    let want: usize = fx.iter().map(|p| p.degree().unwrap_or(0)).sum();
    let mut best = (0, 0usize);
    for q in modq::search_primes().take(PRIME_TRIES) {
        let fp = Fp::new(q);
        if mod_map(&fp, f1).is_none() || mod_map(&fp, f2).is_none() {
            continue;
        }
        let mut got = 0;
        for p in &fx {
            if let Some(r) = reduce_poly(&fp, p) {
                if fp.deg(&r) == p.deg() {
                    got += fp.roots(&r).len();
                }
            }
        }
        if got == want {
            return (q, true);
        }
        if got > best.1 || best.0 == 0 {
            best = (q, got);
        }
    }
    (best.0, false)
}

struct BranchSetup<'a> {
    fp: Fp,
    o2: u64,
    lam1: u64,
    /// powers of F1(z) = f1(o1 + z) - o1, truncated
    f1_pow: Vec<Vec<u64>>,
    g: Vec<u64>,
    h: Vec<u64>,
    n: usize,
    candidates: &'a [u64],
}

enum Outcome {
    Series(Vec<u64>),
    Free,
    Obstructed,
}

impl BranchSetup<'_> {
    /// Formal solution y = o2 + phi(z) of phi(F1(z)) = F2(phi(z)) with the
    /// free coefficients taken from `choices` in order.
    fn solve(&self, choices: &[u64]) -> Outcome {
        let fp = &self.fp;
        let n = self.n;
        let dmax = self.g.len().max(self.h.len()).max(2) - 1;
        let mut c = vec![0u64; n];
        let mut pw = vec![vec![0u64; n]; dmax + 1];
        pw[0][0] = 1;
        let mut a = vec![0u64; n];
        let mut b = vec![0u64; n];
        b[0] = self.h[0];
        let gj = |j: usize| self.g.get(j).copied().unwrap_or(0);
        let hj = |j: usize| self.h.get(j).copied().unwrap_or(0);
        let mut used = 0;
        let mut lam_n = 1u64;
        for k in 1..n {
            lam_n = fp.mul(lam_n, self.lam1);
            for j in 2..=dmax {
                let mut s = 0;
                for i in 1..k {
                    s = fp.add(s, fp.mul(c[i], pw[j - 1][k - i]));
                }
                pw[j][k] = s;
            }
            let mut g_k = 0;
            let mut h_k = 0;
            for j in 2..=dmax {
                g_k = fp.add(g_k, fp.mul(gj(j), pw[j][k]));
                h_k = fp.add(h_k, fp.mul(hj(j), pw[j][k]));
            }
            b[k] = h_k;
            let mut a_k = 0;
            for i in 1..k {
                a_k = fp.add(a_k, fp.mul(c[i], self.f1_pow[i][k]));
            }
            a[k] = a_k;
            let mut prod = 0;
            for m in 1..=k {
                prod = fp.add(prod, fp.mul(a[m], b[k - m]));
            }
            let r = fp.sub(g_k, fp.add(fp.mul(self.o2, b[k]), prod));
            let coef = fp.sub(fp.sub(gj(1), fp.mul(self.o2, hj(1))), fp.mul(lam_n, self.h[0]));
            let ck = if coef != 0 {
                fp.neg(fp.mul(r, fp.inv(coef)))
            } else if r == 0 {
                match choices.get(used) {
                    Some(&v) => {
                        used += 1;
                        v
                    }
                    None => return Outcome::Free,
                }
            } else {
                return Outcome::Obstructed;
            };
            c[k] = ck;
            pw[1][k] = ck;
            b[k] = fp.add(b[k], fp.mul(hj(1), ck));
            a[k] = fp.add(a[k], fp.mul(ck, self.f1_pow[k][k]));
        }
        Outcome::Series(c)
    }

    fn branches(&self) -> Vec<Vec<u64>> {
        let mut out = vec![];
        let mut stack: Vec<Vec<u64>> = vec![vec![]];
        while let Some(ch) = stack.pop() {
            if out.len() >= BRANCH_CAP {
                break;
            }
            match self.solve(&ch) {
                Outcome::Series(s) => out.push(s),
                Outcome::Obstructed => {}
                Outcome::Free if ch.len() < 2 => {
                    for &v in self.candidates.iter().rev() {
                        let mut next = ch.clone();
                        next.push(v);
                        stack.push(next);
                    }
                }
                Outcome::Free => {}
            }
        }
        out
    }
}

/// Lowest-grlex polynomial in (x, y) with deg_x <= a_max, deg_y <= b_max
/// vanishing on (o1 + z, o2 + phi(z)) to order n, modulo q.
fn branch_relation(fp: &Fp, o1: u64, o2: u64, phi: &[u64], a_max: u32, b_max: u32) -> Option<Vec<(u32, u32, u64)>> {
    let n = phi.len();
    let mut xs: Vec<Vec<u64>> = vec![vec![1]];
    for _ in 0..a_max {
        let last = xs.last().unwrap();
        xs.push(series_mul(fp, last, &[o1, 1], n));
    }
    let mut y1 = phi.to_vec();
    y1[0] = fp.add(y1[0], o2);
    let mut ys: Vec<Vec<u64>> = vec![{
        let mut one = vec![0; n];
        one[0] = 1;
        one
    }];
    for _ in 0..b_max {
        let last = ys.last().unwrap();
        ys.push(series_mul(fp, last, &y1, n));
    }
    let mut mons: Vec<(u32, u32)> = (0..=a_max).flat_map(|s| (0..=b_max).map(move |t| (s, t))).collect();
    mons.sort_by_key(|&(s, t)| (s + t, s));
    let cols = mons.len();
    // reduced columns with pivot row and combination of original columns
    let mut basis: Vec<(Vec<u64>, usize, Vec<u64>)> = vec![];
    for (idx, &(s, t)) in mons.iter().enumerate() {
        let mut v = series_mul(fp, &xs[s as usize], &ys[t as usize], n);
        let mut combo = vec![0u64; cols];
        combo[idx] = 1;
        for (bv, piv, bc) in &basis {
            if v[*piv] != 0 {
                let k = fp.mul(v[*piv], fp.inv(bv[*piv]));
                for i in 0..n {
                    v[i] = fp.sub(v[i], fp.mul(k, bv[i]));
                }
                for i in 0..cols {
                    combo[i] = fp.sub(combo[i], fp.mul(k, bc[i]));
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            Some(piv) => basis.push((v, piv, combo)),
            None => {
                return Some(
                    mons.iter().zip(combo).filter(|(_, c)| *c != 0).map(|(&(s, t), c)| (s, t, c)).collect(),
                );
            }
        }
    }
    None
}

fn multiplicity_at(p: &MPoly, o: (&Rational, &Rational)) -> Option<u32> {
    let subs = [
        MPoly::var(2, 0).add(&MPoly::constant(2, o.0.clone())),
        MPoly::var(2, 1).add(&MPoly::constant(2, o.1.clone())),
    ];
    let q = p.substitute(&subs);
    q.terms().map(|(m, _)| m[0] + m[1]).min().filter(|&m| m > 0)
}

fn rational_fixed_points(f: &P1Map) -> Vec<Rational> {
    fixed_poly(f).rational_roots()
}

fn describe(p: &MPoly, f1: &P1Map, f2: &P1Map, a: u32, b: u32) -> FoundCurve {
    let affine = dehomogenize(p);
    let d_f = f1.degree().max(f2.degree());
    // x-projection has degree b on the curve unless the curve is a vertical fiber
    let restricted = if b >= 1 { f1.degree() } else { f2.degree() };
    let mut mults = vec![];
    for x in rational_fixed_points(f1) {
        for y in rational_fixed_points(f2) {
            if affine.eval(&[x.clone(), y.clone()]).is_zero() {
                if let Some(m) = multiplicity_at(&affine, (&x, &y)) {
                    mults.push((format!("({}, {})", rational::to_string(&x), rational::to_string(&y)), m));
                }
            }
        }
    }
    FoundCurve {
        form: p.display_with(&BIHOM_NAMES),
        affine: affine.display_with(&["x", "y"]),
        bidegree: (a, b),
        restricted_degree: restricted,
        restricted_degree_in_range: (2..=d_f).contains(&restricted),
        fixed_point_multiplicities: mults,
        multiplicity_bound: branch_bound(d_f),
        poly: p.clone(),
    }
}

fn canonical(p: &MPoly) -> MPoly {
    let q = p.primitive();
    let lead_neg = q.terms().last().is_some_and(|(_, c)| c < &Rational::zero());
    if lead_neg {
        q.scale(&-Rational::one())
    } else {
        q
    }
}

/// Candidates for free branch coefficients: 0, +-k, +-1/k and +-lambda^(+-j).
fn candidate_values(fp: &Fp, lam: u64, k_max: u32) -> Vec<u64> {
    let mut v = vec![0u64];
    for k in 1..=k_max as u64 {
        let kk = k % fp.p;
        v.extend([kk, fp.neg(kk), fp.inv(kk), fp.neg(fp.inv(kk))]);
    }
    if lam != 0 {
        let inv = fp.inv(lam);
        let (mut a, mut b) = (1, 1);
        for _ in 0..k_max {
            a = fp.mul(a, lam);
            b = fp.mul(b, inv);
            v.extend([a, fp.neg(a), b, fp.neg(b)]);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    v.retain(|x| seen.insert(*x));
    v
}

/// Relations found from branches of (g1, g2), as affine polynomials in (u, v)
/// where u is the coordinate of g1.
fn oriented_search(
    fp: &Fp,
    g1: &P1Map,
    g2: &P1Map,
    u_max: u32,
    v_max: u32,
    rows: usize,
    followed: &mut usize,
) -> Vec<MPoly> {
    let q = fp.p;
    let (Some(m1), Some(m2)) = (mod_map(fp, g1), mod_map(fp, g2)) else { return vec![] };
    let roots = |f: &P1Map| reduce_poly(fp, &fixed_poly(f)).map(|r| fp.roots(&r)).unwrap_or_default();
    let k_max = u_max.max(v_max);
    let mut out = vec![];
    for o1 in roots(g1) {
        let den1 = taylor_shift(fp, &m1.den, o1);
        if den1.first().copied().unwrap_or(0) == 0 {
            continue;
        }
        let mut f1s = series_div(fp, &taylor_shift(fp, &m1.num, o1), &den1, rows);
        f1s[0] = fp.sub(f1s[0], o1);
        let mut f1_pow = vec![{
            let mut one = vec![0u64; rows];
            one[0] = 1;
            one
        }];
        for _ in 1..rows {
            let last = f1_pow.last().unwrap();
            f1_pow.push(series_mul(fp, last, &f1s, rows));
        }
        let lam1 = f1s.get(1).copied().unwrap_or(0);
        for o2 in roots(g2) {
            let g = taylor_shift(fp, &m2.num, o2);
            let h = taylor_shift(fp, &m2.den, o2);
            if h.first().copied().unwrap_or(0) == 0 {
                continue;
            }
            let h0 = h[0];
            let lam2 = fp.mul(
                fp.sub(g.get(1).copied().unwrap_or(0), fp.mul(o2, h.get(1).copied().unwrap_or(0))),
                fp.inv(h0),
            );
            if lam1 == 0 && lam2 == 0 {
                continue;
            }
            let cands = candidate_values(fp, lam1, k_max);
            let setup = BranchSetup { fp: *fp, o2, lam1, f1_pow: f1_pow.clone(), g, h, n: rows, candidates: &cands };
            for phi in setup.branches() {
                *followed += 1;
                let Some(rel) = branch_relation(fp, o1, o2, &phi, u_max, v_max) else { continue };
                let coeffs: Option<Vec<(Vec<u32>, Rational)>> = rel
                    .iter()
                    .map(|&(s, t, c)| modq::rational_reconstruct(c, q).map(|r| (vec![s, t], r)))
                    .collect();
                if let Some(terms) = coeffs {
                    out.push(MPoly::from_terms(2, terms));
                }
            }
        }
    }
    out
}

pub fn invariant_curve_search(f1: &P1Map, f2: &P1Map, a_max: u32, b_max: u32) -> Result<CurveSearch> {
    if f1.degree() < 2 || f2.degree() < 2 {
        return Err(Error::Precondition("both factors need degree at least 2".into()));
    }
    let (q, complete) = choose_prime(f1, f2);
    let fp = Fp::new(q);
    let cols = ((a_max + 1) * (b_max + 1)) as usize;
    let rows = (cols + 8).max((2 * a_max * b_max + 1) as usize);
    let mut followed = 0;
    let mut cands: Vec<MPoly> = oriented_search(&fp, f1, f2, a_max, b_max, rows, &mut followed);
    let swap = |p: &MPoly| MPoly::from_terms(2, p.terms().map(|(m, c)| (vec![m[1], m[0]], c.clone())));
    cands.extend(oriented_search(&fp, f2, f1, b_max, a_max, rows, &mut followed).iter().map(swap));
    let mut found: Vec<FoundCurve> = vec![];
    for c in cands {
        let (a, b) = (c.degree_in(&[0]), c.degree_in(&[1]));
        if a == 0 || b == 0 {
            continue;
        }
        let form = canonical(&bihomogenize(&c, a, b));
        if found.iter().any(|f| f.poly == form) {
            continue;
        }
        if invariant_curve_check(&form, f1, f2)?.invariant {
            found.push(describe(&form, f1, f2, a, b));
        }
    }
    found.sort_by(|x, y| {
        (x.bidegree.0 + x.bidegree.1, x.bidegree).cmp(&(y.bidegree.0 + y.bidegree.1, y.bidegree)).then_with(|| x.form.cmp(&y.form))
    });
    Ok(CurveSearch { a_max, b_max, prime: q, complete_split: complete, rows, branches_followed: followed, curves: found })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(c: &[i64]) -> P1Map {
        P1Map::polynomial(&Poly::from_ints(c)).unwrap()
    }

    fn form(s: &str) -> MPoly {
        MPoly::parse(s, &BIHOM_NAMES).unwrap()
    }

    #[test]
    fn check_examples() {
        let g = pm(&[-1, 0, 1]);
        let diag = form("X1*Y2 - Y1*X2");
        let c = invariant_curve_check(&diag, &g, &g).unwrap();
        assert!(c.invariant);
        assert_eq!(multidegree(c.cofactor_poly.as_ref().unwrap()), Some(vec![1, 1]));
        // y - x^2 under (x^2, y^2): y^2 - x^4 = (y - x^2)(y + x^2)
        let sq = pm(&[0, 0, 1]);
        let par = bihomogenize(&MPoly::parse("y - x^2", &["x", "y"]).unwrap(), 2, 1);
        let c = invariant_curve_check(&par, &sq, &sq).unwrap();
        assert!(c.invariant);
        assert_eq!(dehomogenize(c.cofactor_poly.as_ref().unwrap()), MPoly::parse("y + x^2", &["x", "y"]).unwrap());
        let line = bihomogenize(&MPoly::parse("y - x", &["x", "y"]).unwrap(), 1, 1);
        assert!(!invariant_curve_check(&line, &sq, &pm(&[1, 0, 1])).unwrap().invariant);
        assert!(invariant_curve_check(&form("X1*Y2^2 - X2"), &sq, &sq).is_err());
    }

    #[test]
    fn bound_formula() {
        // d = 4: 4 + 4 + 1 = 9, plus one
        assert_eq!(branch_bound(4), 10);
        assert_eq!(branch_bound(2), 6);
    }

    #[test]
    fn diagonal_for_squares() {
        let sq = pm(&[0, 0, 1]);
        let s = invariant_curve_search(&sq, &sq, 1, 1).unwrap();
        let diag = canonical(&form("X1*Y2 - Y1*X2"));
        assert!(s.curves.iter().any(|c| c.poly == diag), "{:?}", s.curves);
    }

    #[test]
    fn basilica_curves() {
        let g = pm(&[-1, 0, 1]);
        let s = invariant_curve_search(&g, &g, 2, 2).unwrap();
        let names = ["x", "y"];
        let expect = ["x - y", "y - x^2 + 1", "x - y^2 + 1"];
        for e in expect {
            let p = canonical(&bihomogenize(
                &MPoly::parse(e, &names).unwrap(),
                MPoly::parse(e, &names).unwrap().degree_in(&[0]),
                MPoly::parse(e, &names).unwrap().degree_in(&[1]),
            ));
            assert!(s.curves.iter().any(|c| c.poly == p), "missing {e}: {:?}", s.curves);
        }
        for c in &s.curves {
            assert!(invariant_curve_check(&c.poly, &g, &g).unwrap().invariant);
            assert!(c.restricted_degree_in_range);
            for (_, m) in &c.fixed_point_multiplicities {
                assert!(*m <= c.multiplicity_bound);
            }
        }
    }
}
