//! Primitive elements, relative extensions and joint fields.

use super::factor::factor_poly_q;
use super::field::{generator, AlgebraicNumber, FieldRef, NumberField};
use super::linalg;
use super::nfpoly::NfPoly;
use super::poly::Poly;
use super::rational::{self, Rational};
use super::resultant::{interpolate_resultant, resultant_univariate};
use super::roots::certified_roots;
use crate::error::{Error, Result};

/// Largest shift tried in a + k b.
pub const K_MAX: i64 = 32;

/// A field homomorphism K -> L given by the image of K's generator.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    pub source: FieldRef,
    pub target: FieldRef,
    pub gen_image: AlgebraicNumber,
}

impl FieldEmbedding {
    pub fn identity(k: &FieldRef) -> Self {
        FieldEmbedding { source: k.clone(), target: k.clone(), gen_image: generator(k) }
    }

    pub fn apply(&self, a: &AlgebraicNumber) -> AlgebraicNumber {
        if let Some(r) = a.as_rational() {
            return AlgebraicNumber::rational(&self.target, r);
        }
        assert!(NumberField::same(a.field(), &self.source), "element outside embedding source");
        let mut acc = AlgebraicNumber::zero_in(&self.target);
        for c in a.coords().iter().rev() {
            acc = &(&acc * &self.gen_image) + &AlgebraicNumber::rational(&self.target, c.clone());
        }
        acc
    }

    /// self followed by `next`
    pub fn then(&self, next: &FieldEmbedding) -> FieldEmbedding {
        FieldEmbedding {
            source: self.source.clone(),
            target: next.target.clone(),
            gen_image: next.apply(&self.gen_image),
        }
    }
}

/// Field generated by a root of an irreducible rational polynomial.
pub fn field_of_root(h: &Poly, name: &str) -> FieldRef {
    if h.degree() == Some(1) {
        return NumberField::rationals();
    }
    NumberField::new_unchecked(h.monic(), name)
}

/// sum_i c_i(t) (x0 - k t)^i as a polynomial in t, for g with coefficients
/// given as polynomials in the generator t.
fn shifted_in_t(g: &NfPoly, x0: &Rational, k: i64) -> Poly {
    let lin = Poly::new(vec![x0.clone(), rational::int(-k)]);
    let mut acc = Poly::zero();
    for c in g.coeffs().iter().rev() {
        acc = &(&acc * &lin) + &c.to_poly();
    }
    acc
}

/// Norm of g(x - k θ) down to Q: Res_t(m(t), g(x - k t, t)).
fn shifted_norm(g: &NfPoly, k: i64) -> Poly {
    let m = g.field().min_poly().clone();
    let bound = m.degree().unwrap() * g.degree().unwrap_or(0);
    interpolate_resultant(bound, |x0| Some(resultant_univariate(&m, &shifted_in_t(g, x0, k))))
}

/// Express `gamma` (generator of L) in the power basis of `theta` when
/// Q(theta) = L. Returns the coordinate vector.
fn coords_over(theta: &AlgebraicNumber, target: &AlgebraicNumber) -> Option<Vec<Rational>> {
    let n = theta.field().degree();
    let mut cols = vec![];
    let mut pw = AlgebraicNumber::one_in(theta.field());
    for _ in 0..n {
        cols.push(pw.coords().to_vec());
        pw = &pw * theta;
    }
    let rows: Vec<Vec<Rational>> = (0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    linalg::solve(&rows, target.coords(), n)
}

/// Polynomial over L in t: G(γ - k t, t) where G has coefficients in K = Q(t).
fn substituted(g: &NfPoly, l: &FieldRef, gamma: &AlgebraicNumber, k: i64) -> NfPoly {
    let lin = NfPoly::new(l, vec![gamma.clone(), AlgebraicNumber::from_int(-k)]);
    let mut acc = NfPoly::zero(l);
    for c in g.coeffs().iter().rev() {
        let ct = NfPoly::from_q(l, &c.to_poly());
        acc = acc.mul(&lin).add(&ct);
    }
    acc
}

/// Adjoin one root of g (a polynomial over K) to K. Returns L, the embedding
/// K -> L and the chosen root in L. When g has a root in K, L = K.
pub fn adjoin_root(g: &NfPoly) -> Result<(FieldRef, FieldEmbedding, AlgebraicNumber)> {
    let kf = g.field().clone();
    let deg = g.degree().ok_or_else(|| Error::Precondition("adjoin_root of zero polynomial".into()))?;
    if deg == 0 {
        return Err(Error::Precondition("adjoin_root of a constant".into()));
    }
    let n = kf.degree();
    if n == 1 {
        let q = Poly::new(g.coeffs().iter().map(|c| c.as_rational().unwrap()).collect());
        let h = lowest_factor(&q);
        let l = field_of_root(&h, "b");
        let beta = if h.degree() == Some(1) {
            AlgebraicNumber::rational(&l, -h.coeff(0))
        } else {
            generator(&l)
        };
        let emb = FieldEmbedding { source: kf, target: l.clone(), gen_image: AlgebraicNumber::zero_in(&l) };
        return Ok((l, emb, beta));
    }
    for k in 0..=K_MAX {
        let nk = shifted_norm(g, k);
        if !nk.is_squarefree() {
            continue;
        }
        let h = lowest_factor(&nk);
        let l = field_of_root(&h, "b");
        let gamma = if h.degree() == Some(1) {
            AlgebraicNumber::rational(&l, -h.coeff(0))
        } else {
            generator(&l)
        };
        let mt = NfPoly::from_q(&l, kf.min_poly());
        let gg = mt.gcd(&substituted(g, &l, &gamma, k));
        if gg.degree() != Some(1) {
            continue;
        }
        let theta_l = -gg.coeff(0);
        let beta_l = &gamma - &(&AlgebraicNumber::from_int(k) * &theta_l);
        if l.degree() == n {
            // root lies in K: pull it back through the isomorphism L -> K
            let c = coords_over(&theta_l, &beta_l)
                .ok_or_else(|| Error::Resolution("isomorphism recovery failed".into()))?;
            let beta = AlgebraicNumber::from_coords(&kf, c);
            return Ok((kf.clone(), FieldEmbedding::identity(&kf), beta));
        }
        let emb = FieldEmbedding { source: kf.clone(), target: l.clone(), gen_image: theta_l };
        return Ok((l, emb, beta_l));
    }
    Err(Error::Resolution(format!("no shift k <= {K_MAX} gives a squarefree norm")))
}

/// Irreducible factor of least degree, ties broken by coefficients.
fn lowest_factor(p: &Poly) -> Poly {
    factor_poly_q(p).into_iter().next().expect("nonconstant polynomial").0
}

/// All roots of g that lie in its coefficient field, sorted by coordinates.
pub fn roots_in_field(g: &NfPoly) -> Vec<AlgebraicNumber> {
    let kf = g.field().clone();
    let mut out: Vec<AlgebraicNumber> = vec![];
    let mut rest = g.monic();
    while rest.degree().is_some_and(|d| d >= 1) {
        if rest.degree() == Some(1) {
            out.push(-rest.coeff(0));
            break;
        }
        let Ok((l, _, beta)) = adjoin_root(&rest) else { break };
        if !NumberField::same(&l, &kf) {
            // least-degree factor is already nonlinear: no roots remain
            break;
        }
        let lin = NfPoly::new(&kf, vec![-beta.clone(), AlgebraicNumber::one_in(&kf)]);
        while rest.div_rem(&lin).1.is_zero() {
            rest = rest.div_rem(&lin).0;
        }
        out.push(beta);
    }
    out.sort_by(|a, b| a.coords().cmp(b.coords()));
    out.dedup();
    out
}

/// Q(a, b) = Q(γ) with γ = a + k b, together with the images of a and b.
/// The pairing of conjugates follows embedding 0 of each input field.
pub fn primitive_element(
    a: &AlgebraicNumber,
    b: &AlgebraicNumber,
) -> Result<(FieldRef, AlgebraicNumber, AlgebraicNumber)> {
    let (ra, rb) = (a.as_rational(), b.as_rational());
    if let (Some(x), Some(y)) = (&ra, &rb) {
        let q = NumberField::rationals();
        return Ok((q.clone(), AlgebraicNumber::rational(&q, x.clone()), AlgebraicNumber::rational(&q, y.clone())));
    }
    let ma = a.minimal_polynomial();
    let mb = b.minimal_polynomial();
    let (da, db) = (ma.degree().unwrap(), mb.degree().unwrap());
    if NumberField::same(a.field(), b.field()) && (da == a.field().degree() || db == a.field().degree()) {
        return Ok((a.field().clone(), a.clone(), b.clone()));
    }
    if rb.is_some() && da == a.field().degree() {
        return Ok((a.field().clone(), a.clone(), b.coerce(a.field()).unwrap()));
    }
    if ra.is_some() && db == b.field().degree() {
        return Ok((b.field().clone(), a.coerce(b.field()).unwrap(), b.clone()));
    }
    let za = a.complex_value(0)?.0;
    let zb = b.complex_value(0)?.0;
    for k in 1..=K_MAX {
        // R_k(x) = Res_y(m_a(x - k y), m_b(y)) = prod_j m_a(x - k β_j)
        let rk = interpolate_resultant(da * db, |x0| {
            let lin = Poly::new(vec![x0.clone(), rational::int(-k)]);
            Some(resultant_univariate(&mb, &ma.compose(&lin)))
        });
        if !rk.is_squarefree() {
            continue;
        }
        let z = za + zb * k as f64;
        let mut best: Option<(f64, Poly)> = None;
        for (h, _) in factor_poly_q(&rk) {
            let d = certified_roots(&h)?
                .iter()
                .map(|r| (r.z() - z).norm())
                .fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, h));
            }
        }
        let h = best.unwrap().1;
        let l = field_of_root(&h, "g");
        let gamma = if h.degree() == Some(1) {
            AlgebraicNumber::rational(&l, -h.coeff(0))
        } else {
            generator(&l)
        };
        // b is the common root of m_a(γ - k y) and m_b(y) over L
        let lin = NfPoly::new(&l, vec![gamma.clone(), AlgebraicNumber::from_int(-k)]);
        let mut ma_sub = NfPoly::zero(&l);
        for c in ma.coeffs().iter().rev() {
            ma_sub = ma_sub.mul(&lin).add(&NfPoly::from_q(&l, &Poly::constant(c.clone())));
        }
        let gg = ma_sub.gcd(&NfPoly::from_q(&l, &mb));
        if gg.degree() != Some(1) {
            continue;
        }
        let b_l = -gg.coeff(0);
        let a_l = &gamma - &(&AlgebraicNumber::from_int(k) * &b_l);
        return Ok((l, a_l, b_l));
    }
    Err(Error::Resolution(format!("no shift k <= {K_MAX} makes a + k b primitive")))
}

/// Joint field of several number fields with embeddings of each.
pub fn joint_field(fields: &[FieldRef]) -> Result<(FieldRef, Vec<FieldEmbedding>)> {
    let mut l = NumberField::rationals();
    let mut embs: Vec<FieldEmbedding> = vec![];
    for f in fields {
        if let Some(i) = embs.iter().position(|e| NumberField::same(&e.source, f)) {
            embs.push(embs[i].clone());
            continue;
        }
        if f.is_rationals() {
            embs.push(FieldEmbedding { source: f.clone(), target: l.clone(), gen_image: AlgebraicNumber::zero_in(&l) });
            continue;
        }
        if l.is_rationals() {
            l = f.clone();
            for e in embs.iter_mut() {
                e.target = l.clone();
                e.gen_image = AlgebraicNumber::zero_in(&l);
            }
            embs.push(FieldEmbedding::identity(f));
            continue;
        }
        let (nl, old_img, new_img) = primitive_element(&generator(&l), &generator(f))?;
        let step = FieldEmbedding { source: l.clone(), target: nl.clone(), gen_image: old_img };
        embs = embs.iter().map(|e| e.then(&step)).collect();
        embs.push(FieldEmbedding { source: f.clone(), target: nl.clone(), gen_image: new_img });
        l = nl;
    }
    Ok((l, embs))
}

/// Map all numbers into one joint field.
pub fn to_joint_field(xs: &[AlgebraicNumber]) -> Result<(FieldRef, Vec<AlgebraicNumber>)> {
    let fields: Vec<FieldRef> = xs.iter().map(|x| x.field().clone()).collect();
    let (l, embs) = joint_field(&fields)?;
    Ok((l, xs.iter().zip(&embs).map(|(x, e)| e.apply(x)).collect()))
}

/// Degree over Q of the field generated by the entries.
pub fn field_generated_degree(points: &[AlgebraicNumber]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::Precondition("field_generated_degree of an empty list".into()));
    }
    let mut cur = AlgebraicNumber::from_int(0);
    for p in points {
        // every branch of primitive_element returns a field equal to Q(cur, p)
        let (l, _, _) = primitive_element(&cur, p)?;
        cur = if l.is_rationals() { AlgebraicNumber::zero_in(&l) } else { generator(&l) };
    }
    Ok(cur.field().degree())
}
