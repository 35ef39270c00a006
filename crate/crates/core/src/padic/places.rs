//! Places of a number field above a rational prime.
//!
//! The minimal polynomial is made integral and monic, then split over Z_p
//! by Hensel lifting of coprime residual factors, translating by residues
//! and rescaling along Newton polygon slopes until every local factor is
//! unramified, totally ramified, or has an irreducible residual polynomial.
//! The variable substitutions are tracked as a Moebius matrix so that
//! valuations of field elements can be read off from local norms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::element::{ppow, PadicElement};
use crate::error::{Error, Result};
use crate::exactnum::factor::hensel_lift_multi;
use crate::exactnum::fp::{Fp, FpPoly};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::{AlgebraicNumber, FieldRef, Poly};

/// theta = (a w + b) / (c w + d)
type Mobius = [Rational; 4];

fn mob_mul(m: &Mobius, n: &Mobius) -> Mobius {
    [
        &m[0] * &n[0] + &m[1] * &n[2],
        &m[0] * &n[1] + &m[1] * &n[3],
        &m[2] * &n[0] + &m[3] * &n[2],
        &m[2] * &n[1] + &m[3] * &n[3],
    ]
}

#[derive(Clone, Debug)]
struct LocalFactor {
    /// Monic, coefficients reduced mod p^prec.
    g: Vec<BigInt>,
    prec: i64,
    mob: Mobius,
    e: usize,
    f: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlaceAbove {
    pub prime: u64,
    pub e: usize,
    pub f: usize,
    /// Valuation of each requested element, normalized so v(p) = 1; `None` for 0.
    #[serde(serialize_with = "ser_vals")]
    pub valuations: Vec<Option<Rational>>,
    /// Image of the field generator when the place has e = f = 1.
    pub generator_image: Option<PadicElement>,
    #[serde(skip)]
    local: LocalFactor,
    #[serde(skip)]
    field: FieldRef,
}

fn ser_vals<S: Serializer>(v: &[Option<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<String> = v
        .iter()
        .map(|x| x.as_ref().map(rational::to_string).unwrap_or_else(|| "inf".into()))
        .collect();
    strs.serialize(s)
}

impl PlaceAbove {
    pub fn degree(&self) -> usize {
        self.e * self.f
    }

    /// Valuation of an element of the field at this place.
    pub fn valuation(&self, a: &AlgebraicNumber) -> Result<Option<Rational>> {
        let a = a
            .coerce(&self.field)
            .ok_or_else(|| Error::Precondition("element is not in the field".into()))?;
        element_valuation(self.prime, &self.local, &a.to_poly())
    }
}

fn zreduce(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    v.iter().map(|c| c.mod_floor(m)).collect()
}

fn ival(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        k += 1;
    }
    Some(k)
}

/// G(c + z) modulo m.
fn taylor_shift(g: &[BigInt], c: &BigInt, m: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); g.len()];
    for coef in g.iter().rev() {
        // out = out * (z + c) + coef
        let mut next = vec![BigInt::zero(); g.len()];
        for i in 0..g.len() {
            if out[i].is_zero() {
                continue;
            }
            if i + 1 < g.len() {
                next[i + 1] += &out[i];
            }
            next[i] += &out[i] * c;
        }
        next[0] += coef;
        out = zreduce(&next, m);
    }
    out
}

/// Newton polygon of an integral polynomial known modulo p^prec, as a list of
/// (root valuation, count), largest valuation first. Fails if a coefficient
/// that vanishes at precision could lie on or below the hull.
fn certified_np(h: &[BigInt], p: u64, prec: i64) -> Result<Vec<(Rational, usize)>> {
    let raise = || Error::RaisePrecision(format!("Newton polygon not certified at p={p}"));
    if h[0].is_zero() {
        return Err(raise());
    }
    let pts: Vec<(usize, Rational)> = h
        .iter()
        .enumerate()
        .filter_map(|(i, c)| ival(c, p).map(|v| (i, rational::int(v))))
        .collect();
    let np = super::newton::NewtonPolygon::from_points(&pts);
    let mut hull_at = vec![Rational::zero(); h.len()];
    let mut y = rational::int(ival(&h[0], p).unwrap());
    let mut x = 0usize;
    hull_at[0] = y.clone();
    for s in &np.slopes {
        for _ in 0..s.length {
            y += &s.slope;
            x += 1;
            hull_at[x] = y.clone();
        }
    }
    for (i, c) in h.iter().enumerate() {
        if c.is_zero() && rational::int(prec) <= hull_at[i] {
            return Err(raise());
        }
    }
    Ok(np.root_valuations())
}

struct Splitter {
    p: u64,
    fp: Fp,
    out: Vec<LocalFactor>,
}

impl Splitter {
    fn split(&mut self, g: Vec<BigInt>, prec: i64, mob: Mobius, depth: usize) -> Result<()> {
        let p = self.p;
        let n = g.len() - 1;
        if prec < 1 || depth > 200 {
            return Err(Error::RaisePrecision(format!("factor separation at p={p}")));
        }
        if n == 1 {
            self.out.push(LocalFactor { g, prec, mob, e: 1, f: 1 });
            return Ok(());
        }
        let gbar = self.fp.from_ints(&g);
        let fac = self.fp.factor(&gbar);
        if fac.len() >= 2 {
            let comps: Vec<FpPoly> = fac
                .iter()
                .map(|(phi, e)| (0..*e).fold(vec![1], |acc, _| self.fp.pmul(&acc, phi)))
                .collect();
            let lifted = hensel_lift_multi(&g, &comps, p, prec as u32);
            for h in lifted {
                self.split(h, prec, mob.clone(), depth + 1)?;
            }
            return Ok(());
        }
        let (phi, mult) = &fac[0];
        if *mult == 1 {
            self.out.push(LocalFactor { g, prec, mob, e: 1, f: n });
            return Ok(());
        }
        if phi.len() != 2 {
            return Err(Error::Resolution(format!(
                "repeated residual factor of degree {} at p={p}",
                phi.len() - 1
            )));
        }
        let pm = ppow(p, prec);
        let c0 = BigInt::from(self.fp.neg(phi[0]));
        let h = taylor_shift(&g, &c0, &pm);
        let mob = mob_mul(&mob, &[Rational::one(), Rational::from(c0), Rational::zero(), Rational::one()]);
        let vals = certified_np(&h, p, prec)?;
        if vals.len() == 1 {
            let nu = &vals[0].0;
            let b = nu.denom().to_u64_digits().1.first().copied().unwrap_or(1) as usize;
            if b == n {
                self.out.push(LocalFactor { g: h, prec, mob, e: n, f: 1 });
                return Ok(());
            }
            if b == 1 {
                return self.scale_down(h, prec, mob, nu.to_integer().try_into().unwrap(), depth);
            }
            let a: i64 = nu.numer().try_into().unwrap();
            let k = n / b;
            // residual polynomial along the segment
            let mut r: FpPoly = vec![0; k + 1];
            for (j, rj) in r.iter_mut().enumerate() {
                let i = n - (k - j) * b;
                let need = a * (k - j) as i64;
                *rj = match ival(&h[i], p) {
                    Some(v) if v == need => {
                        self.fp.reduce_int(&(&h[i] / ppow(p, need)))
                    }
                    _ => 0,
                };
            }
            let rf = self.fp.factor(&self.fp.norm(r));
            if rf.len() == 1 && rf[0].1 == 1 {
                self.out.push(LocalFactor { g: h, prec, mob, e: b, f: k });
                return Ok(());
            }
            return Err(Error::Resolution(format!(
                "reducible residual polynomial on a ramified slope at p={p}"
            )));
        }
        let nu_min = &vals.last().unwrap().0;
        let nu_max = &vals[0].0;
        if nu_min.is_integer() {
            self.scale_down(h, prec, mob, nu_min.to_integer().try_into().unwrap(), depth)
        } else if nu_max.is_integer() {
            let nu: i64 = nu_max.to_integer().try_into().unwrap();
            let v0 = ival(&h[0], p).unwrap();
            let new_prec = prec - v0;
            if new_prec < 1 {
                return Err(Error::RaisePrecision(format!("factor separation at p={p}")));
            }
            let m = ppow(p, new_prec);
            let pv0 = ppow(p, v0);
            let u0 = &h[0] / &pv0;
            let u0inv = super::element::mod_inverse(&u0, &m);
            // coefficient of u^(n-i) is h_i p^(nu i) / h_0
            let mut k = vec![BigInt::zero(); n + 1];
            for i in 0..=n {
                let num = &h[i] * ppow(p, nu * i as i64);
                debug_assert!((&num % &pv0).is_zero());
                k[n - i] = ((num / &pv0) * &u0inv).mod_floor(&m);
            }
            let pn = Rational::from(ppow(p, nu));
            let mob = mob_mul(&mob, &[Rational::zero(), pn, Rational::one(), Rational::zero()]);
            self.split(k, new_prec, mob, depth + 1)
        } else {
            Err(Error::Resolution(format!(
                "cannot separate fractional Newton polygon slopes at p={p}"
            )))
        }
    }

    /// Substitute w = p^nu z and divide by p^(nu n).
    fn scale_down(&mut self, h: Vec<BigInt>, prec: i64, mob: Mobius, nu: i64, depth: usize) -> Result<()> {
        let n = h.len() - 1;
        let new_prec = prec - nu * n as i64;
        if new_prec < 1 {
            return Err(Error::RaisePrecision(format!("factor separation at p={}", self.p)));
        }
        let m = ppow(self.p, new_prec);
        let k: Vec<BigInt> = h
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = ppow(self.p, nu * (n - i) as i64);
                debug_assert!((c % &d).is_zero());
                (c / d).mod_floor(&m)
            })
            .collect();
        let pn = Rational::from(ppow(self.p, nu));
        let mob = mob_mul(&mob, &[pn, Rational::zero(), Rational::zero(), Rational::one()]);
        self.split(k, new_prec, mob, depth + 1)
    }
}

fn padic_poly(q: &Poly, p: u64, prec: i64) -> Vec<PadicElement> {
    q.coeffs().iter().map(|c| PadicElement::from_rational(p, c, prec)).collect()
}

/// Norm of h modulo the monic local factor g, i.e. the product of h over the roots of g.
fn local_norm(g: &[BigInt], gprec: i64, h: &[PadicElement], p: u64) -> Result<PadicElement> {
    let d = g.len() - 1;
    let gp: Vec<PadicElement> = g.iter().map(|c| PadicElement::from_bigint(p, c, gprec)).collect();
    let reduce = |v: &mut Vec<PadicElement>| {
        while v.len() > d {
            let top = v.pop().unwrap();
            let off = v.len() - d;
            for i in 0..d {
                v[off + i] = &v[off + i] - &(&top * &gp[i]);
            }
        }
    };
    let mut col: Vec<PadicElement> = h.to_vec();
    reduce(&mut col);
    col.resize(d, PadicElement::zero(p, gprec));
    let mut mat: Vec<Vec<PadicElement>> = vec![];
    for j in 0..d {
        if j > 0 {
            let mut next = vec![PadicElement::zero(p, gprec)];
            next.extend(col.iter().cloned());
            reduce(&mut next);
            col = next;
        }
        mat.push(col.clone());
    }
    // determinant with minimal-valuation pivots
    let mut det = PadicElement::one(p, gprec + 64);
    for k in 0..d {
        let piv = (k..d)
            .flat_map(|r| (k..d).map(move |c| (r, c)))
            .filter(|&(r, c)| !mat[r][c].is_zero())
            .min_by_key(|&(r, c)| (mat[r][c].valuation().unwrap(), r, c));
        let Some((r, c)) = piv else {
            return Err(Error::RaisePrecision(format!("local norm vanishes at precision, p={p}")));
        };
        if r != k {
            mat.swap(r, k);
            det = -det;
        }
        if c != k {
            for row in mat.iter_mut() {
                row.swap(c, k);
            }
            det = -det;
        }
        det = &det * &mat[k][k];
        let pivot = mat[k][k].clone();
        for r in k + 1..d {
            if mat[r][k].is_zero() {
                continue;
            }
            let factor = mat[r][k].checked_div(&pivot).unwrap();
            for c in k..d {
                let t = &factor * &mat[k][c];
                mat[r][c] = &mat[r][c] - &t;
            }
        }
    }
    Ok(det)
}

fn element_valuation(p: u64, lf: &LocalFactor, a: &Poly) -> Result<Option<Rational>> {
    if a.is_zero() {
        return Ok(None);
    }
    if a.is_constant() {
        return Ok(rational::valuation(&a.coeffs()[0], p).map(rational::int));
    }
    let [ma, mb, mc, md] = &lf.mob;
    let da = a.degree().unwrap();
    let num = Poly::new(vec![mb.clone(), ma.clone()]);
    let den = Poly::new(vec![md.clone(), mc.clone()]);
    let mut nw = Poly::zero();
    for (i, alpha) in a.coeffs().iter().enumerate() {
        if alpha.is_zero() {
            continue;
        }
        nw = nw + (num.pow(i as u32) * den.pow((da - i) as u32)).scale(alpha);
    }
    let work = lf.prec + 64;
    let d = lf.g.len() - 1;
    let v1 = local_norm(&lf.g, lf.prec, &padic_poly(&nw, p, work), p)?;
    let v1 = v1.valuation().unwrap();
    let v2 = if mc.is_zero() {
        d as i64 * rational::valuation(md, p).unwrap()
    } else {
        local_norm(&lf.g, lf.prec, &padic_poly(&den, p, work), p)?.valuation().unwrap()
    };
    Ok(Some(Rational::new(BigInt::from(v1 - da as i64 * v2), BigInt::from(d))))
}

/// All places of `field` above `p`, with the valuations of `elements` at each.
pub fn places_above(
    field: &FieldRef,
    p: u64,
    elements: &[AlgebraicNumber],
    m: i64,
) -> Result<Vec<PlaceAbove>> {
    if !crate::exactnum::fp::is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let elems: Vec<AlgebraicNumber> = elements
        .iter()
        .map(|a| a.coerce(field).ok_or_else(|| Error::Precondition("element is not in the field".into())))
        .collect::<Result<_>>()?;
    let mp = field.min_poly();
    let n = field.degree();
    // theta' = c theta has an integral monic minimal polynomial
    let c = mp
        .coeffs()
        .iter()
        .fold(BigInt::one(), |l, a| l.lcm(a.denom()));
    let g: Vec<BigInt> = mp
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| (a * Rational::from(c.pow((n - i) as u32))).to_integer())
        .collect();
    let prec = m + 16 * n as i64 + 16;
    let g = zreduce(&g, &ppow(p, prec));
    let mob: Mobius = [Rational::one(), Rational::zero(), Rational::zero(), Rational::from(c)];
    let mut sp = Splitter { p, fp: Fp::new(p), out: vec![] };
    sp.split(g, prec, mob, 0)?;
    let total: usize = sp.out.iter().map(|l| l.e * l.f).sum();
    debug_assert_eq!(total, n);
    let mut places = vec![];
    for lf in sp.out {
        let valuations = elems
            .iter()
            .map(|a| element_valuation(p, &lf, &a.to_poly()))
            .collect::<Result<Vec<_>>>()?;
        let generator_image = if lf.e == 1 && lf.f == 1 {
            let w0 = PadicElement::from_bigint(p, &(-&lf.g[0]), lf.prec);
            let [a, b, cc, d] = &lf.mob;
            let conv = |r: &Rational| PadicElement::from_rational(p, r, lf.prec + 64);
            let num = &(&conv(a) * &w0) + &conv(b);
            let den = &(&conv(cc) * &w0) + &conv(d);
            num.checked_div(&den)
        } else {
            None
        };
        places.push(PlaceAbove {
            prime: p,
            e: lf.e,
            f: lf.f,
            valuations,
            generator_image,
            local: lf,
            field: field.clone(),
        });
    }
    Ok(places)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};
    use crate::exactnum::{generator, NumberField};

    #[test]
    fn spec_examples() {
        let q = NumberField::rationals();
        let pl = places_above(&q, 3, &[AlgebraicNumber::from_int(6)], 40).unwrap();
        assert_eq!(pl.len(), 1);
        assert_eq!(pl[0].valuations, vec![Some(int(1))]);

        let k = NumberField::new(&Poly::from_ints(&[-2, 0, 1]), "a").unwrap();
        let a = generator(&k);
        let pl = places_above(&k, 7, &[a.clone()], 40).unwrap();
        assert_eq!(pl.len(), 2);
        for pa in &pl {
            assert_eq!((pa.e, pa.f), (1, 1));
            assert_eq!(pa.valuations, vec![Some(int(0))]);
            let g = pa.generator_image.as_ref().unwrap();
            assert!((g * g).eq_at_prec(&PadicElement::from_int(7, 2, 40)));
        }
        let pl = places_above(&k, 2, &[a], 40).unwrap();
        assert_eq!(pl.len(), 1);
        assert_eq!((pl[0].e, pl[0].f), (2, 1));
        assert_eq!(pl[0].valuations, vec![Some(rat(1, 2))]);
    }

    #[test]
    fn inert_and_mixed() {
        // x^2 + 1 is inert at 3
        let k = NumberField::new(&Poly::from_ints(&[1, 0, 1]), "i").unwrap();
        let pl = places_above(&k, 3, &[generator(&k)], 40).unwrap();
        assert_eq!(pl.len(), 1);
        assert_eq!((pl[0].e, pl[0].f), (1, 2));
        // 2 + sqrt 3 is a unit; its valuation is 0 everywhere
        let k = NumberField::new(&Poly::from_ints(&[-3, 0, 1]), "s").unwrap();
        let u = &generator(&k) + &AlgebraicNumber::from_int(2);
        for p in [2u64, 3, 5, 11] {
            let pl = places_above(&k, p, &[u.clone()], 40).unwrap();
            assert_eq!(pl.iter().map(|x| x.e * x.f).sum::<usize>(), 2);
            for x in &pl {
                assert_eq!(x.valuations, vec![Some(int(0))]);
            }
        }
        // (1 + sqrt 3) has norm -2; at 2 the place is ramified, v = 1/2
        let w = &generator(&k) + &AlgebraicNumber::from_int(1);
        let pl = places_above(&k, 2, &[w], 40).unwrap();
        assert_eq!(pl.len(), 1);
        assert_eq!(pl[0].valuations, vec![Some(rat(1, 2))]);
    }

    #[test]
    fn non_monic_and_split_valuations() {
        // Eisenstein at 5
        let k = NumberField::new(&Poly::from_ints(&[10, -5, 1]), "t").unwrap();
        let pl = places_above(&k, 5, &[generator(&k)], 40).unwrap();
        assert_eq!((pl[0].e, pl[0].f), (2, 1));
        assert_eq!(pl[0].valuations, vec![Some(rat(1, 2))]);
        // x^2 + x/2 + 1/3: the root valuations sum to v(1/3)
        let k = NumberField::new(&Poly::new(vec![rat(1, 3), rat(1, 2), int(1)]), "u").unwrap();
        let pl = places_above(&k, 2, &[generator(&k)], 40).unwrap();
        let s: Rational = pl
            .iter()
            .map(|x| x.valuations[0].clone().unwrap() * int((x.e * x.f) as i64))
            .sum();
        assert_eq!(s, int(0));
        // 3-adically the product of the roots has valuation -1
        let pl = places_above(&k, 3, &[generator(&k)], 40).unwrap();
        let s: Rational = pl
            .iter()
            .map(|x| x.valuations[0].clone().unwrap() * int((x.e * x.f) as i64))
            .sum();
        assert_eq!(s, int(-1));
    }
}
