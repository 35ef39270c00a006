//! Factorization over Q: squarefree decomposition, modular factorization,
//! multifactor Hensel lifting and Zassenhaus recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::fp::{is_zero_mod, primes_from, Fp, FpPoly};
use super::poly::Poly;

/// Monic irreducible factors with multiplicities. The product of the
/// factors (with multiplicity) equals `p` up to a rational scalar.
/// Output is sorted by degree, then coefficients.
pub fn factor_poly_q(p: &Poly) -> Vec<(Poly, usize)> {
    assert!(!p.is_zero(), "factor_poly_q: zero polynomial");
    let mut out = vec![];
    for (g, m) in squarefree_decomposition(p) {
        for h in factor_squarefree(&g) {
            out.push((h, m));
        }
    }
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    out
}

/// Yun's algorithm: monic squarefree, pairwise coprime parts with multiplicities.
pub fn squarefree_decomposition(p: &Poly) -> Vec<(Poly, usize)> {
    let f = p.monic();
    let mut out = vec![];
    if f.is_constant() {
        return out;
    }
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_exact(&a0).unwrap();
    let c = df.div_exact(&a0).unwrap();
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while !b.is_constant() {
        let a = b.gcd(&d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a).unwrap();
        let c = d.div_exact(&a).unwrap();
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

/// Irreducible monic factors of a squarefree polynomial.
pub fn factor_squarefree(p: &Poly) -> Vec<Poly> {
    let Some(n) = p.degree() else { return vec![] };
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![p.monic()];
    }
    let mut f = p.primitive_int();
    let mut out = vec![];
    // pull out the factor x so that the constant term is nonzero
    if f[0].is_zero() {
        out.push(Poly::x());
        f.remove(0);
        if f.len() <= 2 {
            if f.len() == 2 {
                out.push(Poly::from_bigints(&f).monic());
            }
            return out;
        }
    }
    out.extend(zassenhaus(&f).into_iter().map(|g| Poly::from_bigints(&g).monic()));
    out
}

fn choose_prime(f: &[BigInt]) -> (u64, Vec<FpPoly>) {
    let lc = f.last().unwrap();
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut good = 0;
    for p in primes_from(3) {
        if is_zero_mod(lc, p) {
            continue;
        }
        let fp = Fp::new(p);
        let fb = fp.from_ints(f);
        if !fp.is_squarefree(&fb) {
            continue;
        }
        let fac = fp.factor_squarefree(&fb);
        good += 1;
        if best.as_ref().is_none_or(|(_, b)| fac.len() < b.len()) {
            best = Some((p, fac));
        }
        if best.as_ref().unwrap().1.len() == 1 || good >= 6 {
            break;
        }
    }
    best.unwrap()
}

fn mods(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn zmul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    v.iter().map(|c| c.mod_floor(m)).collect()
}

fn lift_fp(a: &FpPoly) -> Vec<BigInt> {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lift f = g h mod p to mod p^k, with g monic and lc(h) = lc(f).
pub fn hensel_lift_pair(
    f: &[BigInt],
    g: &FpPoly,
    h: &FpPoly,
    p: u64,
    k: u32,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let fp = Fp::new(p);
    let pk = BigInt::from(p).pow(k);
    let (one, s, t) = fp.xgcd(g, h);
    assert_eq!(one, vec![1], "Hensel lifting needs coprime factors mod p");
    let mut gg = lift_fp(g);
    let mut hh = lift_fp(h);
    *hh.last_mut().unwrap() = f.last().unwrap().mod_floor(&pk);
    let mut pj = BigInt::from(p);
    for _ in 1..k {
        let prod = zmul(&gg, &hh, &pk);
        let mut e: Vec<BigInt> = (0..f.len().max(prod.len()))
            .map(|i| {
                let a = f.get(i).cloned().unwrap_or_default();
                let b = prod.get(i).cloned().unwrap_or_default();
                (a - b).mod_floor(&pk)
            })
            .collect();
        for c in e.iter_mut() {
            debug_assert!((&*c % &pj).is_zero());
            *c = &*c / &pj;
        }
        let ep = fp.from_ints(&e);
        let se = fp.pmul(&s, &ep);
        let (q, dh) = fp.divrem(&se, h);
        let dg = fp.padd(&fp.pmul(&t, &ep), &fp.pmul(&q, g));
        for (i, c) in dg.iter().enumerate() {
            gg[i] = (&gg[i] + &pj * c).mod_floor(&pk);
        }
        for (i, c) in dh.iter().enumerate() {
            hh[i] = (&hh[i] + &pj * c).mod_floor(&pk);
        }
        pj *= p;
    }
    (gg, hh)
}

/// Lift a factorization f = lc * prod(g_i) mod p (g_i monic, pairwise coprime)
/// to monic factors mod p^k.
pub fn hensel_lift_multi(f: &[BigInt], gs: &[FpPoly], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let fp = Fp::new(p);
    let pk = BigInt::from(p).pow(k);
    let lc = fp.reduce_int(f.last().unwrap());
    let mut current: Vec<BigInt> = f.iter().map(|c| c.mod_floor(&pk)).collect();
    let mut out = vec![];
    for i in 0..gs.len() {
        if i + 1 == gs.len() {
            let inv = f
                .last()
                .unwrap()
                .extended_gcd(&pk)
                .x
                .mod_floor(&pk);
            out.push(current.iter().map(|c| (c * &inv).mod_floor(&pk)).collect());
            break;
        }
        let rest = gs[i + 1..]
            .iter()
            .fold(vec![lc], |acc, g| fp.pmul(&acc, g));
        let (g, h) = hensel_lift_pair(&current, &gs[i], &rest, p, k);
        out.push(g);
        current = h;
    }
    out
}

fn divides_exactly(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    // integer long division; g primitive
    let (n, m) = (f.len(), g.len());
    if m > n {
        return None;
    }
    let lg = g.last().unwrap();
    let mut r = f.to_vec();
    let mut q = vec![BigInt::zero(); n - m + 1];
    for k in (0..=n - m).rev() {
        let (c, rem) = r[k + m - 1].div_rem(lg);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, gj) in g.iter().enumerate() {
                r[k + j] -= &c * gj;
            }
        }
        q[k] = c;
    }
    r.iter().all(Zero::is_zero).then_some(q)
}

fn primitive_part(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let sign = if v.last().unwrap().is_negative() { -1 } else { 1 };
    v.iter().map(|c| c / &g * sign).collect()
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(0, n, k, &mut vec![], &mut out);
    out
}

/// Irreducible primitive integer factors of a squarefree primitive
/// polynomial with nonzero constant term and degree >= 2.
fn zassenhaus(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    let (p, modfac) = choose_prime(f);
    if modfac.len() == 1 {
        return vec![f.to_vec()];
    }
    let maxc = f.iter().map(|c| c.abs()).max().unwrap();
    let lc = f.last().unwrap().abs();
    let bound = (BigInt::one() << n) * BigInt::from(n + 1) * &maxc * &lc * 2;
    let mut k = 1u32;
    let mut pk = BigInt::from(p);
    while pk <= bound {
        pk *= p;
        k += 1;
    }
    let mut lifted = hensel_lift_multi(f, &modfac, p, k);
    let mut f = f.to_vec();
    let mut found = vec![];
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut hit = None;
        let lcf = f.last().unwrap().clone();
        for subset in combinations(lifted.len(), s) {
            let g = subset
                .iter()
                .fold(vec![lcf.mod_floor(&pk)], |acc, &i| zmul(&acc, &lifted[i], &pk));
            let g: Vec<BigInt> = g.iter().map(|c| mods(c, &pk)).collect();
            let g = primitive_part(&g);
            if let Some(q) = divides_exactly(&f, &g) {
                hit = Some((subset, g, q));
                break;
            }
        }
        match hit {
            Some((subset, g, q)) => {
                found.push(g);
                f = primitive_part(&q);
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, v)| v)
                    .collect();
            }
            None => s += 1,
        }
    }
    if f.len() > 1 {
        found.push(f);
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[(Poly, usize)]) -> Poly {
        fs.iter()
            .fold(Poly::one(), |acc, (g, m)| &acc * &g.pow(*m as u32))
    }

    #[test]
    fn spec_examples() {
        let f = factor_poly_q(&Poly::from_ints(&[-1, 0, 1]));
        assert_eq!(
            f,
            vec![(Poly::from_ints(&[-1, 1]), 1), (Poly::from_ints(&[1, 1]), 1)]
        );
        let f = factor_poly_q(&Poly::from_ints(&[-2, 0, 1]));
        assert_eq!(f, vec![(Poly::from_ints(&[-2, 0, 1]), 1)]);
        let f = factor_poly_q(&Poly::from_ints(&[-1, 0, 0, 0, 1]));
        assert_eq!(
            f,
            vec![
                (Poly::from_ints(&[-1, 1]), 1),
                (Poly::from_ints(&[1, 1]), 1),
                (Poly::from_ints(&[1, 0, 1]), 1)
            ]
        );
    }

    #[test]
    fn swinnerton_dyer_style() {
        // x^4 - 10x^2 + 1 is irreducible but splits mod every prime
        let p = Poly::from_ints(&[1, 0, -10, 0, 1]);
        assert_eq!(factor_poly_q(&p), vec![(p.clone(), 1)]);
        // product with the minimal polynomial of sqrt2 + sqrt6
        let q = Poly::from_ints(&[16, 0, -16, 0, 1]);
        let f = factor_poly_q(&(&p * &q));
        assert_eq!(f.len(), 2);
        assert_eq!(product(&f), &p * &q);
    }

    #[test]
    fn multiplicities_and_content() {
        let a = Poly::from_ints(&[1, 2]);
        let b = Poly::from_ints(&[-3, 0, 1]);
        let p = (&a.pow(3) * &b).scale(&crate::exactnum::rational::rat(7, 3));
        let f = factor_poly_q(&p);
        assert_eq!(f, vec![(a.monic(), 3), (b, 1)]);
        assert_eq!(product(&f), p.monic());
    }

    #[test]
    fn cyclotomic_36() {
        let mut c = vec![0i64; 37];
        c[0] = -1;
        c[36] = 1;
        let f = factor_poly_q(&Poly::from_ints(&c));
        // x^36 - 1 has one cyclotomic factor per divisor of 36
        assert_eq!(f.len(), 9);
        assert_eq!(product(&f), Poly::from_ints(&c));
    }
}
