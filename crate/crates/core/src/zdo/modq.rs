//! Arithmetic modulo a word-size prime: reductions, truncated power series
//! and rational reconstruction.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exactnum::fp::{primes_from, Fp, FpPoly};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::Poly;

/// Primes just above this are used for modular searches.
pub const SEARCH_PRIME_START: u64 = (1 << 61) + (1 << 40);

pub fn search_primes() -> impl Iterator<Item = u64> {
    primes_from(SEARCH_PRIME_START)
}

pub fn reduce(fp: &Fp, r: &Rational) -> Option<u64> {
    let d = fp.reduce_int(r.denom());
    (d != 0).then(|| fp.mul(fp.reduce_int(r.numer()), fp.inv(d)))
}

pub fn reduce_poly(fp: &Fp, p: &Poly) -> Option<FpPoly> {
    let c: Option<Vec<u64>> = p.coeffs().iter().map(|c| reduce(fp, c)).collect();
    Some(fp.norm(c?))
}

pub fn eval(fp: &Fp, p: &[u64], x: u64) -> u64 {
    p.iter().rev().fold(0, |acc, &c| fp.add(fp.mul(acc, x), c))
}

/// p(c + z)
pub fn taylor_shift(fp: &Fp, p: &[u64], c: u64) -> Vec<u64> {
    let mut out: Vec<u64> = vec![0; p.len()];
    for &coef in p.iter().rev() {
        // out = out * (z + c) + coef
        let mut next = vec![0; p.len()];
        for i in 0..p.len() {
            if out[i] == 0 {
                continue;
            }
            next[i] = fp.add(next[i], fp.mul(out[i], c));
            if i + 1 < p.len() {
                next[i + 1] = fp.add(next[i + 1], out[i]);
            }
        }
        next[0] = fp.add(next[0], coef);
        out = next;
    }
    out
}

pub fn series_mul(fp: &Fp, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let mut out = vec![0u64; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] = fp.add(out[i + j], fp.mul(x, y));
        }
    }
    out
}

/// a / b mod z^n; b(0) must be a unit.
pub fn series_div(fp: &Fp, a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let inv0 = fp.inv(b[0]);
    let mut q = vec![0u64; n];
    for k in 0..n {
        let mut s = a.get(k).copied().unwrap_or(0);
        for j in 1..=k.min(b.len().saturating_sub(1)) {
            s = fp.sub(s, fp.mul(b[j], q[k - j]));
        }
        q[k] = fp.mul(s, inv0);
    }
    q
}

/// r/s with |r|, s <= sqrt(q/2) and r/s = a mod q.
pub fn rational_reconstruct(a: u64, q: u64) -> Option<Rational> {
    let bound = ((q / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (q as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let r = Rational::new(BigInt::from(r1), BigInt::from(t1));
    let fp = Fp::new(q);
    (reduce(&fp, &r) == Some(a)).then_some(r)
}

/// Reconstruct a vector; None if any entry fails.
pub fn reconstruct_vec(v: &[u64], q: u64) -> Option<Vec<Rational>> {
    v.iter().map(|&a| if a == 0 { Some(Rational::zero()) } else { rational_reconstruct(a, q) }).collect()
}

/// Whether a rational is a small-height value (used to vet reconstructions).
pub fn small(r: &Rational, bits: u64) -> bool {
    r.numer().abs().bits() <= bits && r.denom().bits() <= bits
}

pub fn to_rational_string(v: u64, q: u64) -> String {
    rational_reconstruct(v, q).map_or_else(|| format!("{v} mod {q}"), |r| rational::to_string(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn reconstruction_round_trip() {
        let q = search_primes().next().unwrap();
        let fp = Fp::new(q);
        for r in [rat(-3, 7), rat(12345, 678), rat(0, 1), rat(1, 1)] {
            let a = reduce(&fp, &r).unwrap();
            let back = if a == 0 { Rational::zero() } else { rational_reconstruct(a, q).unwrap() };
            assert_eq!(back, r);
        }
    }

    #[test]
    fn series_division() {
        let fp = Fp::new(101);
        // 1 / (1 - z) = 1 + z + z^2 + ...
        let s = series_div(&fp, &[1], &[1, 100], 5);
        assert_eq!(s, vec![1, 1, 1, 1, 1]);
        assert_eq!(taylor_shift(&fp, &[0, 0, 1], 3), vec![9, 6, 1]);
    }
}
