//! Polynomials over the prime field F_p (p < 2^62), stored ascending as `Vec<u64>`.
//!
//! Used for modular factorization and for residual polynomials of p-adic
//! Newton polygon segments.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type FpPoly = Vec<u64>;

#[derive(Clone, Copy, Debug)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!((2..1 << 62).contains(&p), "prime out of supported range");
        Fp { p }
    }

    pub fn reduce_int(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero in F_p");
        self.pow(a, self.p - 2)
    }

    pub fn norm(&self, mut v: FpPoly) -> FpPoly {
        for c in v.iter_mut() {
            *c %= self.p;
        }
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    pub fn from_ints(&self, c: &[BigInt]) -> FpPoly {
        self.norm(c.iter().map(|x| self.reduce_int(x)).collect())
    }

    pub fn deg(&self, a: &FpPoly) -> i64 {
        a.len() as i64 - 1
    }

    pub fn padd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.len().max(b.len());
        self.norm(
            (0..n)
                .map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    pub fn psub(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.len().max(b.len());
        self.norm(
            (0..n)
                .map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    pub fn pscale(&self, a: &FpPoly, c: u64) -> FpPoly {
        self.norm(a.iter().map(|&x| self.mul(x, c)).collect())
    }

    pub fn pmul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut v = vec![0u128; a.len() + b.len() - 1];
        let p = self.p as u128;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                v[i + j] = (v[i + j] + x as u128 * y as u128) % p;
            }
        }
        self.norm(v.into_iter().map(|c| c as u64).collect())
    }

    pub fn divrem(&self, a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!b.is_empty(), "division by zero polynomial mod p");
        if a.len() < b.len() {
            return (vec![], a.clone());
        }
        let inv = self.inv(*b.last().unwrap());
        let mut r = a.clone();
        let db = b.len() - 1;
        let mut q = vec![0; a.len() - db];
        for k in (0..q.len()).rev() {
            let c = self.mul(r[k + db], inv);
            q[k] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    r[k + j] = self.sub(r[k + j], self.mul(c, bj));
                }
            }
        }
        r.truncate(db);
        (self.norm(q), self.norm(r))
    }

    pub fn rem(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        self.divrem(a, b).1
    }

    pub fn monic(&self, a: &FpPoly) -> FpPoly {
        match a.last() {
            None => vec![],
            Some(&l) => self.pscale(a, self.inv(l)),
        }
    }

    pub fn gcd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// (g, s, t) with s a + t b = g monic.
    pub fn xgcd(&self, a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (vec![1], vec![]);
        let (mut t0, mut t1) = (vec![], vec![1]);
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1);
            let s = self.psub(&s0, &self.pmul(&q, &s1));
            let t = self.psub(&t0, &self.pmul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = self.inv(*r0.last().unwrap());
        (self.pscale(&r0, inv), self.pscale(&s0, inv), self.pscale(&t0, inv))
    }

    pub fn derivative(&self, a: &FpPoly) -> FpPoly {
        self.norm(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.mul(c, i as u64 % self.p))
                .collect(),
        )
    }

    pub fn eval(&self, a: &FpPoly, x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    pub fn powmod(&self, base: &FpPoly, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut result = self.rem(&vec![1], m);
        let b = self.rem(base, m);
        for i in (0..e.bits()).rev() {
            result = self.rem(&self.pmul(&result, &result), m);
            if e.bit(i) {
                result = self.rem(&self.pmul(&result, &b), m);
            }
        }
        result
    }

    pub fn is_squarefree(&self, a: &FpPoly) -> bool {
        !a.is_empty() && self.deg(&self.gcd(a, &self.derivative(a))) == 0
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// pairs (product of all degree-d irreducible factors, d).
    pub fn ddf(&self, f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let mut out = vec![];
        let mut f = self.monic(f);
        let x = vec![0, 1];
        let mut h = self.rem(&x, &f);
        let p = BigUint::from(self.p);
        let mut d = 0;
        while self.deg(&f) >= 2 * (d as i64 + 1) {
            d += 1;
            h = self.powmod(&h, &p, &f);
            let g = self.gcd(&self.psub(&h, &x), &f);
            if g.len() > 1 {
                out.push((g.clone(), d));
                f = self.divrem(&f, &g).0;
                h = self.rem(&h, &f);
            }
        }
        if f.len() > 1 {
            let dd = f.len() - 1;
            out.push((f, dd));
        }
        out
    }

    /// Equal-degree splitting (Cantor–Zassenhaus) with a deterministic generator.
    pub fn edf(&self, f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
        let n = f.len() - 1;
        if n == d {
            return vec![self.monic(f)];
        }
        loop {
            let a: FpPoly = self.norm((0..n).map(|_| rng.gen_range(0..self.p)).collect());
            if a.len() < 2 {
                continue;
            }
            let g = if self.p == 2 {
                // trace map a + a^2 + ... + a^(2^(d-1))
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..d {
                    t = self.rem(&self.pmul(&t, &t), f);
                    acc = self.padd(&acc, &t);
                }
                self.gcd(&acc, f)
            } else {
                let e = (BigUint::from(self.p).pow(d as u32) - 1u32) / 2u32;
                let b = self.powmod(&a, &e, f);
                self.gcd(&self.psub(&b, &vec![1]), f)
            };
            if g.len() > 1 && g.len() < f.len() {
                let q = self.divrem(f, &g).0;
                let mut out = self.edf(&g, d, rng);
                out.extend(self.edf(&q, d, rng));
                return out;
            }
        }
    }

    /// Monic irreducible factors of a squarefree polynomial, sorted.
    pub fn factor_squarefree(&self, f: &FpPoly) -> Vec<FpPoly> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.p);
        let mut out = vec![];
        for (g, d) in self.ddf(f) {
            out.extend(self.edf(&g, d, &mut rng));
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Squarefree decomposition of a monic polynomial in characteristic p.
    pub fn squarefree_decomposition(&self, f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let mut out = vec![];
        let f = self.monic(f);
        if f.len() <= 1 {
            return out;
        }
        let mut c = self.gcd(&f, &self.derivative(&f));
        let mut w = self.divrem(&f, &c).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = self.gcd(&w, &c);
            let z = self.divrem(&w, &y).0;
            if z.len() > 1 {
                out.push((z, i));
            }
            i += 1;
            c = self.divrem(&c, &y).0;
            w = y;
        }
        if c.len() > 1 {
            // c is a p-th power: c(x) = r(x^p) = r(x)^p
            let r: FpPoly = c.iter().step_by(self.p as usize).cloned().collect();
            for (g, m) in self.squarefree_decomposition(&r) {
                out.push((g, m * self.p as usize));
            }
        }
        out
    }

    /// Full factorization into monic irreducibles with multiplicities, sorted.
    pub fn factor(&self, f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let mut out = vec![];
        for (g, m) in self.squarefree_decomposition(f) {
            for h in self.factor_squarefree(&g) {
                out.push((h, m));
            }
        }
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Roots in F_p (distinct), sorted.
    pub fn roots(&self, f: &FpPoly) -> Vec<u64> {
        if f.is_empty() {
            return (0..self.p).collect();
        }
        let mut r: Vec<u64> = self
            .factor(f)
            .into_iter()
            .filter(|(g, _)| g.len() == 2)
            .map(|(g, _)| self.neg(g[0]))
            .collect();
        r.sort();
        r
    }
}

/// Deterministic Miller-Rabin for all u64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let fp = Fp::new(n);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = fp.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = fp.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start.max(2)..).filter(|&n| is_prime(n))
}

pub fn is_zero_mod(n: &BigInt, p: u64) -> bool {
    (n % BigInt::from(p)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "{n}");
        }
        assert!(is_prime((1 << 61) - 1));
        // strong pseudoprime to bases 2..=37 is beyond u64; Carmichael numbers fail
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(((1u64 << 31) - 1) * ((1 << 31) - 1)));
    }

    fn expand(fp: &Fp, fs: &[(FpPoly, usize)]) -> FpPoly {
        fs.iter().fold(vec![1], |acc, (g, m)| {
            (0..*m).fold(acc, |a, _| fp.pmul(&a, g))
        })
    }

    #[test]
    fn factor_mod_small_primes() {
        for p in [2u64, 3, 5, 7, 13] {
            let fp = Fp::new(p);
            // x^8 - x over F_p plus a repeated factor
            let f = fp.norm(vec![fp.neg(1), 0, 1, 0, 0, 1, 1, 1, 0, 1]);
            let g = fp.pmul(&f, &fp.pmul(&vec![1, 1], &vec![1, 1]));
            let fs = fp.factor(&g);
            assert_eq!(expand(&fp, &fs), fp.monic(&g), "p={p}");
            for (h, _) in &fs {
                // irreducible: no factor found by brute-force root test for linear check
                assert!(fp.factor_squarefree(h).len() == 1);
            }
        }
    }

    #[test]
    fn roots_mod_7() {
        let fp = Fp::new(7);
        assert_eq!(fp.roots(&vec![5, 0, 1]), vec![3, 4]); // x^2 - 2
        assert_eq!(fp.roots(&vec![1, 0, 1]), Vec::<u64>::new());
    }
}
