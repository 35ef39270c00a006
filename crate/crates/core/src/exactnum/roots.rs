//! Certified complex roots of squarefree rational polynomials.
//!
//! Roots are approximated by Aberth iteration in double precision, then
//! each approximation z_k gets the inclusion radius n |W_k| with
//! W_k = p(z_k) / (a_n prod_{j != k} (z_k - z_j)). When these disks are
//! pairwise disjoint, each contains exactly one root.

use num_complex::Complex64;
use serde::Serialize;

use super::poly::Poly;
use super::rational;
use crate::error::{Error, Result};

const U: f64 = f64::EPSILON / 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CRoot {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

impl CRoot {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

struct Approx {
    a: Vec<f64>,
    abs_a: Vec<f64>,
}

impl Approx {
    fn new(p: &Poly) -> Self {
        let a: Vec<f64> = p.coeffs().iter().map(rational::to_f64).collect();
        let abs_a = a.iter().map(|c| c.abs()).collect();
        Approx { a, abs_a }
    }

    fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in self.a.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    }

    /// |p(z)| upper bound including coefficient conversion and Horner rounding.
    fn abs_bound(&self, z: Complex64) -> f64 {
        let n = self.a.len() as f64;
        let (v, _) = self.eval(z);
        let r = z.norm();
        let mut s = 0.0;
        for c in self.abs_a.iter().rev() {
            s = s * r + c;
        }
        v.norm() + (4.0 * n + 8.0) * U * s * 1.01
    }
}

/// All complex roots with certified, pairwise disjoint inclusion disks.
/// Real roots get an exactly zero imaginary part; order is by (re, im).
pub fn certified_roots(p: &Poly) -> Result<Vec<CRoot>> {
    let n = p.degree().ok_or_else(|| Error::Precondition("roots of zero polynomial".into()))?;
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        let r = -p.coeff(0) / p.coeff(1);
        let v = rational::to_f64(&r);
        return Ok(vec![CRoot { re: v, im: 0.0, radius: v.abs() * 2.0 * U + f64::MIN_POSITIVE }]);
    }
    let ap = Approx::new(p);
    let mut z = aberth(&ap, n);
    // a few Newton polishing steps
    for _ in 0..3 {
        for zk in z.iter_mut() {
            let (v, d) = ap.eval(*zk);
            if d.norm() > 0.0 {
                *zk -= v / d;
            }
        }
    }
    let lc = ap.a[n].abs();
    let mut roots = Vec::with_capacity(n);
    for k in 0..n {
        let mut prod = 1.0;
        for j in 0..n {
            if j != k {
                prod *= (z[k] - z[j]).norm();
            }
        }
        if prod == 0.0 {
            return Err(Error::Indeterminate("root approximations collide".into()));
        }
        let w = ap.abs_bound(z[k]) / (lc * prod);
        let radius = n as f64 * w * (1.0 + 1e-9) + f64::MIN_POSITIVE;
        roots.push(CRoot { re: z[k].re, im: z[k].im, radius });
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (roots[i].z() - roots[j].z()).norm();
            if d <= 4.0 * (roots[i].radius + roots[j].radius) {
                return Err(Error::Indeterminate(
                    "complex roots not separated at double precision".into(),
                ));
            }
        }
    }
    // real roots: the disk meets its own conjugate, so the enclosed root is real
    for r in roots.iter_mut() {
        if r.im.abs() < r.radius {
            r.im = 0.0;
        }
    }
    // symmetrize conjugate pairs
    let m = roots.len();
    for i in 0..m {
        if roots[i].im > 0.0 {
            let target = roots[i].z().conj();
            let j = (0..m)
                .filter(|&j| roots[j].im < 0.0)
                .min_by(|&a, &b| {
                    (roots[a].z() - target)
                        .norm()
                        .total_cmp(&(roots[b].z() - target).norm())
                })
                .expect("conjugate root missing");
            let re = (roots[i].re + roots[j].re) / 2.0;
            let im = (roots[i].im - roots[j].im) / 2.0;
            let rad = roots[i].radius.max(roots[j].radius)
                + (roots[i].z() - roots[j].z().conj()).norm();
            roots[i] = CRoot { re, im, radius: rad };
            roots[j] = CRoot { re, im: -im, radius: rad };
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn aberth(ap: &Approx, n: usize) -> Vec<Complex64> {
    let lc = ap.a[n].abs();
    // Fujiwara-type bound on root moduli
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let c = (ap.a[n - k].abs() / lc).powf(1.0 / k as f64);
        bound = bound.max(c);
    }
    let radius = (2.0 * bound).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.9, t)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (v, d) = ap.eval(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-17 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_x2_minus_2() {
        let r = certified_roots(&Poly::from_ints(&[-2, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].re + 2f64.sqrt()).abs() <= r[0].radius + 1e-15);
        assert_eq!(r[0].im, 0.0);
        assert!((r[1].re - 2f64.sqrt()).abs() <= r[1].radius + 1e-15);
        assert!(r[1].radius < 1e-12);
    }

    #[test]
    fn conjugate_pairs() {
        let r = certified_roots(&Poly::from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(r[0].re, r[1].re);
        assert_eq!(r[0].im, -r[1].im);
        assert!(r[0].im < 0.0);
    }

    #[test]
    fn degree_twelve_cyclotomic_like() {
        // x^12 - 3 has 12 well separated roots
        let mut c = vec![0i64; 13];
        c[0] = -3;
        c[12] = 1;
        let r = certified_roots(&Poly::from_ints(&c)).unwrap();
        assert_eq!(r.len(), 12);
        for x in &r {
            assert!((x.z().norm() - 3f64.powf(1.0 / 12.0)).abs() < 1e-10);
        }
    }
}
