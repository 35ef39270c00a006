//! p-adic logarithm and exponential on their convergence domains.

use num_traits::{One, Zero};

use super::element::PadicElement;
use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};

fn min_val(p: u64) -> i64 {
    if p == 2 {
        2
    } else {
        1
    }
}

fn vp_u64(mut n: u64, p: u64) -> i64 {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// log(u) for u with v(u - 1) >= 1 (>= 2 when p = 2). The result carries
/// the absolute precision of u.
pub fn padic_log(u: &PadicElement) -> Result<PadicElement> {
    let p = u.prime();
    let prec = u.prec();
    let x = u - &PadicElement::one(p, prec);
    if x.is_zero() {
        return Ok(PadicElement::zero(p, prec));
    }
    let vx = x.valuation().unwrap();
    if vx < min_val(p) {
        return Err(Error::Precondition(format!(
            "log needs v(u-1) >= {} at p={p}",
            min_val(p)
        )));
    }
    let xr = x.to_rational();
    let mut sum = Rational::zero();
    let mut pw = Rational::one();
    let mut n: u64 = 1;
    loop {
        pw = &pw * &xr;
        // term valuation n v(x) - v_p(n)
        let tv = n as i64 * vx - vp_u64(n, p);
        if tv < prec {
            let t = &pw / rational::int(n as i64);
            if n % 2 == 0 {
                sum -= t;
            } else {
                sum += t;
            }
        } else if (n as i64) * vx - (n as f64).log(p as f64).floor() as i64 >= prec {
            break;
        }
        n += 1;
    }
    Ok(PadicElement::from_rational(p, &sum, prec))
}

/// exp(x) for v(x) >= 1 (>= 2 when p = 2), at the absolute precision of x.
pub fn padic_exp(x: &PadicElement) -> Result<PadicElement> {
    let p = x.prime();
    let prec = x.prec();
    if x.is_zero() {
        return Ok(PadicElement::one(p, prec));
    }
    let vx = x.valuation().unwrap();
    if vx < min_val(p) {
        return Err(Error::Precondition(format!("exp needs v(x) >= {} at p={p}", min_val(p))));
    }
    let xr = x.to_rational();
    let mut sum = Rational::one();
    let mut term = Rational::one();
    let mut vfact: i64 = 0;
    let mut n: u64 = 1;
    loop {
        term = &term * &xr / rational::int(n as i64);
        vfact += vp_u64(n, p);
        let tv = n as i64 * vx - vfact;
        if tv < prec {
            sum += &term;
        }
        // v_p(n!) <= n/(p-1), so later terms stay below p^-prec
        if (n as f64) * (vx as f64 - 1.0 / (p as f64 - 1.0)) >= prec as f64 + 1.0 {
            break;
        }
        n += 1;
    }
    Ok(PadicElement::from_rational(p, &sum, prec))
}
