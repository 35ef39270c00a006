//! Hensel lifting of simple roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::element::{mod_inverse, ppow, PadicElement};
use crate::error::{Error, Result};
use crate::exactnum::Poly;

fn eval_int(f: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    f.iter().rev().fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(m))
}

/// Root r of `poly` with r ≡ seed (mod p) and poly(r) ≡ 0 (mod p^M).
pub fn hensel_root(poly: &Poly, p: u64, seed: &BigInt, m: i64) -> Result<PadicElement> {
    if poly.degree().unwrap_or(0) == 0 {
        return Err(Error::Precondition("Hensel lifting needs a nonconstant polynomial".into()));
    }
    let f = poly.primitive_int();
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * i).collect();
    let pb = BigInt::from(p);
    if !eval_int(&f, seed, &pb).is_zero() || eval_int(&df, seed, &pb).is_zero() {
        return Err(Error::HenselInapplicable);
    }
    let pm = ppow(p, m);
    let mut x = seed.mod_floor(&pb);
    for _ in 0..128 {
        let fx = eval_int(&f, &x, &pm);
        if fx.is_zero() {
            break;
        }
        let dfx = eval_int(&df, &x, &pm);
        x = (&x - fx * mod_inverse(&dfx, &pm)).mod_floor(&pm);
    }
    Ok(PadicElement::from_bigint(p, &x, m))
}

/// Evaluate a rational polynomial at a p-adic element.
pub fn eval_poly(poly: &Poly, x: &PadicElement) -> PadicElement {
    let p = x.prime();
    let prec = x.prec().max(1);
    let mut acc = PadicElement::zero(p, prec + 64);
    for c in poly.coeffs().iter().rev() {
        acc = &(&acc * x) + &PadicElement::from_rational(p, c, prec + 64);
    }
    acc
}
