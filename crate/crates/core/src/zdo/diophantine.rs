//! Bounded check of |l1^n1 l2^n2 - li|_p >= C (n1 + n2)^(-beta) for p-adic units.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::padic::element::ppow;
use crate::padic::PadicElement;

#[derive(Clone, Debug, Serialize)]
pub struct DiophantineReport {
    pub holds: bool,
    /// (n1, n2, i) of the first failing case.
    pub counterexample: Option<(u32, u32, usize)>,
    pub cases_checked: usize,
    pub n_max: u32,
    pub c: String,
    pub beta: String,
    pub precision: i64,
}

/// Whether p^(-v) >= C s^(-beta), exactly: p^(-v w) s^u >= C^w for beta = u/w.
fn bound_holds(p: u64, v: i64, c: &Rational, beta: &Rational, s: u32) -> bool {
    let (u, w) = (beta.numer(), beta.denom());
    let u: u32 = u.try_into().expect("beta numerator too large");
    let w: u32 = w.try_into().expect("beta denominator too large");
    let lhs = Rational::new(BigInt::from(s).pow(u), BigInt::one()) / Rational::from_integer(ppow(p, v * w as i64));
    lhs >= num_traits::pow(c.clone(), w as usize)
}

pub fn verify_diophantine(
    l1: &PadicElement,
    l2: &PadicElement,
    c: &Rational,
    beta: &Rational,
    n_max: u32,
) -> Result<DiophantineReport> {
    let p = l1.prime();
    if l2.prime() != p {
        return Err(Error::Precondition("multipliers at different primes".into()));
    }
    if !l1.is_unit() || !l2.is_unit() {
        return Err(Error::Precondition("multipliers must be p-adic units".into()));
    }
    if !c.is_positive() || !beta.is_positive() {
        return Err(Error::Precondition("C and beta must be positive".into()));
    }
    let prec = l1.prec().min(l2.prec());
    let mut report = DiophantineReport {
        holds: true,
        counterexample: None,
        cases_checked: 0,
        n_max,
        c: rational::to_string(c),
        beta: rational::to_string(beta),
        precision: prec,
    };
    let pw1: Vec<PadicElement> = (0..=n_max).map(|k| l1.pow(k as u64)).collect();
    let pw2: Vec<PadicElement> = (0..=n_max).map(|k| l2.pow(k as u64)).collect();
    for s in 2..=n_max {
        for n1 in 0..=s {
            let n2 = s - n1;
            let prod = &pw1[n1 as usize] * &pw2[n2 as usize];
            for (i, li) in [l1, l2].into_iter().enumerate() {
                report.cases_checked += 1;
                let diff = &prod - li;
                let ok = match diff.valuation() {
                    Some(v) => bound_holds(p, v, c, beta, s),
                    // |diff| <= p^-prec: decided only if even that bound fails
                    None if !bound_holds(p, diff.prec(), c, beta, s) => false,
                    None => return Err(Error::RaisePrecision(format!("case (n1, n2) = ({n1}, {n2}) vanishes to precision {}", diff.prec()))),
                };
                if !ok {
                    report.holds = false;
                    report.counterexample = Some((n1, n2, i + 1));
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};
    use crate::exactnum::rational::int_valuation;
    use num_traits::Zero;

    fn el(p: u64, n: i64) -> PadicElement {
        PadicElement::from_int(p, n, 60)
    }

    /// Exhaustive integer check with exact valuations.
    fn oracle(p: u64, a: i64, b: i64, c_exp: i64, n_max: u32) -> bool {
        for s in 2..=n_max {
            for n1 in 0..=s {
                let prod = BigInt::from(a).pow(n1) * BigInt::from(b).pow(s - n1);
                for li in [a, b] {
                    let d = &prod - BigInt::from(li);
                    if d.is_zero() {
                        return false;
                    }
                    let v = int_valuation(&d, p);
                    // p^-v >= p^-c_exp / s  <=>  s >= p^(v - c_exp)
                    let rhs = if v >= c_exp { ppow(p, v - c_exp) } else { BigInt::zero() };
                    if BigInt::from(s) < rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn trivial_pair_fails() {
        let r = verify_diophantine(&el(3, 1), &el(3, 1), &rat(1, 27), &int(1), 50).unwrap();
        assert!(!r.holds);
        assert_eq!(r.counterexample, Some((0, 2, 1)));
    }

    #[test]
    fn independent_pair_needs_smaller_constant() {
        // 4^12 = 10 mod 3^6 breaks C = 3^-3; C = 3^-4 survives up to N = 50
        let r = verify_diophantine(&el(3, 4), &el(3, 10), &rat(1, 27), &int(1), 50).unwrap();
        assert!(!oracle(3, 4, 10, 3, 50));
        assert!(!r.holds);
        assert_eq!(r.counterexample, Some((12, 0, 2)));
        let r = verify_diophantine(&el(3, 4), &el(3, 10), &rat(1, 81), &int(1), 50).unwrap();
        assert!(oracle(3, 4, 10, 4, 50));
        assert!(r.holds);
    }

    #[test]
    fn dependent_pair_fails_at_relation() {
        let r = verify_diophantine(&el(3, 4), &el(3, 16), &rat(1, 27), &int(1), 50).unwrap();
        assert!(!r.holds);
        assert_eq!(r.counterexample, Some((2, 0, 2)));
        assert!(!oracle(3, 4, 16, 3, 50));
    }

    #[test]
    fn oracle_agrees_on_small_units() {
        for (a, b) in [(4, 7), (2, 5), (7, 13), (4, 28), (10, 19)] {
            for c_exp in [1, 2, 3] {
                let r = verify_diophantine(&el(3, a), &el(3, b), &Rational::new(1.into(), ppow(3, c_exp)), &int(1), 12);
                if a % 3 == 0 || b % 3 == 0 {
                    continue;
                }
                assert_eq!(r.unwrap().holds, oracle(3, a, b, c_exp, 12), "{a} {b} {c_exp}");
            }
        }
    }

    #[test]
    fn undecided_zero_asks_for_precision() {
        let lo = PadicElement::from_int(3, 1, 2);
        let e = verify_diophantine(&lo, &lo, &rat(1, 27), &int(1), 5).unwrap_err();
        assert_eq!(e.kind(), "raise_precision");
    }
}
