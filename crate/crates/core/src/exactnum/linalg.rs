//! Exact linear algebra over Q: fraction-free echelon form, kernels, solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{self, Rational};

pub type Matrix = Vec<Vec<Rational>>;

/// Clear denominators row by row.
fn integer_rows(m: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let d = rational::common_denominator(row.iter());
            row.iter()
                .map(|c| (c * Rational::from_integer(d.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Bareiss fraction-free row echelon form of an integer matrix.
/// Returns the echelon matrix and pivot columns.
pub fn bareiss_echelon(mut a: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = a.len();
    let mut pivots = vec![];
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division not exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Rank of a rational matrix.
pub fn rank(m: &[Vec<Rational>], ncols: usize) -> usize {
    bareiss_echelon(integer_rows(m), ncols).1.len()
}

/// Basis of the right kernel {v : M v = 0}. Each basis vector has a 1 at
/// its own free column and 0 at the other free columns.
pub fn kernel(m: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (ech, pivots) = bareiss_echelon(integer_rows(m), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = vec![];
    for &fc in &free {
        let mut v = vec![Rational::zero(); ncols];
        v[fc] = Rational::one();
        for (row, &pc) in ech.iter().zip(pivots.iter()).rev() {
            let mut s = Rational::zero();
            for j in pc + 1..ncols {
                if !row[j].is_zero() && !v[j].is_zero() {
                    s += Rational::from_integer(row[j].clone()) * &v[j];
                }
            }
            v[pc] = -s / Rational::from_integer(row[pc].clone());
        }
        basis.push(v);
    }
    basis
}

/// Reduced row echelon form of a basis (rows), canonical for the span.
pub fn rref_rows(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    a
}

/// Solve M x = b; `None` when inconsistent. Free variables are set to zero.
pub fn solve(m: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let red = rref_rows(&aug, ncols + 1);
    let mut x = vec![Rational::zero(); ncols];
    for row in &red {
        let pc = row.iter().position(|c| !c.is_zero()).unwrap();
        if pc == ncols {
            return None;
        }
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

/// Scale a vector to a primitive integer vector with positive last nonzero entry.
pub fn primitive_vector(v: &[Rational]) -> Vec<Rational> {
    let d = rational::common_denominator(v.iter());
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Rational::from_integer(d.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return v.to_vec();
    }
    let last = ints.iter().rev().find(|c| !c.is_zero()).unwrap();
    let sign = if last < &BigInt::zero() { -1 } else { 1 };
    ints.into_iter()
        .map(|c| Rational::from_integer(c / &g * sign))
        .collect()
}
