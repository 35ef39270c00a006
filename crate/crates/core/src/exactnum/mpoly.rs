//! Sparse multivariate polynomials over Q with exact division.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::field::AlgebraicNumber;
use super::poly::Poly;
use super::rational::{self, Rational};

/// Exponent vector compared in graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
    fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Mono, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, Rational)>>(nvars: usize, it: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    /// Univariate polynomial placed in variable `i`.
    pub fn from_poly(nvars: usize, i: usize, q: &Poly) -> Self {
        Self::from_terms(
            nvars,
            q.coeffs().iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; nvars];
                e[i] = k as u32;
                (e, c.clone())
            }),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let m = Mono(e);
        let v = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(m, c)| (m.0.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    /// Degree in the sum of the given variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&i| m.0[i]).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.0.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.0.clone(), -c.clone());
        }
        r
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.0.clone(), c * k)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                let e: Vec<u32> = m.0.iter().zip(&n.0).map(|(x, y)| x + y).collect();
                r.add_term(e, a * b);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient self / d, `None` if d does not divide self.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (lm, lc) = d.leading().expect("division by zero polynomial");
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let e: Vec<u32> = m.0.iter().zip(&lm.0).map(|(a, b)| a - b).collect();
            let t = Self::from_terms(self.nvars, [(e, c / &lc)]);
            rem = rem.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (&e, xi)| acc * xi.pow(e as i32))
            })
            .sum()
    }

    /// Evaluate at algebraic numbers (all in one field, or rational).
    pub fn eval_alg(&self, x: &[AlgebraicNumber]) -> AlgebraicNumber {
        let mut acc = AlgebraicNumber::from_int(0);
        for (m, c) in &self.terms {
            let mut t = AlgebraicNumber::from_q(c.clone());
            for (&e, xi) in m.0.iter().zip(x) {
                for _ in 0..e {
                    t = &t * xi;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitute variable i -> subs[i] (all in the same target ring).
    pub fn substitute(&self, subs: &[MPoly]) -> MPoly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs[0].nvars;
        let mut cache: Vec<Vec<MPoly>> = subs.iter().map(|s| vec![MPoly::constant(nv, Rational::one()), s.clone()]).collect();
        let mut r = MPoly::zero(nv);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(nv, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul(&subs[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][e as usize]);
            }
            r = r.add(&t);
        }
        r
    }

    pub fn partial(&self, i: usize) -> MPoly {
        let mut r = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[i] -= 1;
            r.add_term(e, c * rational::int(m.0[i] as i64));
        }
        r
    }

    /// Homogeneous of degree d (the zero polynomial counts).
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Restrict to univariate in variable `i` with all others set to values.
    pub fn to_univariate(&self, i: usize, others: &[Rational]) -> Poly {
        let mut v = vec![Rational::zero(); self.degree_in(&[i]) as usize + 1];
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.0.iter().enumerate() {
                if j != i {
                    t *= others[j].pow(e as i32);
                }
            }
            v[m.0[i] as usize] += t;
        }
        Poly::new(v)
    }

    /// Multiply through by a common denominator and divide by the content.
    pub fn primitive(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let coeffs: Vec<Rational> = self.terms.values().cloned().collect();
        let v = super::linalg::primitive_vector(&coeffs);
        MPoly {
            nvars: self.nvars,
            terms: self.terms.keys().cloned().zip(v).collect(),
        }
    }
}

impl MPoly {
    /// Render with the given variable names, highest monomials first.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rational::zero();
            let a = c.abs();
            if k == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = vec![];
            if !a.is_one() || m.degree() == 0 {
                factors.push(rational::to_string(&a));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{e}", names[i])),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parse an expression in +, -, *, ^ (integer exponents), parentheses,
    /// rational constants and division by constants.
    pub fn parse(s: &str, names: &[&str]) -> crate::error::Result<MPoly> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0, names, n: names.len() };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(crate::error::Error::Parse(format!("trailing input in '{s}'")));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> crate::error::Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = vec![];
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(crate::error::Error::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [&'a str],
    n: usize,
}

impl Parser<'_> {
    fn peek_op(&self, c: char) -> bool {
        self.toks.get(self.pos) == Some(&Tok::Op(c))
    }

    fn err<T>(&self, what: &str) -> crate::error::Result<T> {
        Err(crate::error::Error::Parse(format!("{what} at token {}", self.pos)))
    }

    fn expr(&mut self) -> crate::error::Result<MPoly> {
        let mut acc = self.term()?;
        loop {
            if self.peek_op('+') {
                self.pos += 1;
                acc = acc.add(&self.term()?);
            } else if self.peek_op('-') {
                self.pos += 1;
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> crate::error::Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.peek_op('*') {
                self.pos += 1;
                acc = acc.mul(&self.unary()?);
            } else if self.peek_op('/') {
                self.pos += 1;
                let d = self.unary()?;
                if d.total_degree() != 0 || d.is_zero() {
                    return self.err("division by a non-constant");
                }
                let c = d.terms().next().unwrap().1.clone();
                acc = acc.scale(&(Rational::one() / c));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> crate::error::Result<MPoly> {
        if self.peek_op('-') {
            self.pos += 1;
            return Ok(self.unary()?.scale(&-Rational::one()));
        }
        if self.peek_op('+') {
            self.pos += 1;
        }
        let base = self.atom()?;
        if self.peek_op('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some(Tok::Num(k)) => {
                    let k: u32 = k.parse().map_err(|_| crate::error::Error::Parse("bad exponent".into()))?;
                    self.pos += 1;
                    return Ok(base.pow(k));
                }
                _ => return self.err("expected an integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> crate::error::Result<MPoly> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                Ok(MPoly::constant(self.n, rational::parse(&s)?))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                match self.names.iter().position(|n| *n == s) {
                    Some(i) => Ok(MPoly::var(self.n, i)),
                    None => Err(crate::error::Error::Parse(format!("unknown variable '{s}'"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.peek_op(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            _ => self.err("expected a term"),
        }
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.display_with(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;

    #[test]
    fn parse_and_display_round_trip() {
        let names = ["x", "y"];
        let p = MPoly::parse("(x - 2*y)^2 - 3/4*x + 1", &names).unwrap();
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let q = x.sub(&y.scale(&int(2))).pow(2).sub(&x.scale(&crate::exactnum::rational::rat(3, 4))).add(&MPoly::constant(2, int(1)));
        assert_eq!(p, q);
        assert_eq!(MPoly::parse(&p.display_with(&names), &names).unwrap(), p);
        assert!(MPoly::parse("x + z", &names).is_err());
        assert!(MPoly::parse("x / y", &names).is_err());
    }

    #[test]
    fn exact_division() {
        // (y - x^2)(y + x^2) / (y - x^2)
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let a = y.sub(&x.pow(2));
        let b = y.add(&x.pow(2));
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!(p.div_exact(&y.sub(&x)), None);
        assert_eq!(p.eval(&[int(2), int(3)]), int(-7));
        let s = a.substitute(&[x.pow(2), y.pow(2)]);
        assert_eq!(s, p);
    }
}
