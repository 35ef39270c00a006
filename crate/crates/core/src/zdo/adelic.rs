//! Membership of algebraic points in basic adelic subsets of A^n over Q cut
//! out by coordinatewise absolute-value conditions at one place per group.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::primitive::field_of_root;
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::{compare_abs, generator, to_joint_field, AlgebraicNumber, Decision, Poly, DEFAULT_EPS};
use crate::padic::element::ppow;
use crate::padic::places::places_above;
use crate::DEFAULT_PRECISION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Archimedean,
    Prime(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Rel {
    fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Rel::Lt => ord == Less,
            Rel::Le => ord != Greater,
            Rel::Gt => ord == Greater,
            Rel::Ge => ord != Less,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

/// |x_coord| rel bound
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub coord: usize,
    pub rel: Rel,
    #[serde(with = "crate::exactnum::rational::serde_rat")]
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintGroup {
    pub place: Place,
    pub constraints: Vec<Constraint>,
}

/// Intersection of the basic sets given by each group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdelicRegion {
    pub groups: Vec<ConstraintGroup>,
}

impl fmt::Display for ConstraintGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.place {
            Place::Archimedean => write!(f, "arch:")?,
            Place::Prime(p) => write!(f, "p={p}:")?,
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}|x{}|{}{}", c.coord, c.rel.symbol(), rational::to_string(&c.bound))?;
        }
        Ok(())
    }
}

impl fmt::Display for AdelicRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.groups.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn parse_constraint(s: &str) -> Result<Constraint> {
    let bad = || Error::Parse(format!("bad constraint '{s}'"));
    let s = s.trim();
    let rest = s.strip_prefix('|').ok_or_else(bad)?;
    let end = rest.find('|').ok_or_else(bad)?;
    let var = rest[..end].trim();
    let coord = match var.strip_prefix('x').ok_or_else(bad)? {
        "" => 0,
        n => n.parse().map_err(|_| bad())?,
    };
    let tail = rest[end + 1..].trim();
    let (rel, num) = if let Some(t) = tail.strip_prefix("<=") {
        (Rel::Le, t)
    } else if let Some(t) = tail.strip_prefix(">=") {
        (Rel::Ge, t)
    } else if let Some(t) = tail.strip_prefix('<') {
        (Rel::Lt, t)
    } else if let Some(t) = tail.strip_prefix('>') {
        (Rel::Gt, t)
    } else {
        return Err(bad());
    };
    let bound = rational::parse(num.trim())?;
    if bound.is_negative() {
        return Err(Error::Parse(format!("negative bound in '{s}'")));
    }
    Ok(Constraint { coord, rel, bound })
}

impl FromStr for AdelicRegion {
    type Err = Error;

    /// Groups separated by ';', e.g. "arch: |x0|<1, |x1|>1; p=3: |x0|<=1/9".
    fn from_str(s: &str) -> Result<Self> {
        let mut groups = vec![];
        for g in s.split(';').map(str::trim).filter(|g| !g.is_empty()) {
            let (head, body) = g.split_once(':').ok_or_else(|| Error::Parse(format!("missing place in '{g}'")))?;
            let head = head.trim();
            let place = if head == "arch" || head == "inf" {
                Place::Archimedean
            } else if let Some(p) = head.strip_prefix("p=") {
                let p: u64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad prime '{p}'")))?;
                if !crate::exactnum::fp::is_prime(p) {
                    return Err(Error::Parse(format!("{p} is not prime")));
                }
                Place::Prime(p)
            } else {
                return Err(Error::Parse(format!("unknown place '{head}'")));
            };
            let constraints = body.split(',').map(parse_constraint).collect::<Result<Vec<_>>>()?;
            groups.push(ConstraintGroup { place, constraints });
        }
        if groups.is_empty() {
            return Err(Error::Parse("empty region".into()));
        }
        Ok(AdelicRegion { groups })
    }
}

impl AdelicRegion {
    pub fn parse(s: &str) -> Result<Self> {
        s.parse()
    }

    pub fn dimension(&self) -> usize {
        self.groups.iter().flat_map(|g| &g.constraints).map(|c| c.coord + 1).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupMembership {
    pub group: String,
    pub member: bool,
    /// Index of the complex embedding or the place above p that satisfies the group.
    pub witness: Option<usize>,
    /// Embeddings (or places) examined.
    pub candidates: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub point: Vec<String>,
    pub member: bool,
    pub groups: Vec<GroupMembership>,
}

/// p^(-v) compared with b, exactly.
fn cmp_padic(p: u64, v: &Option<Rational>, b: &Rational) -> std::cmp::Ordering {
    let Some(v) = v else {
        return Rational::zero().cmp(b);
    };
    if b.is_zero() {
        return std::cmp::Ordering::Greater;
    }
    // v = a/d: compare p^(-a) with b^d
    let d: usize = v.denom().try_into().expect("ramification index too large");
    let a: i64 = v.numer().try_into().expect("valuation too large");
    let lhs = if a >= 0 {
        Rational::new(BigInt::from(1), ppow(p, a))
    } else {
        Rational::from_integer(ppow(p, -a))
    };
    lhs.cmp(&num_traits::pow(b.clone(), d))
}

fn arch_group(xs: &[AlgebraicNumber], g: &ConstraintGroup) -> Result<GroupMembership> {
    let name = g.to_string();
    if let Some(rs) = xs.iter().map(|x| x.as_rational()).collect::<Option<Vec<_>>>() {
        let member = g.constraints.iter().all(|c| c.rel.holds(rs[c.coord].abs().cmp(&c.bound)));
        return Ok(GroupMembership { group: name, member, witness: member.then_some(0), candidates: 1 });
    }
    let (_, v) = to_joint_field(xs)?;
    let vals: Vec<Vec<(f64, f64)>> = v
        .iter()
        .map(|x| x.complex_values().map(|zs| zs.into_iter().map(|(z, e)| (z.norm(), e)).collect()))
        .collect::<Result<_>>()?;
    let n = vals[0].len();
    let mut undecided = vec![];
    for k in 0..n {
        let mut ok = Some(true);
        for c in &g.constraints {
            let (m, e) = vals[c.coord][k];
            let t = rational::to_f64(&c.bound);
            let d = match compare_abs(m, e, t, DEFAULT_EPS) {
                Decision::Above => Some(matches!(c.rel, Rel::Gt | Rel::Ge)),
                Decision::Below => Some(matches!(c.rel, Rel::Lt | Rel::Le)),
                Decision::Indeterminate => None,
            };
            match d {
                Some(false) => {
                    ok = Some(false);
                    break;
                }
                None => {
                    undecided.push(format!("embedding {k}: |x{}| = {m:.3e} +- {e:.1e} vs {t}", c.coord));
                    ok = None;
                }
                Some(true) => {}
            }
        }
        if ok == Some(true) {
            return Ok(GroupMembership { group: name, member: true, witness: Some(k), candidates: n });
        }
    }
    if !undecided.is_empty() {
        return Err(Error::Indeterminate(format!("margin {DEFAULT_EPS} not cleared: {}", undecided.join("; "))));
    }
    Ok(GroupMembership { group: name, member: false, witness: None, candidates: n })
}

fn padic_group(xs: &[AlgebraicNumber], p: u64, g: &ConstraintGroup) -> Result<GroupMembership> {
    let (field, v) = to_joint_field(xs)?;
    let places = places_above(&field, p, &v, DEFAULT_PRECISION)?;
    for (k, pl) in places.iter().enumerate() {
        if g.constraints.iter().all(|c| c.rel.holds(cmp_padic(p, &pl.valuations[c.coord], &c.bound))) {
            return Ok(GroupMembership { group: g.to_string(), member: true, witness: Some(k), candidates: places.len() });
        }
    }
    Ok(GroupMembership { group: g.to_string(), member: false, witness: None, candidates: places.len() })
}

/// Each group may be satisfied by a different embedding; the point is a
/// member of the region when every group is satisfied.
pub fn adelic_member(xs: &[AlgebraicNumber], region: &AdelicRegion) -> Result<Membership> {
    if xs.len() < region.dimension() {
        return Err(Error::Precondition(format!(
            "region constrains {} coordinates, point has {}",
            region.dimension(),
            xs.len()
        )));
    }
    let mut groups = vec![];
    for g in &region.groups {
        groups.push(match g.place {
            Place::Archimedean => arch_group(xs, g)?,
            Place::Prime(p) => padic_group(xs, p, g)?,
        });
    }
    Ok(Membership {
        point: xs.iter().map(super::multipliers::label).collect(),
        member: groups.iter().all(|g| g.member),
        groups,
    })
}

/// n + sqrt(n^2 - 1) and its conjugate, as a root of x^2 - 2n x + 1.
pub fn pell_point(n: i64) -> AlgebraicNumber {
    generator(&field_of_root(&Poly::from_ints(&[1, -2 * n, 1]), "s"))
}

/// First member of a one-dimensional region among n, 1/n and
/// n + sqrt(n^2 - 1) for 2 <= n <= n_max, and p^(+-k), p^k/(p^k + 1),
/// (p^k + 1)/p^k for the primes of the region.
pub fn find_member(region: &AdelicRegion, n_max: i64) -> Result<Option<(AlgebraicNumber, Membership)>> {
    if region.dimension() > 1 {
        return Err(Error::Precondition("member search is for regions in A^1".into()));
    }
    let mut cands = vec![];
    for n in 2..=n_max {
        cands.push(AlgebraicNumber::from_int(n));
        cands.push(AlgebraicNumber::from_q(rational::rat(1, n)));
        cands.push(pell_point(n));
    }
    for g in &region.groups {
        if let Place::Prime(p) = g.place {
            for k in 1..=8 {
                let q = Rational::from_integer(ppow(p, k));
                cands.push(AlgebraicNumber::from_q(q.clone()));
                cands.push(AlgebraicNumber::from_q(num_traits::Inv::inv(q.clone())));
                // p-adically small but archimedean-bounded, and the reverse
                let q1 = &q + Rational::from_integer(1.into());
                cands.push(AlgebraicNumber::from_q(&q / &q1));
                cands.push(AlgebraicNumber::from_q(&q1 / &q));
            }
        }
    }
    for c in cands {
        let m = adelic_member(std::slice::from_ref(&c), region)?;
        if m.member {
            return Ok(Some((c, m)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    fn inside(x: &AlgebraicNumber, r: &str) -> bool {
        adelic_member(std::slice::from_ref(x), &r.parse().unwrap()).unwrap().member
    }

    #[test]
    fn unit_disk_example() {
        let half = AlgebraicNumber::from_q(rat(1, 2));
        let two = AlgebraicNumber::from_int(2);
        assert!(inside(&half, "arch: |x|<1"));
        assert!(!inside(&half, "arch: |x|>1"));
        assert!(inside(&two, "arch: |x|>1"));
        assert!(!inside(&two, "arch: |x|<1"));
        let both = "arch: |x|<1; arch: |x|>1";
        assert!(!inside(&half, both));
        for n in 2..=10 {
            // conjugates n +- sqrt(n^2 - 1) have product 1, one on each side
            let s = ((n * n - 1) as f64).sqrt();
            assert!((n as f64 - s) < 1.0 && (n as f64 + s) > 1.0);
            assert!(inside(&pell_point(n), both), "n = {n}");
        }
    }

    #[test]
    fn padic_groups() {
        let x = AlgebraicNumber::from_q(rat(9, 2));
        assert!(inside(&x, "p=3: |x|<=1/9"));
        assert!(!inside(&x, "p=3: |x|<1/9"));
        assert!(inside(&x, "p=2: |x|>1"));
        // 2 + sqrt3 is a unit: valuations 0 at every place
        let u = pell_point(2);
        assert!(inside(&u, "p=3: |x|>=1, |x|<=1"));
        assert!(!inside(&u, "p=3: |x|<1"));
        // sqrt3: |sqrt3|_3 = 3^(-1/2), between 1/9 and 1
        let s = generator(&field_of_root(&Poly::from_ints(&[-3, 0, 1]), "r"));
        assert!(inside(&s, "p=3: |x|<1, |x|>1/9"));
        assert!(!inside(&s, "p=3: |x|<=1/3"));
    }

    #[test]
    fn tuples_need_one_embedding_per_group() {
        let s = generator(&field_of_root(&Poly::from_ints(&[-2, 0, 1]), "s"));
        let m = &s * &AlgebraicNumber::from_int(-1);
        // both coordinates of (sqrt2, -sqrt2) have modulus sqrt2 at every embedding
        let r: AdelicRegion = "arch: |x0|>1, |x1|>1".parse().unwrap();
        assert!(adelic_member(&[s.clone(), m.clone()], &r).unwrap().member);
        let r: AdelicRegion = "arch: |x0|>1, |x1|<1".parse().unwrap();
        assert!(!adelic_member(&[s, m], &r).unwrap().member);
    }

    #[test]
    fn margin_is_reported() {
        let s = generator(&field_of_root(&Poly::from_ints(&[-2, 0, 1]), "s"));
        let e = adelic_member(&[s], &"arch: |x|<14142135623730951/10000000000000000".parse().unwrap()).unwrap_err();
        assert_eq!(e.kind(), "indeterminate");
    }

    #[test]
    fn search_list_finds_members() {
        let r: AdelicRegion = "arch: |x|<1; arch: |x|>1".parse().unwrap();
        let (x, _) = find_member(&r, 10).unwrap().unwrap();
        assert_eq!(x.minimal_polynomial(), Poly::from_ints(&[1, -4, 1]));
        let r: AdelicRegion = "p=5: |x|<1; arch: |x|<1".parse().unwrap();
        assert!(find_member(&r, 10).unwrap().is_some());
    }

    #[test]
    fn parse_display_round_trip() {
        let s = "arch: |x0|<1, |x1|>=2; p=3: |x0|<=1/9";
        let r: AdelicRegion = s.parse().unwrap();
        assert_eq!(r.to_string(), s);
        assert!("arch |x|<1".parse::<AdelicRegion>().is_err());
        assert!("p=4: |x|<1".parse::<AdelicRegion>().is_err());
    }
}
