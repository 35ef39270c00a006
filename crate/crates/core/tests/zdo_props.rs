use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use orbitlab_core::exactnum::rational::{int, rat, valuation};
use orbitlab_core::exactnum::{generator, AlgebraicNumber, MPoly, NumberField, Poly, Rational};
use orbitlab_core::projdyn::{evaluate, MapSpec, P1Map, P2Map, ProjPoint};
use orbitlab_core::zdo::adelic::{Constraint, ConstraintGroup, Place, Rel};
use orbitlab_core::zdo::curves::branch_bound;
use orbitlab_core::zdo::{
    find_member, good_multipliers, invariant_curve_check, invariant_curve_search, multiplicative_independence,
    orbit_closure, AdelicRegion, Independence,
};
use proptest::prelude::*;

fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, piv);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let k = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let t = &k * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

fn quadratic_forms_row(p: &[Rational]) -> Vec<Rational> {
    let mut out = vec![];
    for a in (0..=2u32).rev() {
        for b in (0..=2 - a).rev() {
            let c = 2 - a - b;
            out.push(p[0].pow(a as i32) * p[1].pow(b as i32) * p[2].pow(c as i32));
        }
    }
    out
}

fn coords(p: &ProjPoint) -> Vec<Rational> {
    p.factors()[0].iter().map(|a| a.as_rational().unwrap()).collect()
}

fn linear_p2(m: &[i64]) -> Option<MapSpec> {
    let v = |i| MPoly::var(3, i);
    let k = |n: i64| MPoly::constant(3, int(n));
    let row = |r: usize| k(m[3 * r]).mul(&v(0)).add(&k(m[3 * r + 1]).mul(&v(1))).add(&k(m[3 * r + 2]).mul(&v(2)));
    P2Map::new([row(0), row(1), row(2)], 1).ok().map(MapSpec::P2)
}

fn quad_field(d: i64) -> AlgebraicNumber {
    generator(&NumberField::new(&Poly::from_ints(&[-d, 0, 1]), "t").unwrap())
}

fn element(t: &AlgebraicNumber, a: i64, b: i64) -> AlgebraicNumber {
    AlgebraicNumber::from_poly(t.field(), &Poly::from_ints(&[a, b]))
}

/// All (m1, m2) with max(|m1|, |m2|) <= b and l1^m1 l2^m2 = 1, by exhaustive powering.
fn brute_relations(l1: &AlgebraicNumber, l2: &AlgebraicNumber, b: i64) -> Vec<(i64, i64)> {
    let mut out = vec![];
    for m1 in -b..=b {
        for m2 in -b..=b {
            if (m1, m2) == (0, 0) {
                continue;
            }
            let v = &l1.pow(m1).unwrap() * &l2.pow(m2).unwrap();
            if v.is_one() {
                out.push((m1, m2));
            }
        }
    }
    out
}

fn abs_p(x: &Rational, p: u64) -> f64 {
    valuation(x, p).map_or(0.0, |v| (p as f64).powi(-(v as i32)))
}

fn satisfies(v: f64, c: &Constraint) -> bool {
    let b = orbitlab_core::exactnum::rational::to_f64(&c.bound);
    match c.rel {
        Rel::Lt => v < b,
        Rel::Le => v <= b,
        Rel::Gt => v > b,
        Rel::Ge => v >= b,
    }
}

fn arch_group() -> impl Strategy<Value = ConstraintGroup> {
    (prop::bool::ANY, 1i64..4).prop_map(|(lt, a)| ConstraintGroup {
        place: Place::Archimedean,
        constraints: vec![Constraint { coord: 0, rel: if lt { Rel::Lt } else { Rel::Gt }, bound: int(a) }],
    })
}

fn prime_group() -> impl Strategy<Value = ConstraintGroup> {
    (0usize..3, prop::bool::ANY, 1i32..4).prop_map(|(pi, small, k)| {
        let p = [2u64, 3, 5][pi];
        let q = Rational::from_integer(BigInt::from(p)).pow(k);
        let (rel, bound) = if small { (Rel::Le, q.recip()) } else { (Rel::Ge, q) };
        ConstraintGroup { place: Place::Prime(p), constraints: vec![Constraint { coord: 0, rel, bound }] }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closure_forms_vanish_on_the_orbit(m in prop::collection::vec(-2i64..3, 9), x in (-3i64..4, -3i64..4, 1i64..3), tri in any::<bool>()) {
        let mut m = m;
        if tri {
            // keep the line X = 0 invariant
            m[1] = 0;
            m[2] = 0;
        }
        let Some(f) = linear_p2(&m) else { return Ok(()) };
        let start = ProjPoint::p2([x.0, x.1, x.2].map(AlgebraicNumber::from_int)).unwrap();
        let mpts = 8;
        let Ok(r) = orbit_closure(&f, &start, &[2], mpts) else { return Ok(()) };
        let mut orbit = vec![start.clone()];
        for _ in 1..3 * mpts {
            let next = evaluate(&f, orbit.last().unwrap()).unwrap();
            orbit.push(next);
        }
        let pts: Vec<Vec<Rational>> = orbit.iter().map(coords).collect();
        for p in &r.polys {
            for q in &pts {
                prop_assert!(p.eval(q).is_zero());
            }
        }
        // every held-out point was exact here, so the forms span the full kernel
        prop_assert_eq!(r.held_out_exact, 2 * mpts);
        let rows: Vec<Vec<Rational>> = pts.iter().map(|q| quadratic_forms_row(q)).collect();
        prop_assert_eq!(r.polys.len(), r.monomials - rank(&rows));
        let first: Vec<Vec<Rational>> = rows[..mpts].to_vec();
        prop_assert_eq!(r.polys.len() + r.dropped, r.monomials - rank(&first));
    }

    #[test]
    fn found_curves_satisfy_degree_and_branch_bounds(c1 in -3i64..2, c2 in -3i64..2, shape in 0usize..3) {
        let g = |c: i64| P1Map::polynomial(&Poly::from_ints(&[c, 0, 1])).unwrap();
        let (f1, f2) = match shape {
            0 => (g(c1), g(c1)),
            1 => (g(c1), g(c1).iterate(2)),
            _ => (g(c1), g(c2)),
        };
        let d_f = f1.degree().max(f2.degree());
        let s = invariant_curve_search(&f1, &f2, 2, 2).unwrap();
        if shape == 0 {
            prop_assert!(s.curves.iter().any(|c| c.bidegree == (1, 1)));
        }
        let oracle_bound = (d_f as f64 + 2.0 * (d_f as f64).sqrt() + 1.0).floor() as u32 + 1;
        prop_assert_eq!(branch_bound(d_f), oracle_bound);
        for c in &s.curves {
            prop_assert!(invariant_curve_check(&c.poly, &f1, &f2).unwrap().invariant);
            prop_assert!((2..=d_f).contains(&c.restricted_degree));
            prop_assert!(c.restricted_degree_in_range);
            prop_assert_eq!(c.multiplicity_bound, oracle_bound);
            for (_, mult) in &c.fixed_point_multiplicities {
                prop_assert!(*mult <= oracle_bound);
            }
        }
    }

    #[test]
    fn independence_matches_brute_force(
        d in prop::sample::select(vec![2i64, 3, 5, -1, -3]),
        u in (-3i64..4, -2i64..3),
        w in (-3i64..4, -2i64..3),
        ij in (-3i64..4, -3i64..4),
        dependent in any::<bool>(),
        b in 1i64..7,
    ) {
        let t = quad_field(d);
        let base = element(&t, u.0, u.1);
        prop_assume!(!base.is_zero());
        let (l1, l2) = if dependent {
            let l1 = base.pow(ij.0).unwrap();
            let l2 = base.pow(ij.1).unwrap();
            (l1, l2)
        } else {
            (base, element(&t, w.0, w.1))
        };
        prop_assume!(!l1.is_zero() && !l2.is_zero());
        let r = multiplicative_independence(&l1, &l2, b).unwrap();
        let rels = brute_relations(&l1, &l2, b);
        match r.verdict {
            Independence::Dependent => {
                let (m1, m2) = r.relation.unwrap();
                prop_assert!(rels.contains(&(m1, m2)));
                let best = rels.iter().map(|(a, c)| a.abs().max(c.abs())).min().unwrap();
                prop_assert_eq!(m1.abs().max(m2.abs()), best);
            }
            Independence::Independent | Independence::IndependentUpToBound => prop_assert!(rels.is_empty()),
        }
    }

    #[test]
    fn good_verdict_is_stable_under_powers(a in (-6i64..7, 1i64..4), c in (-6i64..7, 1i64..4), k in 2i64..6) {
        let (l1, l2) = (rat(a.0, a.1), rat(c.0, c.1));
        prop_assume!(!l1.is_zero() && !l2.is_zero());
        let q = |x: &Rational| AlgebraicNumber::from_q(x.clone());
        let g = good_multipliers(&q(&l1), &q(&l2), 50, 12).unwrap();
        let gk = good_multipliers(&q(&l1.pow(k as i32)), &q(&l2.pow(k as i32)), 50, 12).unwrap();
        prop_assert_eq!(g.verdict, gk.verdict);
    }

    #[test]
    fn found_members_lie_in_the_region(arch in prop::option::of(arch_group()), prime in prop::option::of(prime_group())) {
        let groups: Vec<ConstraintGroup> = arch.iter().chain(prime.iter()).cloned().collect();
        prop_assume!(!groups.is_empty());
        let uncovered = matches!(
            (&arch, &prime),
            (Some(a), Some(p)) if a.constraints[0].rel == Rel::Gt && p.constraints[0].rel == Rel::Ge
        );
        let region = AdelicRegion { groups: groups.clone() };
        let found = find_member(&region, 20).unwrap();
        if !uncovered {
            prop_assert!(found.is_some());
        }
        let Some((x, m)) = found else { return Ok(()) };
        prop_assert!(m.member);
        for g in &groups {
            let ok = match (x.as_rational(), g.place) {
                (Some(r), Place::Archimedean) => g.constraints.iter().all(|c| satisfies(orbitlab_core::exactnum::rational::to_f64(&r.abs()), c)),
                (Some(r), Place::Prime(p)) => g.constraints.iter().all(|c| satisfies(abs_p(&r, p), c)),
                (None, place) => {
                    // n + sqrt(n^2 - 1): a unit at every prime, conjugates n +- sqrt(n^2 - 1)
                    let mp = x.minimal_polynomial();
                    prop_assert!(mp.coeff(0).is_one() && mp.degree() == Some(2));
                    let n = orbitlab_core::exactnum::rational::to_f64(&(-mp.coeff(1) / int(2)));
                    let conj = [n + (n * n - 1.0).sqrt(), n - (n * n - 1.0).sqrt()];
                    match place {
                        Place::Archimedean => conj.iter().any(|v| g.constraints.iter().all(|c| satisfies(*v, c))),
                        Place::Prime(_) => g.constraints.iter().all(|c| satisfies(1.0, c)),
                    }
                }
            };
            prop_assert!(ok, "{} fails {:?}", x, g);
        }
    }
}
