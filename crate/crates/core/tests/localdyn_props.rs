use num_traits::Zero;
use orbitlab_core::exactnum::rational::{int, valuation};
use orbitlab_core::exactnum::{AlgebraicNumber, MPoly, Poly, Rational};
use orbitlab_core::localdyn::polydisk::components_at_radius;
use orbitlab_core::localdyn::{
    build_arc_auto, dml_decide, find_good_prime, invariant_polydisk, is_reduced_triangular, ArcFlow, ClassKind,
};
use orbitlab_core::padic::PadicElement;
use orbitlab_core::projdyn::{FixedPointData, MapSpec, P1Map, P2Map, ProjPoint};
use proptest::prelude::*;

const M: i64 = 20;
const N: usize = 10;

fn poly_map() -> impl Strategy<Value = Vec<i64>> {
    prop_oneof![
        (-4i64..4, 1i64..3).prop_map(|(c, a)| vec![c, 0, a]),
        (-4i64..4, -3i64..4, 1i64..3).prop_map(|(c, b, a)| vec![c, b, a]),
        (-4i64..4, -3i64..4).prop_filter("nonconstant", |(_, b)| *b != 0).prop_map(|(c, b)| vec![c, b]),
    ]
}

fn arc_for(c: &[i64], x0: i64) -> Option<(MapSpec, ProjPoint, ArcFlow)> {
    let f = MapSpec::P1(P1Map::polynomial(&Poly::from_ints(c)).unwrap());
    let x = ProjPoint::p1_rat(int(x0));
    let r = find_good_prime(&f, &x, 3, 50).ok()?;
    let (arc, _) = build_arc_auto(&f, &r, &x, M).ok()?;
    Some((f, x, arc))
}

fn pe(p: u64, n: i64) -> PadicElement {
    PadicElement::from_int(p, n, M + 5)
}

/// Exact orbit f^n(x0), n = 0..=N, and the indices where every h vanishes.
fn brute_hits(c: &[i64], x0: i64, z: &[Poly]) -> Vec<u64> {
    let f = Poly::from_ints(c);
    let mut v = int(x0);
    let mut out = vec![];
    for n in 0..=N {
        if z.iter().all(|h| h.eval(&v).is_zero()) {
            out.push(n as u64);
        }
        v = f.eval(&v);
    }
    out
}

fn orbit_point(c: &[i64], x0: i64, k: usize) -> Rational {
    let f = Poly::from_ints(c);
    (0..k).fold(int(x0), |v, _| f.eval(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_laws(c in poly_map(), x0 in -3i64..4, s in 0i64..4, t in 0i64..4) {
        let Some((_, _, arc)) = arc_for(&c, x0) else { return Ok(()) };
        let p = arc.prime;
        for (j, cls) in arc.classes.iter().enumerate() {
            let z = cls.start.clone();
            prop_assert!(arc.flow(&pe(p, 0), &z).unwrap().eq_at_prec(&z.with_prec(M)));
            for n in 1..=5usize {
                let got = arc.flow(&pe(p, n as i64), &z).unwrap();
                prop_assert!(got.eq_at_prec(&arc.iterate_class(j, n).with_prec(M)));
            }
            let inner = arc.flow(&pe(p, t), &z).unwrap();
            let lhs = arc.flow(&pe(p, s + t), &z).unwrap();
            let rhs = arc.flow(&pe(p, s), &inner.lift_to(M + 5)).unwrap();
            prop_assert!(lhs.eq_at_prec(&rhs));
        }
    }

    #[test]
    fn dml_matches_brute_force(c in poly_map(), x0 in -3i64..4, k in 0usize..6, shift in -2i64..3) {
        let Some((f, x, arc)) = arc_for(&c, x0) else { return Ok(()) };
        // h vanishes at f^k(x) when shift = 0
        let target = orbit_point(&c, x0, k) + int(shift);
        let h = Poly::new(vec![-target, int(1)]);
        let z = [h];
        let v = dml_decide(&f, &x, &z, &arc, N).unwrap();
        let expect = brute_hits(&c, x0, &z);
        let covered = |n: u64| v.progressions.iter().any(|pr| n >= pr.a && (n - pr.a) % pr.b == 0);
        let mut got: Vec<u64> = (0..=N as u64).filter(|&n| covered(n)).collect();
        got.extend(&v.hits);
        got.sort();
        got.dedup();
        prop_assert_eq!(got, expect);
        for cls in &v.classes {
            if let ClassKind::Finite { strassmann_bound, hits } = &cls.kind {
                prop_assert!(hits.len() <= *strassmann_bound);
            }
        }
    }

    #[test]
    fn wandering_orbits_meet_points_finitely(c in poly_map(), x0 in -3i64..4, k in 0usize..4) {
        // a point of infinite orbit: the return set to a point is finite
        prop_assume!(c.len() == 3 && c[2] != 0);
        let orbit: Vec<Rational> = (0..8).map(|i| orbit_point(&c, x0, i)).collect();
        let distinct = orbit.iter().enumerate().all(|(i, a)| orbit[..i].iter().all(|b| b != a));
        prop_assume!(distinct);
        let Some((f, x, arc)) = arc_for(&c, x0) else { return Ok(()) };
        let h = Poly::new(vec![-orbit[k].clone(), int(1)]);
        let v = dml_decide(&f, &x, &[h], &arc, N).unwrap();
        prop_assert!(v.progressions.is_empty());
        prop_assert_eq!(v.hits, vec![k as u64]);
    }

    #[test]
    fn polydisk_is_a_self_map(
        lin in (-4i64..5, -4i64..5, -4i64..5),
        lower in any::<bool>(),
        quad in prop::collection::vec(-4i64..5, 6),
        pi in 0usize..3,
        pts in prop::collection::vec((-30i64..30, -30i64..30), 4),
    ) {
        let p = [3u64, 5, 7][pi];
        let pp = p as i64;
        // triangular linear part with eigenvalues divisible by p
        let (a, b, d) = (lin.0 * pp, lin.1, lin.2 * pp);
        let (x, y) = (MPoly::var(2, 0), MPoly::var(2, 1));
        let k = |n: i64| MPoly::constant(2, int(n));
        let q = |o: usize| k(quad[o]).mul(&x.pow(2)).add(&k(quad[o + 1]).mul(&x.mul(&y))).add(&k(quad[o + 2]).mul(&y.pow(2)));
        let (g0, g1) = if lower {
            (k(a).mul(&x).add(&q(0)), k(b).mul(&x).add(&k(d).mul(&y)).add(&q(3)))
        } else {
            (k(a).mul(&x).add(&k(b).mul(&y)).add(&q(0)), k(d).mul(&y).add(&q(3)))
        };
        let hz = |g: &MPoly| MPoly::from_terms(3, g.terms().map(|(m, c)| (vec![m[0], m[1], 2 - m[0] - m[1]], c.clone())));
        let z2 = MPoly::from_terms(3, [(vec![0, 0, 2], int(1))]);
        let Ok(f) = P2Map::new([hz(&g0), hz(&g1), z2], 2) else { return Ok(()) };
        let f = MapSpec::P2(f);
        let zero = AlgebraicNumber::from_int(0);
        let o = FixedPointData {
            point: ProjPoint::p2([zero.clone(), zero, AlgebraicNumber::from_int(1)]).unwrap(),
            multipliers: vec![],
            multiplicity: 1,
            degenerate: false,
            embeddings: vec![0],
        };
        let r = invariant_polydisk(&f, &o, p, M).unwrap();
        prop_assert!(is_reduced_triangular(&r.components, p));
        if r.r > 0 {
            prop_assert!(!is_reduced_triangular(&components_at_radius(&r, r.r - 1), p));
        }
        // integral points go to integral points, and the reduction is the stated one
        for (u, w) in pts {
            let pt = [int(u), int(w)];
            for g in &r.components {
                prop_assert!(valuation(&g.eval(&pt), p).is_none_or(|v| v >= 0));
            }
        }
        prop_assert_eq!(r.reduction[1][0], 0);
        for s in [&r.map.f1, &r.map.f2] {
            let g = s.gauss_norm();
            prop_assert!(g.val.is_none_or(|v| v >= 0));
        }
    }
}
