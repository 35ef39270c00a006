use num_traits::Zero;
use orbitlab_core::classify::{classify_type, conjugate, critical_orbits, mobius, MapType, DEFAULT_N_BOUND};
use orbitlab_core::exactnum::rational::{int, rat};
use orbitlab_core::exactnum::{MPoly, Poly, Rational};
use orbitlab_core::projdyn::{MapSpec, P1Map};
use proptest::prelude::*;

fn rational_map() -> impl Strategy<Value = P1Map> {
    (2usize..4)
        .prop_flat_map(|d| (prop::collection::vec(-5i64..6, d + 1), prop::collection::vec(-5i64..6, 1..=d + 1)))
        .prop_filter_map("degenerate", |(n, m)| P1Map::rational(&Poly::from_ints(&n), &Poly::from_ints(&m)).ok())
        .prop_filter("degree >= 2", |f| f.degree() >= 2)
}

/// Maps of every type: powers, Chebyshev, a flexible Lattès map, and unicritical polynomials.
fn named_map() -> impl Strategy<Value = P1Map> {
    let lattes = P1Map::rational(&Poly::from_ints(&[0, -8, 0, 0, 1]), &Poly::from_ints(&[4, 0, 0, 4])).unwrap();
    prop_oneof![
        (2usize..4, prop::bool::ANY).prop_map(|(d, neg)| {
            let mut c = vec![0; d + 1];
            c[d] = if neg { -1 } else { 1 };
            P1Map::polynomial(&Poly::from_ints(&c)).unwrap()
        }),
        Just(P1Map::polynomial(&Poly::from_ints(&[-2, 0, 1])).unwrap()),
        Just(P1Map::polynomial(&Poly::from_ints(&[0, -3, 0, 4])).unwrap()),
        Just(lattes),
        (-3i64..3).prop_map(|c| P1Map::polynomial(&Poly::from_ints(&[c, 0, 1])).unwrap()),
    ]
}

fn mobius_map() -> impl Strategy<Value = P1Map> {
    (-3i64..4, -3i64..4, -3i64..4, -3i64..4).prop_filter_map("singular", |(a, b, c, d)| mobius(int(a), int(b), int(c), int(d)).ok())
}

/// Parse a displayed P1Map, "p" or "(p) / (q)" in the variable x.
fn parse_map(s: &str) -> (MPoly, MPoly) {
    let parse = |t: &str| MPoly::parse(t.trim().trim_start_matches('(').trim_end_matches(')'), &["x"]).unwrap();
    match s.split_once(") / (") {
        Some((n, d)) => (parse(n), parse(d)),
        None => (parse(s), MPoly::constant(1, int(1))),
    }
}

fn apply(m: &(MPoly, MPoly), t: &Rational) -> Option<Rational> {
    let d = m.1.eval(std::slice::from_ref(t));
    (!d.is_zero()).then(|| m.0.eval(std::slice::from_ref(t)) / d)
}

fn apply_map(f: &P1Map, t: &Rational) -> Option<Rational> {
    let d = f.den().eval(t);
    (!d.is_zero()).then(|| f.num().eval(t) / d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn riemann_hurwitz(f in rational_map()) {
        let d = f.degree();
        let cd = critical_orbits(&MapSpec::P1(f), 8).unwrap();
        prop_assert_eq!(cd.ramification_total, 2 * d - 2);
    }

    #[test]
    fn type_survives_iteration(f in named_map()) {
        let t = classify_type(&MapSpec::P1(f.clone()), DEFAULT_N_BOUND).unwrap();
        let t2 = classify_type(&MapSpec::P1(f.iterate(2)), DEFAULT_N_BOUND).unwrap();
        prop_assert_eq!(t.kind, t2.kind);
        prop_assert_eq!(t.pcf, t2.pcf);
    }

    #[test]
    fn type_survives_conjugation(f in named_map(), ms in prop::collection::vec(mobius_map(), 5)) {
        let t = classify_type(&MapSpec::P1(f.clone()), DEFAULT_N_BOUND).unwrap();
        for m in &ms {
            let g = conjugate(&f, m);
            let tg = classify_type(&MapSpec::P1(g), DEFAULT_N_BOUND).unwrap();
            prop_assert_eq!(t.kind, tg.kind);
            prop_assert_eq!(t.pcf, tg.pcf);
        }
    }

    #[test]
    fn monomial_witnesses_semiconjugate(f in named_map(), m in mobius_map()) {
        let g = conjugate(&f, &m);
        let v = classify_type(&MapSpec::P1(g.clone()), DEFAULT_N_BOUND).unwrap();
        if v.kind != MapType::Monomial {
            return Ok(());
        }
        let w = v.witness.unwrap();
        // exceptional points are rational here, so an explicit pair is found
        prop_assert_eq!(w.kind.as_str(), "semiconjugacy");
        prop_assert!(w.verified);
        let pi = parse_map(w.pi.as_deref().unwrap());
        let h = parse_map(w.h.as_deref().unwrap());
        let mut checked = 0;
        for k in -6i64..=6 {
            let t = rat(k, 5);
            let (Some(ht), Some(pt)) = (apply(&h, &t), apply(&pi, &t)) else { continue };
            let (Some(lhs), Some(rhs)) = (apply_map(&g, &pt), apply(&pi, &ht)) else { continue };
            prop_assert_eq!(lhs, rhs);
            checked += 1;
        }
        prop_assert!(checked >= 5);
    }
}
