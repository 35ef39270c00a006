use orbitlab_core::exactnum::rational::rat;
use orbitlab_core::exactnum::{AlgebraicNumber, MPoly, Poly};
use orbitlab_core::projdyn::{degrees, evaluate, fixed_points, preimage_chain, MapSpec, P1Map, P2Map, ProjPoint};
use proptest::prelude::*;

fn p1_map() -> impl Strategy<Value = P1Map> {
    (prop::collection::vec(-6i64..6, 3), prop::collection::vec(-6i64..6, 1..3))
        .prop_filter_map("degenerate", |(n, d)| P1Map::rational(&Poly::from_ints(&n), &Poly::from_ints(&d)).ok())
        .prop_filter("degree 2", |f| f.degree() == 2)
}

fn quadratic() -> impl Strategy<Value = P1Map> {
    (1i64..4, -8i64..8, -8i64..8).prop_map(|(a, b, c)| P1Map::polynomial(&Poly::from_ints(&[c, b, a])).unwrap())
}

fn q(n: i64) -> AlgebraicNumber {
    AlgebraicNumber::from_int(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evaluation_ignores_scaling(c in prop::collection::vec(-5i64..5, 9), x in (-9i64..9, -9i64..9, 1i64..9), l in 1i64..7) {
        // (X^2 + c0 YZ, Y^2 + c1 XZ, Z^2 + c2 XY) is never degenerate at a point with Z != 0 and all coordinates small
        let v = |i| MPoly::var(3, i);
        let k = |i: usize| MPoly::constant(3, rat(c[i], 1));
        let forms = [
            v(0).pow(2).add(&k(0).mul(&v(1)).mul(&v(2))),
            v(1).pow(2).add(&k(1).mul(&v(0)).mul(&v(2))),
            v(2).pow(2).add(&k(2).mul(&v(0)).mul(&v(1))),
        ];
        let Ok(f) = P2Map::new(forms, 2) else { return Ok(()) };
        let f = MapSpec::P2(f);
        let p = ProjPoint::p2([q(x.0), q(x.1), q(x.2)]).unwrap();
        let s = ProjPoint::p2([q(l * x.0), q(l * x.1), q(l * x.2)]).unwrap();
        let (a, b) = (evaluate(&f, &p), evaluate(&f, &s));
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn fixed_points_count_and_are_fixed(f in p1_map()) {
        let spec = MapSpec::P1(f.clone());
        let fps = fixed_points(&spec).unwrap();
        prop_assert_eq!(fps.iter().map(|p| p.multiplicity).sum::<usize>(), f.degree() + 1);
        for p in &fps {
            prop_assert_eq!(&evaluate(&spec, &p.point).unwrap(), &p.point);
        }
    }

    #[test]
    fn multiplier_chain_rule(f in p1_map()) {
        let g = f.iterate(2);
        for p in fixed_points(&MapSpec::P1(f.clone())).unwrap() {
            let m = f.multiplier(&p.point).unwrap();
            prop_assert_eq!(g.multiplier(&p.point).unwrap(), &m * &m);
        }
    }

    #[test]
    fn preimage_degrees_divide_factorial(f in quadratic(), x0 in -5i64..5) {
        let chain = preimage_chain(&f, &ProjPoint::p1_rat(rat(x0, 1)), 3, 64).unwrap();
        let fact = 2usize;
        let mut prev = 1;
        for link in &chain.links {
            prop_assert_eq!(link.field_degree % prev, 0);
            prop_assert_eq!(fact % (link.field_degree / prev), 0);
            prev = link.field_degree;
        }
    }

    #[test]
    fn split_degrees_multiply(f in quadratic(), g in p1_map(), h in quadratic()) {
        let a = MapSpec::split(vec![f.clone(), g.clone()]).unwrap();
        let b = MapSpec::split(vec![h.clone(), f.iterate(2)]).unwrap();
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(degrees(&ab).d_f, degrees(&a).d_f * degrees(&b).d_f);
    }
}
