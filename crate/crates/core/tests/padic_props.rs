use num_bigint::BigInt;
use num_traits::Zero;
use orbitlab_core::exactnum::rational::valuation;
use orbitlab_core::exactnum::{factor_poly_q, AlgebraicNumber, NumberField, Poly, Rational};
use orbitlab_core::padic::newton::newton_polygon;
use orbitlab_core::padic::places::places_above;
use orbitlab_core::padic::series::{strassmann_count, PadicSeries1, StrassmannCount, TailBound};
use orbitlab_core::padic::{eval_poly, hensel_root, padic_exp, padic_log, PadicElement};
use proptest::prelude::*;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn root_valuations(p: &Poly, prime: u64) -> Vec<(Rational, usize)> {
    let np = newton_polygon(p, prime).unwrap();
    let mut v: Vec<(Rational, usize)> = vec![];
    for (s, len) in np.root_valuations() {
        v.extend(std::iter::repeat_n((s, 1), len));
    }
    v.extend(std::iter::repeat_n((Rational::from_integer(BigInt::from(1_000_000)), 1), np.zero_roots));
    v.sort();
    v
}

/// Zeros in Z_p summed over residue discs r + pZ_p: the Weierstrass degree of
/// t -> f(r + p t), i.e. the last index attaining the minimal valuation.
fn disc_count(f: &Poly, p: u64) -> usize {
    (0..p as i64)
        .map(|r| {
            let g = f.compose(&Poly::from_ints(&[r, p as i64]));
            let vals: Vec<Option<i64>> = g.coeffs().iter().map(|c| valuation(c, p)).collect();
            let m = vals.iter().flatten().min().copied();
            vals.iter().rposition(|v| *v == m).unwrap_or(0)
        })
        .sum()
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-60i64..60, 1..=max_deg + 1).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newton_slopes_are_additive(a in nonzero_poly(3), b in nonzero_poly(3), pi in 0usize..4) {
        let (pa, pb) = (Poly::from_ints(&a), Poly::from_ints(&b));
        let prime = PRIMES[pi];
        let mut union = root_valuations(&pa, prime);
        union.extend(root_valuations(&pb, prime));
        union.sort();
        prop_assert_eq!(root_valuations(&(&pa * &pb), prime), union);
    }

    #[test]
    fn hensel_root_is_a_root(c in prop::collection::vec(-30i64..30, 2..6), pi in 0usize..4, m in 5i64..40) {
        let f = Poly::from_ints(&c);
        prop_assume!(f.degree().unwrap_or(0) >= 1);
        let p = PRIMES[pi];
        let df = f.derivative();
        let modp = |x: &Rational| (x.to_integer() % BigInt::from(p) + BigInt::from(p)) % BigInt::from(p);
        let seed = (0..p).find(|&r| {
            let r = Rational::from_integer(BigInt::from(r));
            modp(&f.eval(&r)).is_zero() && !modp(&df.eval(&r)).is_zero()
        });
        prop_assume!(seed.is_some());
        let root = hensel_root(&f, p, &BigInt::from(seed.unwrap()), m).unwrap();
        prop_assert!(eval_poly(&f, &root).val_or_prec() >= m);
    }

    #[test]
    fn strassmann_counts_constructed_zeros(
        roots in prop::collection::vec(-20i64..20, 0..3),
        unit in prop::collection::vec(-5i64..5, 1..3),
        pi in 0usize..4,
    ) {
        // prod (x - a_i) times 1 + p h(x); the second factor is a unit on Z_p
        let p = PRIMES[pi];
        let mut f = Poly::one();
        for a in &roots {
            f = &f * &Poly::from_ints(&[-a, 1]);
        }
        let mut h: Vec<i64> = unit.iter().map(|c| c * p as i64).collect();
        h[0] += 1;
        f = &f * &Poly::from_ints(&h);
        prop_assume!(f.degree().unwrap_or(0) <= 4);
        let prec = 30;
        let coeffs: Vec<PadicElement> = f.coeffs().iter().map(|c| PadicElement::from_rational(p, c, prec)).collect();
        let count = strassmann_count(&PadicSeries1::new(p, coeffs, TailBound::Zero)).unwrap();
        prop_assert_eq!(count, StrassmannCount::Zeros(roots.len()));
        prop_assert_eq!(disc_count(&f, p), roots.len());
    }

    #[test]
    fn sum_of_local_degrees(c in prop::collection::vec(-9i64..9, 2..4), pi in 0usize..4) {
        let mut c = c;
        c.push(1);
        let f = Poly::from_ints(&c);
        let fs = factor_poly_q(&f);
        prop_assume!(fs.len() == 1 && fs[0].1 == 1);
        let k = NumberField::new(&f, "t").unwrap();
        if let Ok(pl) = places_above(&k, PRIMES[pi], &[AlgebraicNumber::from_int(1)], 40) {
            prop_assert_eq!(pl.iter().map(|q| q.e * q.f).sum::<usize>(), k.degree());
        }
    }

    #[test]
    fn log_exp_round_trip(k in -10_000i64..10_000, pi in 0usize..4, m in 12i64..40) {
        let p = PRIMES[pi];
        let shift = if p == 2 { 4 } else { p as i64 };
        let u = PadicElement::from_int(p, 1 + shift * k, m);
        let back = padic_exp(&padic_log(&u).unwrap()).unwrap();
        let guard = 4;
        prop_assert!(back.with_prec(m - guard).eq_at_prec(&u.with_prec(m - guard)));
    }
}
