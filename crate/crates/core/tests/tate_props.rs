use orbitlab_core::exactnum::rational::{int, rat};
use orbitlab_core::padic::PadicElement;
use orbitlab_core::tate::{
    attractor_psi, compose, psi_is_identity_on_attractor, rho_f_seminorm, semiconjugacy_residual, PolydiskMap, TateSeries2,
    GUARD,
};
use proptest::prelude::*;

const P: u64 = 3;
const T: u32 = 8;
const M: i64 = 24;

/// Series with integer coefficients times 3^shift.
fn series(max_terms: usize, shift: i64) -> impl Strategy<Value = TateSeries2> {
    prop::collection::vec((0u32..4, 0u32..4, -20i64..20), 1..=max_terms).prop_map(move |ts| {
        let ts: Vec<(u32, u32, i64)> = ts.into_iter().map(|(i, j, c)| (i, j, c * 3i64.pow(shift as u32))).collect();
        TateSeries2::from_int_terms(P, T, M, &ts)
    })
}

fn exp(s: &TateSeries2) -> i64 {
    s.gauss_norm().val.unwrap_or(M)
}

fn closed_form() -> PolydiskMap {
    let c = TateSeries2::constant(P, T, M, &int(3));
    PolydiskMap::fixed_line(c.clone(), c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gauss_norm_is_ultrametric(s in series(5, 0), t in series(5, 1)) {
        prop_assert!(exp(&s.mul(&t)) >= exp(&s) + exp(&t));
        prop_assert!(exp(&s.add(&t)) >= exp(&s).min(exp(&t)));
    }

    #[test]
    fn seminorm_sequence_is_monotone(pp in series(3, 1), qq in series(3, 1), s in series(5, 0)) {
        let Ok(f) = PolydiskMap::fixed_line(pp, qq) else { return Ok(()) };
        let r = rho_f_seminorm(&f, &s, 10).unwrap();
        let e: Vec<i64> = r.norms.iter().map(|g| g.val.unwrap_or(g.prec)).collect();
        prop_assert!(e.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(r.monotone);
    }

    #[test]
    fn pullbacks_of_y_contract(pp in series(3, 1), qq in series(3, 1)) {
        let q_exp = exp(&qq);
        let Ok(f) = PolydiskMap::fixed_line(pp, qq) else { return Ok(()) };
        let mut cur = TateSeries2::y(P, T, M);
        for n in 1..=20i64 {
            cur = compose(&f, &cur).unwrap();
            prop_assert!(exp(&cur) >= (n * q_exp).min(M));
        }
    }

    #[test]
    fn closed_form_fibers_are_lines(x in -500i64..500, y in -500i64..500) {
        let a = attractor_psi(&closed_form()).unwrap();
        let (px, py) = (PadicElement::from_int(P, x, M), PadicElement::from_int(P, y, M));
        let expect = PadicElement::from_rational(P, &(int(x) - rat(3, 2) * int(y)), M);
        let got = a.psi_x.eval(&px, &py);
        prop_assert!((&got - &expect).val_or_prec() >= M - GUARD);
        // the whole line x - 3/2 y = c maps to c
        let c = int(x) - rat(3, 2) * int(y);
        let on_line = PadicElement::from_rational(P, &(c.clone() + rat(3, 2) * int(y + 7)), M);
        let img = a.psi_x.eval(&on_line, &PadicElement::from_int(P, y + 7, M));
        prop_assert!((&img - &PadicElement::from_rational(P, &c, M)).val_or_prec() >= M - GUARD);
    }

    #[test]
    fn perturbed_psi_is_rejected(i in 0u32..4, j in 0u32..4, k in 0i64..(M - GUARD)) {
        let f = closed_form();
        let a = attractor_psi(&f).unwrap();
        let delta = TateSeries2::from_terms(P, T, M, &[(i, j, int(3).pow(k as i32))]);
        let psi = a.psi_x.add(&delta);
        let residual = semiconjugacy_residual(&f, &psi, 0).unwrap();
        let residual_ok = residual.val.is_none_or(|v| v >= M - GUARD);
        prop_assert!(!residual_ok || !psi_is_identity_on_attractor(&psi));
    }
}
