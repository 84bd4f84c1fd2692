use proptest::prelude::*;

use confine_core::aim::{self, AimOptions};
use confine_core::bounds;
use confine_core::model::{degeneracy_orbit, Radius, SystemSpec};
use confine_core::numerics::{isolate_real_roots, BigReal, EPoly, MPoly, Precision, Var};
use confine_core::quasiexact;

fn prec() -> Precision {
    Precision::digits(50)
}

fn real(x: f64) -> BigReal {
    BigReal::from_f64(x, prec())
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-20i64..=20, 1..8)
}

fn mpoly() -> impl Strategy<Value = MPoly> {
    let term = (-9i128..=9, 0u32..3, 0u32..3, 0u32..3, 0u32..2);
    prop::collection::vec(term, 0..6).prop_map(|terms| {
        let mut p = MPoly::zero();
        for (c, i, j, m, n) in terms {
            let mut t = MPoly::constant(c);
            for (v, e) in [(Var::A, i), (Var::B, j), (Var::K, m), (Var::R, n)] {
                for _ in 0..e {
                    t = &t * &MPoly::var(v);
                }
            }
            p = &p + &t;
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horner_derivative_matches_formal_derivative(c in coeffs(), x in -3.0f64..3.0) {
        let p = EPoly::from_i64s(&c, prec());
        let x = real(x);
        let (v, dv) = p.eval_with_derivative(&x);
        let tol = BigReal::pow10(-40, prec()) * (BigReal::one(prec()) + p.eval_abs(&x));
        prop_assert!((&v - &p.eval(&x)).abs() <= tol);
        let formal = p.derivative().eval(&x);
        prop_assert!((&dv - &formal).abs() <= BigReal::pow10(-40, prec()) * (BigReal::one(prec()) + formal.abs()));
    }

    #[test]
    fn product_of_linear_factors_has_those_roots(set in prop::collection::btree_set(-12i64..=12, 1..6)) {
        let roots: Vec<i64> = set.into_iter().collect();
        let mut p = EPoly::from_i64s(&[1], prec());
        for &r in &roots {
            p = p.mul_linear(&BigReal::from_i64(r, prec()));
        }
        let found = isolate_real_roots(&p, &real(-13.5), &real(13.5), 30).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for (f, r) in found.iter().zip(&roots) {
            prop_assert!((&f.value - &BigReal::from_i64(*r, prec())).abs() < BigReal::pow10(-28, prec()));
            prop_assert!(!f.multiple);
        }
    }

    #[test]
    fn mpoly_display_parses_back(p in mpoly()) {
        let text = p.to_string();
        let back: MPoly = text.parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn mpoly_eval_is_a_ring_map(p in mpoly(), q in mpoly(), x in prop::array::uniform4(-2i64..=2)) {
        let v: Vec<BigReal> = x.iter().map(|&t| BigReal::from_i64(t, prec())).collect();
        let at = |m: &MPoly| m.eval([&v[0], &v[1], &v[2], &v[3]]);
        prop_assert_eq!(at(&(&p * &q)), &at(&p) * &at(&q));
        prop_assert_eq!(at(&(&p - &q)), &at(&p) - &at(&q));
    }

    #[test]
    fn config_round_trips(
        a in 0i32..100,
        b in 1u32..40,
        d in 2u32..9,
        l in 0u32..4,
        r in prop::option::of(1u32..80),
        digits in 1u32..40,
    ) {
        let a = format!("{}", f64::from(a) / 8.0);
        let b = format!("{}", f64::from(b) / 4.0);
        let spec = match r {
            Some(r) => SystemSpec::hard(&a, &b, d, l, &format!("{}", f64::from(r) / 16.0)),
            None => SystemSpec::soft(&a, &b, d, l),
        }
        .unwrap()
        .with_digits(digits);
        let text = spec.to_config_string();
        let back = SystemSpec::from_config_str(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(back.to_config_string(), text);
    }

    #[test]
    fn orbits_share_k(d in 2u32..12, l in 0u32..6) {
        let orbit = degeneracy_orbit(d, l);
        prop_assert!(orbit.contains(&(d, l)));
        for (dp, lp) in orbit {
            prop_assert!(dp >= 2);
            prop_assert_eq!(dp + 2 * lp, d + 2 * l);
        }
    }
}

proptest! {
    // each case runs a few AIM solves
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bounds_bracket_the_ground_state(a in 0.0f64..4.0, b in 0.3f64..3.0, d in 2u32..7) {
        let spec = SystemSpec::new(real(a), real(b), d, 0, Radius::Infinite).unwrap();
        let e = aim::find_eigenvalues(&spec, &[0], 12, &AimOptions::for_digits(12)).unwrap()[0].energy.to_f64();
        let rep = bounds::bounds_for_subspace(&spec, 0).unwrap();
        prop_assert!(rep.local_energy_lower.to_f64() <= e + 1e-9);
        prop_assert!(e <= rep.gauss_upper.to_f64() + 1e-9);
        prop_assert!(e <= rep.envelope_upper.to_f64() + 1e-9);
        if let Some(h) = rep.heisenberg_lower {
            prop_assert!(h.to_f64() <= e + 1e-9);
        }
    }

    #[test]
    fn envelope_stays_above_excited_levels(a in 0.1f64..4.0, b in 0.3f64..3.0, d in 2u32..6, n in 1u32..4) {
        let spec = SystemSpec::new(real(a), real(b), d, 0, Radius::Infinite).unwrap();
        let e = aim::find_eigenvalues(&spec, &[n], 12, &AimOptions::for_digits(12)).unwrap()[0].energy.to_f64();
        let env = bounds::envelope_upper(&spec, n).unwrap().to_f64();
        prop_assert!(e <= env + 1e-9, "E = {e}, envelope {env}");
    }

    #[test]
    fn polynomial_solutions_satisfy_the_equation(k in 2u32..8, nprime in 1u32..5, b in 0.25f64..4.0) {
        let b = real(b);
        for s in quasiexact::soft_solutions(nprime, k, &b).unwrap() {
            prop_assert_eq!(&s.energy, &b.mul_i64(i64::from(2 * nprime + k)));
            for r in ["0.3", "1.1", "2.7"] {
                let r = BigReal::parse(r, s.a.prec()).unwrap();
                prop_assert!(s.residual(&r).unwrap().abs() < BigReal::pow10(-30, prec()));
            }
        }
    }
}
