mod support;

use barbalat_core::certificates::{
    lemma2_certificate, optimized_window_certificate, CertificateOptions, DecayCertificate, WindowSearch,
};
use barbalat_core::interval::Interval;
use barbalat_core::modulus::{certified_modulus, global_modulus, local_oscillation, ModulusForm};
use barbalat_core::tail_integral::{integrate, tail_supremum_grid, HorizonPolicy};
use barbalat_core::{evaluate, FunctionSpec};
use proptest::prelude::*;

use support::{eval_terms, spec_of, terms};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn evaluation_matches_terms(ts in terms(), x in 0.0..60.0f64) {
        let spec = spec_of(&ts);
        let want = eval_terms(&ts, x);
        prop_assert!((evaluate(&spec, x).unwrap() - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn enclosures_contain_values(ts in terms(), a in 0.0..30.0f64, w in 1e-6..5.0f64, u in 0.0..1.0f64) {
        let FunctionSpec::ClosedForm { closed_form, .. } = spec_of(&ts) else { unreachable!() };
        let iv = closed_form.enclose(Interval::new(a, a + w));
        let x = a + u * w;
        prop_assert!(iv.contains(closed_form.eval(x)), "{iv:?} misses f({x})");
    }

    #[test]
    fn integrals_are_additive(ts in terms(), a in 0.0..10.0f64, d1 in 0.0..10.0f64, d2 in 0.0..10.0f64) {
        let spec = spec_of(&ts);
        let (b, c) = (a + d1, a + d1 + d2);
        let whole = integrate(&spec, a, c, 1e-12).unwrap();
        let parts = integrate(&spec, a, b, 1e-12).unwrap() + integrate(&spec, b, c, 1e-12).unwrap();
        prop_assert!((whole - parts).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn tail_supremum_dominates_partial_integrals(ts in terms(), t in 0.0..8.0f64, ss in prop::collection::vec(0.0..50.0f64, 8)) {
        let spec = spec_of(&ts);
        let s = tail_supremum_grid(&spec, &[t], 1e-9, HorizonPolicy::default()).unwrap()[0];
        prop_assert!(s.upper() >= s.value);
        for d in ss {
            let v = integrate(&spec, t, t + d, 1e-12).unwrap().abs();
            prop_assert!(v <= s.upper() * (1.0 + 1e-9) + 1e-12, "|int_t^(t+{d})| = {v} > {}", s.upper());
        }
    }

    #[test]
    fn modulus_tables_are_monotone_and_dominate_samples(ts in terms(), x in 0.0..20.0f64) {
        let spec = spec_of(&ts);
        let deltas: Vec<f64> = (0..40).map(|k| 1e-4 * 1.35f64.powi(k)).collect();
        let m = global_modulus(&spec, &deltas).unwrap();
        let ModulusForm::Table { table } = &m.form else { unreachable!() };
        prop_assert!(table.windows(2).all(|w| w[1].1 >= w[0].1));
        for &d in &deltas {
            let sampled = (evaluate(&spec, x + d).unwrap() - evaluate(&spec, x).unwrap()).abs();
            prop_assert!(sampled <= m.eval(d) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn local_oscillation_brackets(ts in terms(), a in 0.0..20.0f64, w in 0.1..10.0f64, d in 1e-3..2.0f64) {
        let spec = spec_of(&ts);
        let r = local_oscillation(&spec, a, a + w, d, 64).unwrap();
        prop_assert!(r.value <= r.upper_bound * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn certificates_dominate(ts in terms()) {
        let spec = spec_of(&ts);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 2.0).collect();
        let opts = CertificateOptions::default();
        let l2 = lemma2_certificate(&spec, &certified_modulus(&spec).unwrap(), &grid, &opts).unwrap();
        prop_assert!(l2.all_satisfied());
        let opt = optimized_window_certificate(&spec, &grid, &WindowSearch::default(), &opts).unwrap();
        prop_assert!(opt.all_satisfied());
        for (a, b) in opt.grid.iter().zip(&l2.grid) {
            prop_assert!(a.bound <= b.bound * (1.0 + 1e-12) + 1e-15, "t={}: {} > {}", a.t, a.bound, b.bound);
        }
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn certificates_round_trip(ts in terms()) {
        let spec = spec_of(&ts);
        let grid = [0.0, 0.5, 3.0];
        let c = lemma2_certificate(&spec, &certified_modulus(&spec).unwrap(), &grid, &CertificateOptions::default()).unwrap();
        let back: DecayCertificate = serde_json::from_str(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn specs_round_trip(ts in terms()) {
        let spec = spec_of(&ts);
        let text = spec.to_json_string();
        let back = FunctionSpec::from_json_str(&text).unwrap();
        prop_assert_eq!(back.to_json_string(), text);
    }
}
