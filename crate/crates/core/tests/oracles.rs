//! Reference values computed independently in this file, then compared
//! against the library.

mod support;

use barbalat_core::certificates::{holder_certificate, lemma2_certificate, sobolev_certificate, CertificateOptions};
use barbalat_core::modulus::{fit_holder, local_oscillation, ModulusEstimate};
use barbalat_core::norms::{lp_norm, lq_norm_derivative, sobolev_report};
use barbalat_core::numeric::CompensatedSum;
use barbalat_core::ode_demo::simulate;
use barbalat_core::quadrature;
use barbalat_core::tail_integral::{
    improper_integral, integrate, tail_supremum, tail_supremum_oracle, HorizonPolicy, IntegralStatus,
};
use barbalat_core::{evaluate, make_incomparability_witness, CounterexampleParams, FunctionSpec};

use support::{damped_sine, exp_neg};

const SERIES_C: f64 = 0.471_404_520_791_031_7; // sqrt(2) / 3

/// `(sqrt 2 / 3) sum_{n=2}^{N} (-1)^n n^{-1/2}`.
fn series(big_n: u64) -> f64 {
    (2..=big_n)
        .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * SERIES_C / (n as f64).sqrt())
        .collect::<CompensatedSum>()
        .value()
}

/// Bump `n` of the default train, straight from the definition.
fn bump(n: u64, x: f64) -> f64 {
    let m = 0.5 * (n as f64).powf(-1.0 / 3.0);
    let u = x - n as f64;
    let s = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if u < 0.0 || u >= 2.0 * m {
        0.0
    } else if u < m {
        s * u.sqrt()
    } else {
        s * (2.0 * m - u).sqrt()
    }
}

#[test]
fn sqrt2_over_3_constant() {
    assert!((SERIES_C - 2f64.sqrt() / 3.0).abs() < 1e-16);
}

#[test]
fn bump_areas_match_quadrature() {
    let p = CounterexampleParams::default();
    for n in [2u64, 3, 7, 50, 1000] {
        let m = p.half_width(n);
        let q = quadrature::integrate(|x| bump(n, x), n as f64, n as f64 + 2.0 * m, 1e-13).unwrap();
        assert!((q.value - p.bump_area(n) * CounterexampleParams::sign(n)).abs() < 1e-9, "n={n}");
        assert!((p.bump_area(n) - SERIES_C / (n as f64).sqrt()).abs() < 1e-14);
    }
}

#[test]
fn counterexample_partial_integrals() {
    let spec = FunctionSpec::counterexample_default();
    for n in [10u64, 100, 1000] {
        let v = integrate(&spec, 0.0, (n + 1) as f64, 1e-12).unwrap();
        assert!((v - series(n)).abs() < 1e-12, "N={n}: {v} vs {}", series(n));
    }
    let third = integrate(&spec, 2.0, 3.0, 1e-10).unwrap();
    assert!((third - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn counterexample_improper_value() {
    let spec = FunctionSpec::counterexample_default();
    let r = improper_integral(&spec, 0.0, 1e-3, HorizonPolicy::default()).unwrap();
    assert_eq!(r.status, IntegralStatus::Converged);
    let end = r.horizon as u64;
    assert!((r.value - series(end - 1)).abs() < 1e-12);
    assert!(r.remainder_bound <= 1e-3);
    // alternating series: the limit lies between consecutive partial sums
    let next = series(end);
    assert!((next - r.value).abs() <= r.remainder_bound * (1.0 + 1e-12));
}

#[test]
fn counterexample_tail_suprema() {
    let spec = FunctionSpec::counterexample_default();
    let s2 = tail_supremum(&spec, 2.0, 1e-9, HorizonPolicy::default()).unwrap();
    assert!((s2.upper() - 1.0 / 3.0).abs() < 1e-14);
    for n in [4u64, 16, 64, 256] {
        let s = tail_supremum(&spec, n as f64, 1e-9, HorizonPolicy::default()).unwrap();
        assert!(s.upper() <= SERIES_C / (n as f64).sqrt() * (1.0 + 1e-12), "n={n}");
    }
    // brute force cumulative extrema
    let oracle = tail_supremum_oracle(&spec, 2.0, 1e-4, 60.0).unwrap();
    assert!((oracle - 1.0 / 3.0).abs() < 1e-3);
}

#[test]
fn exponential_and_damped_sine_tails() {
    for t in [0.0, 1.0, 5.0, 10.0] {
        let s = tail_supremum(&exp_neg(), t, 1e-10, HorizonPolicy::default()).unwrap();
        assert!((s.value - (-t).exp()).abs() < 1e-9);
        assert!(s.upper() >= (-t).exp() * (1.0 - 1e-12));
        let d = tail_supremum(&damped_sine(), t, 1e-10, HorizonPolicy::default()).unwrap();
        let o = tail_supremum_oracle(&damped_sine(), t, 1e-4, t + 40.0).unwrap();
        assert!((d.value - o).abs() < 1e-3, "t={t}: {} vs {o}", d.value);
        assert!(d.upper() + 1e-12 >= d.value);
    }
}

#[test]
fn witness_antiderivative_and_tails() {
    for gamma in [0.6, 0.75, 1.0] {
        let w = make_incomparability_witness(gamma).unwrap();
        let k = 1.0 - gamma;
        let anti = |t: f64| {
            let u = (1.0 + t).ln();
            (1.0 + t).powf(k) * (k * u.sin() - u.cos()) / (k * k + 1.0)
        };
        for (a, b) in [(0.0, 3.0), (2.0, 50.0)] {
            let v = integrate(&w, a, b, 1e-12).unwrap();
            assert!((v - (anti(b) - anti(a))).abs() < 1e-10);
        }
    }
    let w1 = make_incomparability_witness(1.0).unwrap();
    let s = tail_supremum(&w1, 0.0, 1e-9, HorizonPolicy::default()).unwrap();
    assert!((s.value - 2.0).abs() < 1e-12);
    let w = make_incomparability_witness(0.75).unwrap();
    assert!(tail_supremum(&w, 0.0, 1e-9, HorizonPolicy::default()).unwrap().upper().is_infinite());
}

#[test]
fn norms_of_closed_forms() {
    let l2 = lp_norm(&exp_neg(), 2.0, 1e-12, HorizonPolicy::default()).unwrap().finite().unwrap();
    assert!((l2 - 0.5f64.sqrt()).abs() < 1e-10);
    // int_0^inf e^{-2t} sin^2 t = 1/8
    let d2 = lp_norm(&damped_sine(), 2.0, 1e-12, HorizonPolicy::default()).unwrap().finite().unwrap();
    assert!((d2 - 0.125f64.sqrt()).abs() < 1e-9);
    // sup |e^{-t}(cos t - sin t)| = 1 at t = 0
    let dd = lq_norm_derivative(&damped_sine(), f64::INFINITY, 1e-12).unwrap().finite().unwrap();
    assert!((dd - 1.0).abs() < 1e-9);
    let w = make_incomparability_witness(0.75).unwrap();
    // f' = (1+t)^{-7/4}(cos u - 3/4 sin u) peaks at t = 0
    let wd = lq_norm_derivative(&w, f64::INFINITY, 1e-12).unwrap().finite().unwrap();
    assert!((wd - 1.0).abs() < 1e-6 && wd <= 2.0);
}

#[test]
fn sobolev_report_for_exponential() {
    let r = sobolev_report(&exp_neg(), 2.0, f64::INFINITY, 1e-12).unwrap();
    assert!(r.member);
    assert_eq!(r.holder_exponent, 1.0);
    assert!((r.holder_constant.unwrap() - 1.0).abs() < 1e-9);
    assert!((r.sup_norm_bound.unwrap() - 2.5f64.cbrt()).abs() < 1e-9);
    let q3 = sobolev_report(&exp_neg(), 1.0, 3.0, 1e-12).unwrap();
    // ||f'||_3 = (1/3)^{1/3}, r = 2/3
    assert!((q3.holder_constant.unwrap() - (1.0f64 / 3.0).cbrt()).abs() < 1e-9);
    assert!((q3.r - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn certificate_values() {
    let opts = CertificateOptions::default();
    let c = lemma2_certificate(&exp_neg(), &ModulusEstimate::lipschitz(1.0, true), &[4.0], &opts).unwrap();
    assert!((c.grid[0].bound - 2.0 * (-2.0f64).exp()).abs() < 1e-9);
    let h = holder_certificate(&exp_neg(), 1.0, 1.0, &[2.0], &opts).unwrap();
    assert!((h.grid[0].bound - 2.0 * (-1.0f64).exp()).abs() < 1e-9);
    let s = sobolev_certificate(&exp_neg(), 2.0, f64::INFINITY, &[1.0], &opts).unwrap();
    let m = 2.5f64.cbrt();
    let expect = ((1.0 + 2.0 * m) * ((-2.0f64).exp() / 2.0).sqrt()).sqrt();
    assert!((s.grid[0].bound - expect).abs() < 1e-8);
    assert!(s.grid[0].bound >= (-1.0f64).exp());
}

#[test]
fn counterexample_holder_with_unit_constant() {
    let spec = FunctionSpec::counterexample_default();
    let loose = CertificateOptions {
        allow_empirical: true,
        ..CertificateOptions::default()
    };
    let grid: Vec<f64> = (2..40).map(|n| n as f64).collect();
    let c = holder_certificate(&spec, 1.0, 0.5, &grid, &loose).unwrap();
    assert!(!c.sound && c.all_satisfied());
    for r in &c.grid {
        assert!((r.bound - 2.0 * r.s_value.cbrt()).abs() < 1e-12);
    }
    let fit = fit_holder(&spec, 0.5, (0.0, f64::INFINITY), 512, 3).unwrap();
    assert!(fit.sampled_c <= fit.c && fit.c > 1.0);
}

#[test]
fn local_oscillation_of_the_first_bump() {
    let spec = FunctionSpec::counterexample_default();
    let m = 0.5 * 2f64.powf(-1.0 / 3.0);
    let d = 0.5 * m;
    let r = local_oscillation(&spec, 2.0, 3.0, d, 400).unwrap();
    // steepest change of sqrt is at the bump's foot
    assert!(r.value <= d.sqrt() + 1e-12 && r.value >= 0.99 * d.sqrt(), "{r:?}");
    assert!(r.upper_bound >= d.sqrt() - 1e-12);
}

#[test]
fn ode_closed_form_without_input() {
    let tr = simulate(0.5, -2.0, &FunctionSpec::zero(), 4.0, 1e-3).unwrap();
    for s in &tr.states {
        assert!((s.e - 0.5 * (-s.t).exp()).abs() < 1e-12);
        assert_eq!(s.theta, -2.0);
    }
}

#[test]
fn evaluate_matches_definition() {
    let spec = FunctionSpec::counterexample_default();
    for i in 0..2000 {
        let x = i as f64 * 0.0173;
        let n = x.floor() as u64;
        let want = if n >= 2 { bump(n, x) } else { 0.0 };
        assert!((evaluate(&spec, x).unwrap() - want).abs() < 1e-15, "x={x}");
    }
}
