use std::f64::consts::TAU;

use lelosc_core::lelmodel::{build_gdvc, FeedbackParams};
use lelosc_core::ratfun::{bode_sweep, step_response, to_state_space, Polynomial, TransferFunction, MAG_DB_FLOOR};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Denominator with prescribed left-half-plane roots: real ones and pairs.
fn stable_den(reals: &[f64], pairs: &[(f64, f64)]) -> Polynomial {
    let mut p = Polynomial::constant(1.0);
    for &r in reals {
        p = &p * &Polynomial::linear(1.0, r);
    }
    for &(a, b) in pairs {
        p = &p * &Polynomial::new(vec![1.0, 2.0 * a, a * a + b * b]);
    }
    p
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..=max_len)
}

fn tf_strategy() -> impl Strategy<Value = TransferFunction> {
    (coeffs(3), prop::collection::vec(0.2f64..20.0, 1..=3), prop::collection::vec((0.2f64..10.0, 0.5f64..40.0), 0..=1))
        .prop_map(|(num, reals, pairs)| TransferFunction::new(Polynomial::new(num), stable_den(&reals, &pairs)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplicativity(a in tf_strategy(), b in tf_strategy(), f in 0.01f64..200.0) {
        let ab = &a * &b;
        let (va, vb, vab) = (a.freq_eval(f).unwrap(), b.freq_eval(f).unwrap(), ab.freq_eval(f).unwrap());
        prop_assume!(va.norm() > 1e-12 && vb.norm() > 1e-12);
        prop_assert!((vab.norm() - va.norm() * vb.norm()).abs() <= 1e-9 * vab.norm());
        let dphase = (vab.arg() - va.arg() - vb.arg()).rem_euclid(TAU);
        prop_assert!(dphase.min(TAU - dphase) < 1e-9);
    }

    #[test]
    fn feedback_identity(g in tf_strategy(), h in tf_strategy(), fs in prop::collection::vec(0.01f64..300.0, 50)) {
        let cl = g.feedback(&h).unwrap();
        for f in fs {
            let (vg, vh) = (g.freq_eval(f).unwrap(), h.freq_eval(f).unwrap());
            let expect = vg / (1.0 + vg * vh);
            prop_assume!(expect.norm() > 1e-12 && (1.0 + vg * vh).norm() > 1e-6);
            prop_assert!(rel(cl.freq_eval(f).unwrap(), expect) < 1e-9);
        }
    }

    #[test]
    fn realization_fidelity(g in tf_strategy(), fs in prop::collection::vec(0.01f64..300.0, 20)) {
        prop_assume!(g.is_proper());
        let ss = to_state_space(&g).unwrap();
        prop_assert_eq!(ss.order(), g.den().degree());
        for f in fs {
            let s = Complex64::new(0.0, TAU * f);
            let a = g.eval(s).unwrap();
            prop_assume!(a.norm() > 1e-12);
            prop_assert!(rel(ss.eval(s).unwrap(), a) < 1e-9);
        }
    }

    #[test]
    fn conjugate_symmetry_and_residual(c in prop::collection::vec(-10.0f64..10.0, 2..=7)) {
        let p = Polynomial::new(c);
        prop_assume!(p.degree() >= 1 && p.leading().abs() > 1e-3);
        let roots = p.roots().unwrap();
        prop_assert_eq!(roots.len(), p.degree());
        for r in &roots {
            prop_assert!(p.scaled_residual(*r) < 1e-8);
            if r.im != 0.0 {
                prop_assert!(roots.iter().any(|q| q.re == r.re && q.im == -r.im));
            }
        }
    }

    #[test]
    fn stable_settle(k in 0.1f64..5.0, reals in prop::collection::vec(1.0f64..8.0, 1..=2), pair in (1.0f64..5.0, 1.0f64..20.0)) {
        let den = stable_den(&reals, &[pair]);
        // every pole satisfies Re < -alpha with margin, so clustered poles still settle
        let alpha = 0.5 * reals.iter().copied().fold(pair.0, f64::min);
        let g = TransferFunction::new(Polynomial::constant(k * den.constant_term()), den).unwrap();
        let fastest = reals.iter().copied().fold(pair.0.hypot(pair.1), f64::max);
        let dt = (1.0 / fastest / 20.0).min(1e-2);
        let y = step_response(&g, 10.0 / alpha, dt).unwrap();
        prop_assert!((y.last().unwrap() - k).abs() <= 1e-4 * k);
    }
}

#[test]
fn second_order_step_matches_analytic() {
    let (zeta, w) = (0.2f64, 10.0f64);
    let g = TransferFunction::from_coeffs(&[w * w], &[1.0, 2.0 * zeta * w, w * w]).unwrap();
    let y = step_response(&g, 3.0, 1e-3).unwrap();
    let wd = w * (1.0 - zeta * zeta).sqrt();
    let phi = (1.0 - zeta * zeta).sqrt().atan2(zeta);
    for i in 0..y.len() {
        let t = y.time(i);
        let exact = 1.0 - (-zeta * w * t).exp() / (1.0 - zeta * zeta).sqrt() * (wd * t + phi).sin();
        assert!((y.samples[i] - exact).abs() < 1e-6);
    }
}

#[test]
fn first_order_integrator_order() {
    let g = TransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
    let err = |dt: f64| {
        let y = step_response(&g, 4.0, dt).unwrap();
        (0..y.len()).map(|i| (y.samples[i] - (1.0 - (-y.time(i)).exp())).abs()).fold(0.0, f64::max)
    };
    let ratio = err(0.1) / err(0.05);
    assert!((12.0..=20.0).contains(&ratio), "{ratio}");
}

#[test]
fn gdvc_poles_and_realization() {
    let g = build_gdvc(&FeedbackParams::after_tuning(), true);
    let poles = g.poles().unwrap();
    assert_eq!(poles.len(), 3);
    assert_eq!(poles.iter().filter(|p| p.im == 0.0).count(), 1);
    let pair = poles.iter().find(|p| p.im > 0.0).unwrap();
    assert!((23.0..=29.0).contains(&(pair.im / TAU)));
    let ss = to_state_space(&g).unwrap();
    assert_eq!((ss.order(), ss.d), (3, 0.0));
}

#[test]
fn first_order_bode() {
    let g = TransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
    let sweep = bode_sweep(&g, 0.01, 100.0, 50).unwrap();
    assert!(sweep.windows(2).all(|w| w[1].magnitude_db <= w[0].magnitude_db));
    let corner = g.freq_eval(1.0 / TAU).unwrap();
    assert!((corner.norm() - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((corner.arg().to_degrees() + 45.0).abs() < 1e-9);

    let flat = bode_sweep(&TransferFunction::constant(0.425), 1.0, 100.0, 10).unwrap();
    assert!(flat.iter().all(|p| (p.magnitude_db - 20.0 * 0.425f64.log10()).abs() < 1e-12 && p.phase_deg == 0.0));

    let zero = bode_sweep(&TransferFunction::zero(), 1.0, 100.0, 10).unwrap();
    assert!(zero.iter().all(|p| p.magnitude_db <= MAG_DB_FLOOR));
}
