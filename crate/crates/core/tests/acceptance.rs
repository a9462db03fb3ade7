//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::f64::consts::TAU;
use std::io::Write;
use std::time::{Duration, Instant};

use lelosc_core::lelmodel::{
    build_gdvc, calibrate_sync, classify_at, closed_loop_poles, critical_gain, loop_gain_at, resonant_frequency,
    FeedbackParams, CALIBRATED_TAU_SYNC,
};
use lelosc_core::modeid::dominant_mode;
use lelosc_core::ratfun::{step_response, TransferFunction};
use lelosc_core::timesim::{init_equilibrium, simulate, Scenario, SimOutput};
use lelosc_core::{Error, ModeEstimate, TimeSeries};
use num_complex::Complex64;

/// Bypasses the harness's output capture where the platform allows it, so
/// every verdict line shows up in the log and not only the failing ones.
fn report(n: u32, pass: bool, detail: String) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    match std::fs::OpenOptions::new().append(true).open("/dev/stderr") {
        Ok(mut tty) => {
            let _ = tty.write_all(line.as_bytes());
        }
        Err(_) => eprint!("{line}"),
    }
    assert!(pass, "criterion {n} failed: {detail}");
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Mode estimate that keeps flat-signal estimates instead of failing.
fn mode(series: &TimeSeries, window: (f64, f64)) -> ModeEstimate {
    match dominant_mode(series, window) {
        Ok(m) => m,
        Err(Error::FlatSignal { estimate }) => *estimate,
        Err(e) => panic!("mode estimation failed: {e}"),
    }
}

fn window_p2p(out: &SimOutput, name: &str, w: (f64, f64)) -> f64 {
    out.signal(name).unwrap().window(w.0, w.1).unwrap().peak_to_peak()
}

#[test]
fn criterion_1_resonance() {
    let start = Instant::now();
    let g = build_gdvc(&FeedbackParams::after_tuning(), true);
    let res = resonant_frequency(&g, 1.0, 100.0).unwrap();
    let dc = g.dc_gain().unwrap();
    let elapsed = start.elapsed();
    let pass = (res.frequency - 26.0).abs() <= 1.0 && (dc - 1.0).abs() <= 1e-9 && secs(elapsed) < 1.0;
    report(
        1,
        pass,
        format!(
            "f_res = {:.3} Hz (26 +/- 1), dc gain = {dc:.12} (1 +/- 1e-9), {:.3} s (< 1 s)",
            res.frequency,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_2_gain_dichotomy() {
    let start = Instant::now();
    let after = FeedbackParams::after_tuning();
    let cal = calibrate_sync(&after, 0.4225, 0.1).unwrap();
    let hot = classify_at(&after, 0.4225).unwrap();
    let cold = classify_at(&after, 0.1).unwrap();
    let before = FeedbackParams::before_tuning();
    let b_hot = classify_at(&before, 0.4225).unwrap();
    let b_cold = classify_at(&before, 0.1).unwrap();
    let elapsed = start.elapsed();
    let pass = cal.tau_sync == CALIBRATED_TAU_SYNC
        && !hot.class.is_stable()
        && (23.0..=29.0).contains(&hot.oscillation_frequency)
        && cold.class.is_stable()
        && b_hot.class.is_stable()
        && b_cold.class.is_stable()
        && secs(elapsed) < 5.0;
    report(
        2,
        pass,
        format!(
            "tau_sync = {:.6} s; after k=0.4225: {} at {:.2} Hz; after k=0.1: {}; before k=0.4225: {}; before k=0.1: {}; {:.3} s (< 5 s)",
            cal.tau_sync,
            hot.class.label(),
            hot.oscillation_frequency,
            cold.class.label(),
            b_hot.class.label(),
            b_cold.class.label(),
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_3_critical_gain() {
    let start = Instant::now();
    let p = FeedbackParams::after_tuning();
    let cg = critical_gain(&p, 0.1, 0.4225).unwrap();
    let below = classify_at(&p, 0.9 * cg.gain).unwrap();
    let above = classify_at(&p, 1.1 * cg.gain).unwrap();
    let elapsed = start.elapsed();
    let width = cg.upper - cg.lower;
    let pass = cg.gain > 0.1
        && cg.gain < 0.4225
        && width < 1e-4
        && below.class.is_stable()
        && !above.class.is_stable()
        && secs(elapsed) < 10.0;
    report(
        3,
        pass,
        format!(
            "k* = {:.5} in (0.1, 0.4225), interval {width:.2e} (< 1e-4), 0.9k*: {}, 1.1k*: {}, {:.3} s (< 10 s)",
            cg.gain,
            below.class.label(),
            above.class.label(),
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_4_nonlinear_onset() {
    let p = FeedbackParams::after_tuning();
    let start = Instant::now();
    let full = simulate(&Scenario::load_ramp(p, 1.0).unwrap()).unwrap();
    let reduced = simulate(&Scenario::load_ramp(p, 0.75).unwrap()).unwrap();
    let elapsed = start.elapsed();

    let tail = mode(full.signal("P_ac").unwrap(), (8.0, 10.0));
    let sustained = tail.reliable && tail.growth_rate >= -0.1 && (20.0..=29.0).contains(&tail.frequency);
    let post = window_p2p(&reduced, "P_ac", (4.0, 5.0));
    let last = window_p2p(&reduced, "P_ac", (9.0, 10.0));
    let damped = last < 0.1 * post;
    let pass = sustained && damped && secs(elapsed) < 60.0;
    let transient = mode(full.signal("P_ac").unwrap(), (4.0, 5.0));
    report(
        4,
        pass,
        format!(
            "100%: final-2s mode {} (f = {:.2} Hz, growth = {:.3}/s, p2p = {:.2e} pu, prominence {:.1} dB), post-ramp growth {:.2}/s at {:.2} Hz; \
             75%: final p2p {last:.2e} vs post-ramp {post:.2e} ({}); {:.2} s (< 60 s)",
            if sustained { "sustained" } else { "not sustained" },
            tail.frequency,
            tail.growth_rate,
            tail.peak_to_peak,
            tail.prominence_db,
            transient.growth_rate,
            transient.frequency,
            if damped { "damped" } else { "not damped" },
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_5_linear_consistency() {
    let id0 = 0.1;
    let p = FeedbackParams::after_tuning().with_operating_current(id0);
    let p0 = id0 * (p.vg * p.vg - (p.xg * id0).powi(2)).sqrt();
    let t_step = 0.1;
    let mut sc = Scenario::constant(p, p0).with_duration(1.0, 50e-6);
    sc.pdc_profile = vec![(0.0, p0), (t_step, p0), (t_step + sc.dt, p0 + 1e-4)];
    let eq = init_equilibrium(&sc).unwrap();
    assert!((eq.id - id0).abs() < 1e-9);

    let out = simulate(&sc).unwrap();
    let est = mode(out.signal("V_dc").unwrap(), (t_step + 0.3, t_step + 0.7));
    let lin = classify_at(&p, p.loop_factor()).unwrap();
    let f_err = (est.frequency - lin.oscillation_frequency).abs() / lin.oscillation_frequency;
    let g_err = (est.growth_rate - lin.dominant_pole.re).abs() / lin.dominant_pole.re.abs();
    let pass = lin.class.is_stable() && f_err < 0.05 && g_err < 0.15;
    report(
        5,
        pass,
        format!(
            "i_d0 = {id0}: simulated {:.3} Hz, {:.3}/s vs pole {:.3} Hz, {:.3}/s (errors {:.2}% < 5%, {:.2}% < 15%)",
            est.frequency,
            est.growth_rate,
            lin.oscillation_frequency,
            lin.dominant_pole.re,
            100.0 * f_err,
            100.0 * g_err
        ),
    );
}

#[test]
fn criterion_6_dvc_amplification() {
    let out = simulate(&Scenario::load_ramp(FeedbackParams::after_tuning(), 1.0).unwrap()).unwrap();
    let tail = mode(out.signal("P_ac").unwrap(), (8.0, 10.0));
    let sustained = tail.reliable && tail.growth_rate >= -0.1 && (20.0..=29.0).contains(&tail.frequency);
    let w = (8.0, 10.0);
    let ratio_tail = window_p2p(&out, "i_d_ref", w) / window_p2p(&out, "V_dc", w);
    let wt = (4.0, 5.0);
    let ratio_transient = window_p2p(&out, "i_d_ref", wt) / window_p2p(&out, "V_dc", wt);
    let pass = sustained && ratio_tail > 3.0;
    report(
        6,
        pass,
        format!(
            "100% run {} (final-2s growth {:.3}/s); p2p(i_d_ref)/p2p(V_dc) = {ratio_tail:.3} over final 2 s, {ratio_transient:.1} over the post-ramp transient [4, 5] s",
            if sustained { "sustained" } else { "has no sustained oscillation" },
            tail.growth_rate
        ),
    );
}

/// Closed-form roots of `a s^3 + b s^2 + c s + d` with one real root and a
/// complex pair.
fn cardano(a: f64, b: f64, c: f64, d: f64) -> Vec<Complex64> {
    let (b, c, d) = (b / a, c / a, d / a);
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    assert!(disc > 0.0, "oracle handles the one-real-root case only");
    let u = (-q / 2.0 + disc.sqrt()).cbrt();
    let v = (-q / 2.0 - disc.sqrt()).cbrt();
    let shift = -b / 3.0;
    let re = -(u + v) / 2.0 + shift;
    let im = 3f64.sqrt() / 2.0 * (u - v);
    vec![
        Complex64::new(u + v + shift, 0.0),
        Complex64::new(re, im),
        Complex64::new(re, -im),
    ]
}

#[test]
fn criterion_7_oracle_suite() {
    // first order, analytic 1 - e^-t
    let y = step_response(&TransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap(), 5.0, 1e-3).unwrap();
    let e1 = (0..y.len()).map(|i| (y.samples[i] - (1.0 - (-y.time(i)).exp())).abs()).fold(0.0, f64::max);

    // underdamped second order
    let (zeta, w) = (0.2f64, 10.0f64);
    let wd = w * (1.0 - zeta * zeta).sqrt();
    let phi = (1.0 - zeta * zeta).sqrt().atan2(zeta);
    let exact2 = |t: f64| 1.0 - (-zeta * w * t).exp() / (1.0 - zeta * zeta).sqrt() * (wd * t + phi).sin();
    let g2 = TransferFunction::from_coeffs(&[w * w], &[1.0, 2.0 * zeta * w, w * w]).unwrap();
    let y2 = step_response(&g2, 5.0, 1e-3).unwrap();
    let e2 = (0..y2.len()).map(|i| (y2.samples[i] - exact2(y2.time(i))).abs()).fold(0.0, f64::max);

    // cubic poles against Cardano
    let g = build_gdvc(&FeedbackParams::after_tuning(), true);
    let d = g.den().coeffs();
    let oracle = cardano(d[0], d[1], d[2], d[3]);
    let poles = g.poles().unwrap();
    let pole_err = oracle
        .iter()
        .map(|r| poles.iter().map(|p| (p - r).norm() / r.norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);

    // equilibrium persistence
    let sc = Scenario::constant(FeedbackParams::after_tuning(), 0.6).with_duration(1.0, 50e-6);
    let out = simulate(&sc).unwrap();
    let drift = ["V_dc", "i_d", "delta", "V", "P_ac", "i_d_ref", "delta_v"]
        .iter()
        .map(|n| {
            let s = &out.signal(n).unwrap().samples;
            s.iter().map(|v| (v - s[0]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);

    // dt halving on the first-order step
    let g1 = TransferFunction::from_coeffs(&[1.0], &[1.0, 1.0]).unwrap();
    let err = |dt: f64| {
        let y = step_response(&g1, 5.0, dt).unwrap();
        (0..y.len()).map(|i| (y.samples[i] - (1.0 - (-y.time(i)).exp())).abs()).fold(0.0, f64::max)
    };
    let ratio = err(0.1) / err(0.05);

    let pass = e1 < 1e-6 && e2 < 1e-6 && pole_err < 1e-8 && drift < 1e-6 && (12.0..=20.0).contains(&ratio);
    report(
        7,
        pass,
        format!(
            "first-order sup err {e1:.2e}, second-order {e2:.2e} (< 1e-6); cubic poles vs Cardano {pole_err:.2e} (< 1e-8); \
             equilibrium drift {drift:.2e} (< 1e-6); dt-halving ratio {ratio:.2} (in [12, 20])"
        ),
    );
}

#[test]
fn criterion_8_mode_id_accuracy() {
    let fs = 1000.0;
    let n = 2001;
    let sine = TimeSeries::from_fn("x", "", 0.0, 1.0 / fs, n, |t| 320.0 + 25.0 * (TAU * 23.0 * t).sin());
    let m = dominant_mode(&sine, (0.0, 2.0)).unwrap();
    let decay = TimeSeries::from_fn("x", "", 0.0, 1.0 / fs, n, |t| (-3.0 * t).exp() * (TAU * 23.0 * t).sin());
    let d = dominant_mode(&decay, (0.0, 2.0)).unwrap();
    let f_err = (m.frequency - 23.0).abs();
    let a_err = (m.peak_to_peak - 50.0).abs() / 50.0;
    let g_err = (d.growth_rate + 3.0).abs() / 3.0;
    let pass = f_err <= 0.1 && a_err <= 0.01 && g_err <= 0.05;
    report(
        8,
        pass,
        format!(
            "f = {:.4} Hz (err {f_err:.4} <= 0.1), p2p = {:.3} (err {:.3}% <= 1%), decay = {:.4}/s (err {:.2}% <= 5%)",
            m.frequency,
            m.peak_to_peak,
            100.0 * a_err,
            d.growth_rate,
            100.0 * g_err
        ),
    );
}

#[test]
fn criterion_9_scaling_invariance() {
    let base = FeedbackParams::after_tuning();
    let scaled = |c: f64| FeedbackParams {
        xg: c * base.xg,
        id0: base.id0 / c,
        ..base
    };
    let fingerprint = |p: &FeedbackParams| {
        let k = p.loop_factor();
        let poles = closed_loop_poles(p, k).unwrap();
        let verdict = classify_at(p, k).unwrap();
        let loop_gain = loop_gain_at(p, k);
        (poles, verdict, loop_gain)
    };
    let reference = fingerprint(&base);

    let mut exact = 0;
    let pow2 = [0.25, 0.5, 2.0, 4.0, 1.0 / 1024.0];
    for &c in &pow2 {
        let f = fingerprint(&scaled(c));
        let same_bits = f.0.iter().zip(&reference.0).all(|(a, b)| {
            a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
        }) && f.1 == reference.1
            && f.2 == reference.2;
        if same_bits {
            exact += 1;
        }
    }

    // For other factors the scaled inputs are themselves rounded, so only
    // agreement to rounding and identical verdicts are meaningful.
    let mut other_exact = 0;
    let mut worst: f64 = 0.0;
    let mut verdicts_agree = true;
    let others = [0.3, 0.7, 1.3, 1.5, 3.0];
    for &c in &others {
        let f = fingerprint(&scaled(c));
        let dev = f
            .0
            .iter()
            .zip(&reference.0)
            .map(|(a, b)| (a - b).norm() / b.norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        verdicts_agree &= f.1.class == reference.1.class;
        if dev == 0.0 && f.1 == reference.1 {
            other_exact += 1;
        }
    }
    let pass = exact == pow2.len() && verdicts_agree && worst < 1e-12;
    report(
        9,
        pass,
        format!(
            "bit-identical poles, verdict and loop gain for {exact}/{} power-of-two factors; \
             rounded factors: {other_exact}/{} bit-identical, max pole deviation {worst:.1e}, verdicts {}",
            pow2.len(),
            others.len(),
            if verdicts_agree { "identical" } else { "differ" }
        ),
    );
}
