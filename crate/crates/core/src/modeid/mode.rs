use std::f64::consts::TAU;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::ratfun::magnitude_db;
use crate::series::TimeSeries;

/// Spectral peaks less prominent than this are not trusted.
pub const MIN_PROMINENCE_DB: f64 = 3.0;
/// Fraction of the window, counted from its end, used for the growth-rate fit.
pub const GROWTH_FIT_FRACTION: f64 = 0.8;
const MIN_WINDOW_SAMPLES: usize = 16;
/// Swings below this fraction of the signal magnitude are treated as flat.
const RESOLUTION: f64 = 1e-13;

/// Dominant oscillation of a windowed signal.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeEstimate {
    /// Hz.
    pub frequency: f64,
    /// Signal units.
    pub peak_to_peak: f64,
    /// 1/s; negative when the oscillation decays.
    pub growth_rate: f64,
    /// `(t_start, t_end)` actually analysed, s.
    pub window: (f64, f64),
    /// Spectral peak over the median spectrum level, dB.
    pub prominence_db: f64,
    pub reliable: bool,
}

/// Frequency, amplitude and growth of the strongest spectral line in `window`.
///
/// The window is mean-detrended and Hann-tapered before the FFT; the peak bin
/// is refined by a parabola through the log magnitudes of its neighbours. The
/// growth rate is a least-squares slope of the log half-swing of each full
/// period in the last 80% of the window. A peak under 3 dB of prominence gives
/// [`Error::FlatSignal`] carrying the estimate.
pub fn dominant_mode(series: &TimeSeries, window: (f64, f64)) -> Result<ModeEstimate> {
    let (t_start, t_end) = window;
    if !(t_start < t_end) {
        return Err(Error::InvalidInput(format!("empty window [{t_start}, {t_end}]")));
    }
    let w = series.window(t_start, t_end)?;
    let n = w.len();
    if n < MIN_WINDOW_SAMPLES {
        return Err(Error::WindowTooShort(format!(
            "{n} samples in [{t_start}, {t_end}], need {MIN_WINDOW_SAMPLES}"
        )));
    }
    let x = &w.samples;
    let mean = x.iter().sum::<f64>() / n as f64;

    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let hann = 0.5 * (1.0 - (TAU * i as f64 / (n - 1) as f64).cos());
            Complex::new((v - mean) * hann, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let mags: Vec<f64> = buf[1..=half].iter().map(|c| c.norm()).collect();

    let (ipk, &peak) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("window holds at least one positive-frequency bin");
    let mut offset = 0.0;
    if ipk > 0 && ipk + 1 < mags.len() && peak > 0.0 {
        let (a, b, c) = (mags[ipk - 1].ln(), peak.ln(), mags[ipk + 1].ln());
        let curv = a - 2.0 * b + c;
        if curv < 0.0 && a.is_finite() && c.is_finite() {
            offset = (0.5 * (a - c) / curv).clamp(-0.5, 0.5);
        }
    }
    let bin = (ipk + 1) as f64 + offset;
    let frequency = bin / (n as f64 * w.dt);

    let mut sorted = mags.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    // a swing at the rounding level of the samples carries no mode
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let resolvable = w.peak_to_peak() > RESOLUTION * scale;
    let prominence_db = if peak > 0.0 && resolvable {
        magnitude_db(peak) - magnitude_db(median)
    } else {
        0.0
    };

    let est = ModeEstimate {
        frequency,
        peak_to_peak: w.peak_to_peak(),
        growth_rate: growth_rate(&w, frequency),
        window: (w.t0, w.t_end()),
        prominence_db,
        reliable: prominence_db >= MIN_PROMINENCE_DB,
    };
    if est.reliable {
        Ok(est)
    } else {
        Err(Error::FlatSignal { estimate: Box::new(est) })
    }
}

/// Least-squares slope of `ln(half swing)` against time over whole periods
/// in the tail of the window. Zero when fewer than two usable periods exist.
fn growth_rate(w: &TimeSeries, frequency: f64) -> f64 {
    let x = &w.samples;
    let n = x.len();
    let period = 1.0 / (frequency * w.dt);
    if !(period.is_finite() && period >= 2.0) {
        return 0.0;
    }
    let start = ((1.0 - GROWTH_FIT_FRACTION) * (n - 1) as f64).ceil();
    let mut pts = Vec::new();
    let mut j = 0usize;
    loop {
        let lo = (start + j as f64 * period).round() as usize;
        let hi = (start + (j + 1) as f64 * period).round() as usize;
        if hi > n - 1 || hi <= lo {
            break;
        }
        let seg = lo..=hi;
        let imax = seg.clone().max_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap();
        let imin = seg.clone().min_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap();
        let swing = 0.5 * (refined_extreme(x, imax) - refined_extreme(x, imin));
        if swing > 0.0 {
            pts.push((w.time(lo) + 0.5 * (hi - lo) as f64 * w.dt, swing.ln()));
        }
        j += 1;
    }
    if pts.len() < 2 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Vertex value of the parabola through an extreme sample and its neighbours.
fn refined_extreme(x: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= x.len() {
        return x[i];
    }
    let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
    let curv = a - 2.0 * b + c;
    if curv == 0.0 {
        return b;
    }
    b - (a - c) * (a - c) / (8.0 * curv)
}

/// Mode estimates of two signals over a shared window.
#[derive(Debug, Clone, PartialEq)]
pub struct RunComparison {
    pub a: ModeEstimate,
    pub b: ModeEstimate,
    /// `a.frequency - b.frequency`, Hz.
    pub delta_frequency: f64,
    /// `(a.peak_to_peak - b.peak_to_peak) / b.peak_to_peak`.
    pub delta_peak_to_peak_rel: f64,
}

pub fn compare_runs(a: &TimeSeries, b: &TimeSeries, window: (f64, f64)) -> Result<RunComparison> {
    let ea = dominant_mode(a, window)?;
    let eb = dominant_mode(b, window)?;
    let delta_peak_to_peak_rel = if eb.peak_to_peak == ea.peak_to_peak {
        0.0
    } else {
        (ea.peak_to_peak - eb.peak_to_peak) / eb.peak_to_peak
    };
    Ok(RunComparison {
        delta_frequency: ea.frequency - eb.frequency,
        delta_peak_to_peak_rel,
        a: ea,
        b: eb,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, fs: f64, dur: f64) -> TimeSeries {
        let n = (dur * fs).round() as usize + 1;
        TimeSeries::from_fn("x", "", 0.0, 1.0 / fs, n, f)
    }

    #[test]
    fn event_proxy_sinusoid() {
        let s = sampled(|t| 320.0 + 25.0 * (TAU * 23.0 * t).sin(), 1000.0, 2.0);
        let m = dominant_mode(&s, (0.0, 2.0)).unwrap();
        assert!((m.frequency - 23.0).abs() < 0.1, "{}", m.frequency);
        assert!((m.peak_to_peak - 50.0).abs() < 0.5);
        assert!(m.growth_rate.abs() < 0.05);
        assert!(m.reliable);
    }

    #[test]
    fn off_bin_frequency() {
        let s = sampled(|t| (TAU * 22.3 * t + 0.4).sin(), 1000.0, 2.0);
        let m = dominant_mode(&s, (0.0, 2.0)).unwrap();
        assert!((m.frequency - 22.3).abs() < 0.05, "{}", m.frequency);
    }

    #[test]
    fn exponential_decay() {
        let s = sampled(|t| (-3.0 * t).exp() * (TAU * 23.0 * t).sin(), 1000.0, 2.0);
        let m = dominant_mode(&s, (0.0, 2.0)).unwrap();
        assert!((m.growth_rate + 3.0).abs() < 0.15, "{}", m.growth_rate);
        assert!((m.frequency - 23.0).abs() < 0.2);
    }

    #[test]
    fn growth_on_offset_signal() {
        let s = sampled(|t| 5.0 + 0.1 * (1.5 * t).exp() * (TAU * 26.0 * t).cos(), 2000.0, 2.0);
        let m = dominant_mode(&s, (0.0, 2.0)).unwrap();
        assert!((m.growth_rate - 1.5).abs() < 0.03, "{}", m.growth_rate);
    }

    #[test]
    fn constant_is_flat() {
        let s = sampled(|_| 4.0, 1000.0, 1.0);
        match dominant_mode(&s, (0.0, 1.0)) {
            Err(Error::FlatSignal { estimate }) => {
                assert!(!estimate.reliable);
                assert_eq!(estimate.peak_to_peak, 0.0);
                assert!(estimate.frequency > 0.0 && estimate.frequency < 500.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn window_outside_series() {
        let s = sampled(|t| t.sin(), 100.0, 1.0);
        assert!(dominant_mode(&s, (0.5, 3.0)).is_err());
        assert!(matches!(dominant_mode(&s, (0.5, 0.55)), Err(Error::WindowTooShort(_))));
    }

    #[test]
    fn compare_identical_and_shifted() {
        let a = sampled(|t| (TAU * 23.0 * t).sin(), 1000.0, 4.0);
        let r = compare_runs(&a, &a, (0.0, 4.0)).unwrap();
        assert_eq!((r.delta_frequency, r.delta_peak_to_peak_rel), (0.0, 0.0));
        let b = sampled(|t| (TAU * 22.3 * t).sin(), 1000.0, 4.0);
        let r = compare_runs(&a, &b, (0.0, 4.0)).unwrap();
        assert!((r.delta_frequency - 0.7).abs() < 0.1);
    }
}
