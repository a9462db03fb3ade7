use std::f64::consts::TAU;

use num_complex::Complex64;

use super::blocks::{build_gdvc, characteristic_polynomial};
use super::params::FeedbackParams;
use crate::error::{Error, Result};
use crate::ratfun::{magnitude_db, TransferFunction};

/// Relative width of the marginal band around the imaginary axis.
pub const MARGINAL_BAND: f64 = 1e-6;
/// Bisection stops once the gain interval is narrower than this.
pub const CRITICAL_GAIN_TOL: f64 = 1e-4;
/// Synchronizing-lag scan used by [`calibrate_sync`]: `[lo, hi]` seconds, log spaced.
pub const SYNC_SCAN_RANGE: (f64, f64) = (0.001, 0.05);
pub const SYNC_SCAN_POINTS: usize = 200;
/// Oscillation frequency the calibration aims for.
pub const SYNC_TARGET_HZ: f64 = 26.0;

/// Band searched for the G_DVC resonance that sets the marginal band.
const MARGIN_BAND_HZ: (f64, f64) = (0.1, 1000.0);
const RESONANCE_GRID_POINTS: usize = 2000;
const RESONANCE_TOL_HZ: f64 = 0.01;
const FLAT_PROMINENCE_DB: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Stable,
    Marginal,
    Unstable,
}

impl StabilityClass {
    pub fn is_stable(self) -> bool {
        self == StabilityClass::Stable
    }

    pub fn label(self) -> &'static str {
        match self {
            StabilityClass::Stable => "stable",
            StabilityClass::Marginal => "marginal",
            StabilityClass::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub class: StabilityClass,
    /// Closed-loop pole with the largest real part (upper half-plane member of a pair).
    pub dominant_pole: Complex64,
    /// `|Im(dominant_pole)| / 2 pi`, Hz.
    pub oscillation_frequency: f64,
    pub damping_ratio: f64,
    /// Half-width of the marginal band, 1/s.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub frequency: f64,
    pub peak_db: f64,
    /// Peak over the lowest magnitude on the grid.
    pub prominence_db: f64,
    /// True when the magnitude varies by less than 0.1 dB; `frequency` is then `f_lo`.
    pub flat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalGain {
    pub gain: f64,
    /// Largest gain known stable.
    pub lower: f64,
    /// Smallest gain known not stable.
    pub upper: f64,
    /// Oscillation frequency at `upper`, Hz.
    pub frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncCalibration {
    pub tau_sync: f64,
    /// Oscillation frequency at the unstable gain, Hz.
    pub frequency: f64,
    pub grid_index: usize,
}

/// Closed-loop poles at the operating-point factor `k`.
pub fn closed_loop_poles(p: &FeedbackParams, k: f64) -> Result<Vec<Complex64>> {
    characteristic_polynomial(p, k).roots()
}

/// Marginal-band half-width `1e-6 * 2 pi f_res`, with `f_res` the G_DVC resonance.
pub fn stability_margin(p: &FeedbackParams) -> Result<f64> {
    let res = resonant_frequency(&build_gdvc(p, true), MARGIN_BAND_HZ.0, MARGIN_BAND_HZ.1)?;
    Ok(MARGINAL_BAND * TAU * res.frequency)
}

pub fn classify_stability(p: &FeedbackParams) -> Result<StabilityVerdict> {
    classify_at(p, p.loop_factor())
}

pub fn classify_at(p: &FeedbackParams, k: f64) -> Result<StabilityVerdict> {
    p.validate()?;
    let margin = stability_margin(p)?;
    classify_with_margin(p, k, margin)
}

fn classify_with_margin(p: &FeedbackParams, k: f64, margin: f64) -> Result<StabilityVerdict> {
    let poles = closed_loop_poles(p, k)?;
    let dominant = poles
        .iter()
        .copied()
        .max_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
        .ok_or_else(|| Error::InvalidInput("closed loop has no poles".into()))?;
    let class = if dominant.re < -margin {
        StabilityClass::Stable
    } else if dominant.re.abs() <= margin {
        StabilityClass::Marginal
    } else {
        StabilityClass::Unstable
    };
    let damping_ratio = if dominant.norm() > 0.0 {
        -dominant.re / dominant.norm()
    } else {
        0.0
    };
    Ok(StabilityVerdict {
        class,
        dominant_pole: dominant,
        oscillation_frequency: dominant.im.abs() / TAU,
        damping_ratio,
        margin,
    })
}

/// Bisects on the gain for the point where the dominant pair crosses the axis.
///
/// Requires a stable verdict at `k_lo` and a marginal or unstable one at `k_hi`.
pub fn critical_gain(p: &FeedbackParams, k_lo: f64, k_hi: f64) -> Result<CriticalGain> {
    p.validate()?;
    if !(k_lo < k_hi) {
        return Err(Error::BracketInvalid { k_lo, k_hi });
    }
    let margin = stability_margin(p)?;
    let stable = |k: f64| classify_with_margin(p, k, margin).map(|v| v.class.is_stable());
    if !stable(k_lo)? || stable(k_hi)? {
        return Err(Error::BracketInvalid { k_lo, k_hi });
    }
    let (mut lo, mut hi) = (k_lo, k_hi);
    while hi - lo >= CRITICAL_GAIN_TOL {
        let mid = 0.5 * (lo + hi);
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let at_hi = classify_with_margin(p, hi, margin)?;
    Ok(CriticalGain {
        gain: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        frequency: at_hi.oscillation_frequency,
    })
}

/// Frequency of maximum `|g(j 2 pi f)|` on `[f_lo, f_hi]`: a 2000-point log
/// grid followed by golden-section refinement.
pub fn resonant_frequency(g: &TransferFunction, f_lo: f64, f_hi: f64) -> Result<Resonance> {
    if !(f_lo > 0.0 && f_lo < f_hi) {
        return Err(Error::InvalidInput(format!("need 0 < f_lo < f_hi, got [{f_lo}, {f_hi}]")));
    }
    let n = RESONANCE_GRID_POINTS;
    let (a, b) = (f_lo.ln(), f_hi.ln());
    let grid: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let mags = grid
        .iter()
        .map(|&f| g.freq_eval(f).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?;

    let (imax, &peak) = mags
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("grid is non-empty");
    let low = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let prominence_db = magnitude_db(peak) - magnitude_db(low);
    if prominence_db < FLAT_PROMINENCE_DB {
        return Ok(Resonance {
            frequency: f_lo,
            peak_db: magnitude_db(peak),
            prominence_db,
            flat: true,
        });
    }

    let lo = grid[imax.saturating_sub(1)];
    let hi = grid[(imax + 1).min(n - 1)];
    let mag = |f: f64| g.freq_eval(f).map(|v| v.norm());
    let f_peak = golden_max(mag, lo, hi, RESONANCE_TOL_HZ)?;
    let f_peak = if mag(f_peak)? >= peak { f_peak } else { grid[imax] };
    Ok(Resonance {
        frequency: f_peak,
        peak_db: magnitude_db(mag(f_peak)?),
        prominence_db: magnitude_db(mag(f_peak)?) - magnitude_db(low),
        flat: false,
    })
}

fn golden_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if b - a < tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Grid of synchronizing time constants scanned by [`calibrate_sync`].
pub fn sync_scan_grid() -> Vec<f64> {
    let (lo, hi) = (SYNC_SCAN_RANGE.0.log10(), SYNC_SCAN_RANGE.1.log10());
    let last = (SYNC_SCAN_POINTS - 1) as f64;
    (0..SYNC_SCAN_POINTS)
        .map(|i| 10f64.powf(lo + i as f64 / last * (hi - lo)))
        .collect()
}

/// Picks the synchronizing lag whose oscillation at `k_unstable` is closest
/// to 26 Hz while the loop is not stable at `k_unstable` and stable at
/// `k_stable`. Ties go to the smaller time constant.
pub fn calibrate_sync(p: &FeedbackParams, k_unstable: f64, k_stable: f64) -> Result<SyncCalibration> {
    if !(k_stable < k_unstable) {
        return Err(Error::InvalidInput(format!(
            "calibration needs k_stable < k_unstable, got {k_stable} and {k_unstable}"
        )));
    }
    p.validate()?;
    let margin = stability_margin(p)?;
    let mut best: Option<(f64, SyncCalibration)> = None;
    for (i, tau) in sync_scan_grid().into_iter().enumerate() {
        let q = p.with_tau_sync(tau);
        let hot = classify_with_margin(&q, k_unstable, margin)?;
        if hot.class.is_stable() {
            continue;
        }
        if !classify_with_margin(&q, k_stable, margin)?.class.is_stable() {
            continue;
        }
        let miss = (hot.oscillation_frequency - SYNC_TARGET_HZ).abs();
        if best.is_none_or(|(m, _)| miss < m) {
            best = Some((
                miss,
                SyncCalibration {
                    tau_sync: tau,
                    frequency: hot.oscillation_frequency,
                    grid_index: i,
                },
            ));
        }
    }
    best.map(|(_, c)| c).ok_or(Error::NoFeasibleSync)
}
