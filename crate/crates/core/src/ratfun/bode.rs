use super::tf::TransferFunction;
use crate::error::{Error, Result};

/// Magnitudes of exact zeros are reported at this floor instead of -inf.
pub const MAG_DB_FLOOR: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    pub frequency: f64,
    pub magnitude_db: f64,
    /// Unwrapped along the sweep it came from.
    pub phase_deg: f64,
}

pub fn magnitude_db(mag: f64) -> f64 {
    if mag > 0.0 {
        (20.0 * mag.log10()).max(MAG_DB_FLOOR)
    } else {
        MAG_DB_FLOOR
    }
}

/// Logarithmic grid from `f_lo` to `f_hi`, both ends included.
pub fn log_grid(f_lo: f64, f_hi: f64, points_per_decade: usize) -> Vec<f64> {
    let decades = (f_hi / f_lo).log10();
    let n = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    let (a, b) = (f_lo.log10(), f_hi.log10());
    (0..=n)
        .map(|i| {
            if i == n {
                f_hi
            } else {
                10f64.powf(a + (b - a) * i as f64 / n as f64)
            }
        })
        .collect()
}

/// Frequency response on a log grid with the phase unwrapped from its exact
/// value at `f_lo`.
pub fn bode_sweep(g: &TransferFunction, f_lo: f64, f_hi: f64, points_per_decade: usize) -> Result<Vec<FrequencyPoint>> {
    if !(f_lo > 0.0 && f_lo < f_hi && f_hi.is_finite()) {
        return Err(Error::InvalidInput(format!("need 0 < f_lo < f_hi, got [{f_lo}, {f_hi}]")));
    }
    if points_per_decade < 10 {
        return Err(Error::InvalidInput("points_per_decade must be at least 10".into()));
    }
    let mut out: Vec<FrequencyPoint> = Vec::new();
    for f in log_grid(f_lo, f_hi, points_per_decade) {
        let v = g.freq_eval(f)?;
        let wrapped = if v.norm() > 0.0 { v.arg().to_degrees() } else { 0.0 };
        let phase = match out.last() {
            None => wrapped,
            Some(prev) => unwrap_towards(prev.phase_deg, wrapped),
        };
        out.push(FrequencyPoint {
            frequency: f,
            magnitude_db: magnitude_db(v.norm()),
            phase_deg: phase,
        });
    }
    Ok(out)
}

/// Shifts `wrapped` by a multiple of 360 so it lies within 180 degrees of `prev`.
pub fn unwrap_towards(prev: f64, wrapped: f64) -> f64 {
    wrapped + 360.0 * ((prev - wrapped) / 360.0).round()
}

/// Frequencies where the unwrapped phase crosses an odd multiple of 180
/// degrees, linearly interpolated between grid points.
pub fn phase_crossings_180(sweep: &[FrequencyPoint]) -> Vec<f64> {
    let mut out = Vec::new();
    for w in sweep.windows(2) {
        let (a, b) = (w[0].phase_deg, w[1].phase_deg);
        let ka = ((a - 180.0) / 360.0).floor();
        let kb = ((b - 180.0) / 360.0).floor();
        if ka != kb {
            let level = 180.0 + 360.0 * ka.max(kb);
            let frac = (level - a) / (b - a);
            let (fa, fb) = (w[0].frequency.ln(), w[1].frequency.ln());
            out.push((fa + frac * (fb - fa)).exp());
        }
    }
    out
}
