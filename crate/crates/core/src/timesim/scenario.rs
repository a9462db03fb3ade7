use crate::error::{Error, Result};
use crate::lelmodel::FeedbackParams;

/// Default upper clamp on the current reference, pu.
pub const DEFAULT_I_LIMIT: f64 = 1.5;
/// Default integration step, s.
pub const DEFAULT_DT: f64 = 50e-6;
/// Default run length, s.
pub const DEFAULT_T_END: f64 = 10.0;
/// Default per-unit power base, MW.
pub const DEFAULT_P_BASE_MW: f64 = 320.0;

/// Ratio between the fastest time constant and the largest admissible step.
const STEP_MARGIN: f64 = 20.0;

/// Configuration of one nonlinear run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: FeedbackParams,
    pub p_base_mw: f64,
    /// Piecewise-linear `(t, P_dc)` breakpoints in s and pu; held after the last one.
    pub pdc_profile: Vec<(f64, f64)>,
    pub t_end: f64,
    pub dt: f64,
    pub i_limit: f64,
}

impl Scenario {
    /// Constant load for the whole run.
    pub fn constant(params: FeedbackParams, p_dc: f64) -> Self {
        Self {
            params,
            p_base_mw: DEFAULT_P_BASE_MW,
            pdc_profile: vec![(0.0, p_dc)],
            t_end: DEFAULT_T_END,
            dt: DEFAULT_DT,
            i_limit: DEFAULT_I_LIMIT,
        }
    }

    /// Holds half of rated load for 3 s, then ramps over 1 s to `level`
    /// times the rated load (the power drawn at `i_d = 1`).
    pub fn load_ramp(params: FeedbackParams, level: f64) -> Result<Self> {
        let rated = rated_power(params.vg, params.xg)?;
        let profile = vec![(0.0, 0.5 * rated), (3.0, 0.5 * rated), (4.0, level * rated)];
        Ok(Self {
            pdc_profile: profile,
            ..Self::constant(params, 0.0)
        })
    }

    pub fn with_duration(self, t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, ..self }
    }

    /// Rescales the profile so that its final value is `level` times the rated load.
    pub fn rescaled_to_level(&self, level: f64) -> Result<Self> {
        let rated = rated_power(self.params.vg, self.params.xg)?;
        let last = self.final_load();
        if last <= 0.0 {
            return Err(Error::InvalidInput("profile ends at zero load and cannot be rescaled".into()));
        }
        let c = level * rated / last;
        let mut out = self.clone();
        for bp in &mut out.pdc_profile {
            bp.1 *= c;
        }
        Ok(out)
    }

    pub fn final_load(&self) -> f64 {
        self.pdc_profile.last().map_or(0.0, |bp| bp.1)
    }

    /// Load demand at time `t`.
    pub fn pdc_at(&self, t: f64) -> f64 {
        let bp = &self.pdc_profile;
        let i = bp.partition_point(|&(tb, _)| tb <= t);
        if i == 0 {
            return bp[0].1;
        }
        if i == bp.len() {
            return bp[i - 1].1;
        }
        let (t0, p0) = bp[i - 1];
        let (t1, p1) = bp[i];
        p0 + (p1 - p0) * (t - t0) / (t1 - t0)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.pdc_profile.is_empty() {
            return bad("load profile is empty".into());
        }
        if self.pdc_profile[0].0 != 0.0 {
            return bad(format!("load profile must start at t = 0, starts at {}", self.pdc_profile[0].0));
        }
        for w in self.pdc_profile.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad(format!("profile times must increase strictly ({} then {})", w[0].0, w[1].0));
            }
        }
        for &(t, p) in &self.pdc_profile {
            if !t.is_finite() || !p.is_finite() || p < 0.0 {
                return bad(format!("invalid profile breakpoint ({t}, {p})"));
            }
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        let p = &self.params;
        let fastest = [p.tau_i, p.tau_sync, 2.0 * p.tau_dc]
            .into_iter()
            .filter(|&t| t > 0.0)
            .fold(f64::INFINITY, f64::min);
        if self.dt > fastest / STEP_MARGIN * (1.0 + 1e-9) {
            return bad(format!(
                "dt = {} exceeds 1/{STEP_MARGIN} of the fastest time constant {fastest}",
                self.dt
            ));
        }
        if !(self.i_limit > 0.0 && self.i_limit.is_finite()) {
            return bad(format!("i_limit must be positive, got {}", self.i_limit));
        }
        if !(self.p_base_mw > 0.0 && self.p_base_mw.is_finite()) {
            return bad(format!("p_base_mw must be positive, got {}", self.p_base_mw));
        }
        Ok(())
    }
}

/// Largest power the source can deliver through `xg`, `vg^2 / (2 xg)`.
pub fn max_transfer(vg: f64, xg: f64) -> f64 {
    if xg > 0.0 {
        vg * vg / (2.0 * xg)
    } else {
        f64::INFINITY
    }
}

/// Power drawn at unit current, `sqrt(vg^2 - xg^2)`.
pub fn rated_power(vg: f64, xg: f64) -> Result<f64> {
    let v2 = vg * vg - xg * xg;
    if v2 <= 0.0 {
        return Err(Error::InvalidInput(format!("grid with vg = {vg}, xg = {xg} cannot carry unit current")));
    }
    Ok(v2.sqrt())
}

/// Low-branch current drawing `p_dc`: solves `id sqrt(vg^2 - (xg id)^2) = p_dc`
/// by bisection on `[0, vg / (sqrt 2 xg)]`.
pub fn equilibrium_current(p_dc: f64, vg: f64, xg: f64) -> Result<f64> {
    if !(p_dc >= 0.0 && p_dc.is_finite()) {
        return Err(Error::InvalidInput(format!("load must be non-negative, got {p_dc}")));
    }
    let p_max = max_transfer(vg, xg);
    if p_dc > p_max {
        return Err(Error::InfeasibleLoad { p_dc, p_max });
    }
    if xg == 0.0 {
        return Ok(p_dc / vg);
    }
    let power = |id: f64| {
        let x = xg * id;
        id * (vg * vg - x * x).max(0.0).sqrt()
    };
    let (mut lo, mut hi) = (0.0, vg / (std::f64::consts::SQRT_2 * xg));
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if power(mid) < p_dc {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if (power(lo) - p_dc).abs() <= (power(hi) - p_dc).abs() { lo } else { hi })
}
