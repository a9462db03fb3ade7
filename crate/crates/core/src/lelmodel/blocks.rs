//! Transfer-function blocks of the DC-link voltage control loop.
//!
//! Signal flow around an operating point (V0 = 1 pu):
//!
//! ```text
//! dVdc = (dP - dPdc) / (2 tau_dc s)          DC-link energy balance
//! did  = -C(s) / (tau_i s + 1) * dVdc        PI voltage control + current lag
//! dP   = (1 + k Gsync(s)) * did              grid coupling, k = (xg id0)^2
//! ```
//!
//! so every closed-loop output shares the characteristic equation
//! `1 + k * G_DVC(s) * G_sync(s) = 0`.

use super::params::FeedbackParams;
use crate::error::Result;
use crate::ratfun::{Polynomial, TransferFunction};

/// Output signal of the disturbance-driven closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoopOutput {
    AcVoltage,
    DcVoltage,
    Current,
}

impl LoopOutput {
    pub const ALL: [LoopOutput; 3] = [LoopOutput::AcVoltage, LoopOutput::DcVoltage, LoopOutput::Current];
}

/// Linearized DC link, `1 / (2 tau_dc s)`.
pub fn build_plant(p: &FeedbackParams) -> TransferFunction {
    TransferFunction::new(Polynomial::constant(1.0), Polynomial::new(vec![2.0 * p.tau_dc, 0.0]))
        .expect("tau_dc > 0 gives a nonzero denominator")
}

/// PI controller `kp + ki/s` as one rational function.
pub fn build_pi(p: &FeedbackParams) -> TransferFunction {
    TransferFunction::new(pi_numerator(p), Polynomial::new(vec![1.0, 0.0])).expect("s is nonzero")
}

/// Inner current tracking `1 / (tau_i s + 1)`.
pub fn build_current_lag(p: &FeedbackParams) -> TransferFunction {
    TransferFunction::new(Polynomial::constant(1.0), Polynomial::linear(p.tau_i, 1.0)).expect("constant term is 1")
}

/// Closed DC-link voltage loop `dVdc / dVdc*`.
pub fn build_gdvc(p: &FeedbackParams, include_current_lag: bool) -> TransferFunction {
    let num = pi_numerator(p);
    let den = if include_current_lag {
        Polynomial::new(vec![2.0 * p.tau_dc * p.tau_i, 2.0 * p.tau_dc, p.kp, p.ki])
    } else {
        Polynomial::new(vec![2.0 * p.tau_dc, p.kp, p.ki])
    };
    TransferFunction::new(num, den).expect("tau_dc > 0 gives a nonzero denominator")
}

/// First-order synchronizing lag; unity when `tau_sync` is zero.
pub fn build_gsync(p: &FeedbackParams) -> TransferFunction {
    TransferFunction::new(Polynomial::constant(1.0), sync_den(p)).expect("constant term is 1")
}

/// Loop gain `k * G_DVC * G_sync` with `k = (xg id0)^2`, oriented so the
/// closed loop is `1 + L = 0`.
pub fn build_loop_gain(p: &FeedbackParams) -> TransferFunction {
    loop_gain_at(p, p.loop_factor())
}

/// [`build_loop_gain`] with the operating-point factor given directly.
pub fn loop_gain_at(p: &FeedbackParams, k: f64) -> TransferFunction {
    let g = &build_gdvc(p, true) * &build_gsync(p);
    g.scale(k)
}

/// Disturbance transfer function from DC-load power to the chosen output.
pub fn build_closed_loop(p: &FeedbackParams, output: LoopOutput) -> Result<TransferFunction> {
    closed_loop_at(p, p.loop_factor(), output)
}

/// [`build_closed_loop`] with the operating-point factor given directly.
///
/// With `Nc = kp s + ki`, `Dc = 2 tau_dc s^2 (tau_i s + 1)` and
/// `Ds = tau_sync s + 1` the characteristic polynomial is
/// `Dc Ds + Nc (Ds + k)`.
pub fn closed_loop_at(p: &FeedbackParams, k: f64, output: LoopOutput) -> Result<TransferFunction> {
    let den = characteristic_polynomial(p, k);
    let nc = pi_numerator(p);
    let ds = sync_den(p);
    let num = match output {
        LoopOutput::Current => &nc * &ds,
        LoopOutput::DcVoltage => {
            // -s (tau_i s + 1) Ds
            let lag = Polynomial::new(vec![p.tau_i, 1.0, 0.0]);
            -&(&lag * &ds)
        }
        // id0 dV = k Gsync did  =>  dV = xg sqrt(k) Gsync did
        LoopOutput::AcVoltage => nc.scale(p.xg * k.max(0.0).sqrt()),
    };
    TransferFunction::new(num, den)
}

pub fn characteristic_polynomial(p: &FeedbackParams, k: f64) -> Polynomial {
    let dc = Polynomial::new(vec![2.0 * p.tau_dc * p.tau_i, 2.0 * p.tau_dc, 0.0, 0.0]);
    let ds = sync_den(p);
    let nc = pi_numerator(p);
    let shifted = &ds + &Polynomial::constant(k);
    &(&dc * &ds) + &(&nc * &shifted)
}

fn pi_numerator(p: &FeedbackParams) -> Polynomial {
    Polynomial::linear(p.kp, p.ki)
}

fn sync_den(p: &FeedbackParams) -> Polynomial {
    Polynomial::linear(p.tau_sync, 1.0)
}
