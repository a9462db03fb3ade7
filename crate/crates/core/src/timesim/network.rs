use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bus voltage below which the network solution is treated as collapsed, pu.
pub const COLLAPSE_VOLTAGE: f64 = 0.2;

/// Exact phasor KVL for an ideal source `vg` behind reactance `xg` feeding a
/// current of magnitude `id` at angle `delta`: returns `|c|` and `arg c` of
/// `c = vg - j xg id e^{j delta}`.
///
/// The returned angle lies within `pi` of `delta`. A collapsed bus reports
/// [`Error::VoltageCollapse`] with an undefined time.
pub fn network_solve(id: f64, delta: f64, vg: f64, xg: f64) -> Result<(f64, f64)> {
    let rot = Complex64::from_polar(1.0, delta);
    let c = Complex64::new(vg, 0.0) - Complex64::new(0.0, xg * id) * rot;
    let v = c.norm();
    if !(v >= COLLAPSE_VOLTAGE) {
        return Err(Error::VoltageCollapse {
            time: f64::NAN,
            voltage: v,
            partial: None,
        });
    }
    let rel = (c * rot.conj()).arg();
    Ok((v, delta + rel))
}

/// `|V e^{j delta_v} + j xg id e^{j delta} - vg|`
pub fn network_residual(v: f64, delta_v: f64, id: f64, delta: f64, vg: f64, xg: f64) -> f64 {
    let bus = Complex64::from_polar(v, delta_v);
    let drop = Complex64::new(0.0, xg * id) * Complex64::from_polar(1.0, delta);
    (bus + drop - vg).norm()
}

/// Steady-state angle of a current that has synchronized to its own bus
/// voltage, together with that voltage: `V = sqrt(vg^2 - (xg id)^2)`,
/// `delta = -atan2(xg id, V)`.
pub fn synchronized_point(id: f64, vg: f64, xg: f64) -> Result<(f64, f64)> {
    let x = xg * id;
    let v2 = vg * vg - x * x;
    let v = if v2 > 0.0 { v2.sqrt() } else { 0.0 };
    if !(v >= COLLAPSE_VOLTAGE) {
        return Err(Error::VoltageCollapse {
            time: f64::NAN,
            voltage: v,
            partial: None,
        });
    }
    Ok((v, -x.atan2(v)))
}
