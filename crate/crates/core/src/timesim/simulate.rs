use std::collections::BTreeMap;

use super::network::{network_solve, synchronized_point};
use super::scenario::{equilibrium_current, Scenario};
use crate::error::{Error, Result};
use crate::ratfun::step_count;
use crate::series::TimeSeries;

/// Signal names produced by [`simulate`].
pub const SIGNALS: [&str; 7] = ["P_ac", "V", "V_dc", "i_d", "i_d_ref", "delta", "delta_v"];

/// Dynamic states plus the algebraic network quantities they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    pub vdc: f64,
    pub xi: f64,
    pub id: f64,
    pub delta: f64,
    pub v: f64,
    pub delta_v: f64,
    pub p_ac: f64,
}

/// Recorded signals of one run, keyed by name.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub signals: BTreeMap<String, TimeSeries>,
    pub final_state: SimState,
}

impl SimOutput {
    pub fn get(&self, name: &str) -> Option<&TimeSeries> {
        self.signals.get(name)
    }

    /// Like [`SimOutput::get`] but reports a missing signal as an error.
    pub fn signal(&self, name: &str) -> Result<&TimeSeries> {
        self.get(name)
            .ok_or_else(|| Error::InvalidInput(format!("no signal named {name}")))
    }
}

/// Per-unit series rescaled to MW.
pub fn to_mw(series: &TimeSeries, p_base_mw: f64) -> TimeSeries {
    let mut out = series.map(|x| x * p_base_mw);
    out.unit = "MW".into();
    out
}

/// Steady state carrying the initial load of the profile.
pub fn init_equilibrium(sc: &Scenario) -> Result<SimState> {
    sc.validate()?;
    let p = &sc.params;
    let p_dc = sc.pdc_at(0.0);
    let id = equilibrium_current(p_dc, p.vg, p.xg)?;
    if id > sc.i_limit {
        return Err(Error::InvalidInput(format!(
            "equilibrium current {id} exceeds the reference limit {}",
            sc.i_limit
        )));
    }
    let (v, delta) = synchronized_point(id, p.vg, p.xg)?;
    Ok(SimState {
        vdc: p.vdc_ref,
        xi: if p.ki > 0.0 { id / p.ki } else { 0.0 },
        id,
        delta,
        v,
        delta_v: delta,
        p_ac: v * id,
    })
}

/// Integration state `[vdc, xi, id, delta]`.
type X = [f64; 4];

struct Algebraic {
    id: f64,
    id_ref: f64,
    delta: f64,
    v: f64,
    delta_v: f64,
    p_ac: f64,
}

struct Model<'a> {
    sc: &'a Scenario,
}

impl Model<'_> {
    fn algebraic(&self, x: &X) -> Result<(Algebraic, f64)> {
        let p = &self.sc.params;
        let err = p.vdc_ref - x[0];
        let unclamped = p.kp * err + p.ki * x[1];
        let id_ref = unclamped.clamp(0.0, self.sc.i_limit);
        let id = if p.tau_i > 0.0 { x[2] } else { id_ref };
        let (delta, v, delta_v) = if p.tau_sync > 0.0 {
            let (v, dv) = network_solve(id, x[3], p.vg, p.xg)?;
            (x[3], v, dv)
        } else {
            let (v, d) = synchronized_point(id, p.vg, p.xg)?;
            (d, v, d)
        };
        let p_ac = v * id * (delta_v - delta).cos();
        let alg = Algebraic {
            id,
            id_ref,
            delta,
            v,
            delta_v,
            p_ac,
        };
        Ok((alg, unclamped))
    }

    fn derivative(&self, t: f64, x: &X) -> Result<(X, Algebraic)> {
        let p = &self.sc.params;
        let (a, unclamped) = self.algebraic(x)?;
        let err = p.vdc_ref - x[0];
        let winding_up = (unclamped > self.sc.i_limit && err > 0.0) || (unclamped < 0.0 && err < 0.0);
        let dx = [
            (a.p_ac - self.sc.pdc_at(t)) / (2.0 * p.tau_dc * x[0]),
            if winding_up { 0.0 } else { err },
            if p.tau_i > 0.0 { (a.id_ref - x[2]) / p.tau_i } else { 0.0 },
            if p.tau_sync > 0.0 { (a.delta_v - x[3]) / p.tau_sync } else { 0.0 },
        ];
        Ok((dx, a))
    }
}

fn axpy(x: &X, h: f64, k: &X) -> X {
    [x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2], x[3] + h * k[3]]
}

struct Recorder {
    cols: [Vec<f64>; 7],
    dt: f64,
    last: Option<SimState>,
}

impl Recorder {
    fn new(n: usize, dt: f64) -> Self {
        Self {
            cols: std::array::from_fn(|_| Vec::with_capacity(n)),
            dt,
            last: None,
        }
    }

    fn push(&mut self, x: &X, a: &Algebraic) {
        let row = [a.p_ac, a.v, x[0], a.id, a.id_ref, a.delta, a.delta_v];
        for (c, v) in self.cols.iter_mut().zip(row) {
            c.push(v);
        }
        self.last = Some(SimState {
            vdc: x[0],
            xi: x[1],
            id: a.id,
            delta: a.delta,
            v: a.v,
            delta_v: a.delta_v,
            p_ac: a.p_ac,
        });
    }

    fn finish(self, fallback: SimState) -> SimOutput {
        let units = ["pu", "pu", "pu", "pu", "pu", "rad", "rad"];
        let signals = SIGNALS
            .iter()
            .zip(units)
            .zip(self.cols)
            .map(|((name, unit), samples)| (name.to_string(), TimeSeries::new(*name, unit, 0.0, self.dt, samples)))
            .collect();
        SimOutput {
            signals,
            final_state: self.last.unwrap_or(fallback),
        }
    }
}

/// Fixed-step RK4 run of the averaged load model from the equilibrium of the
/// initial load. Every signal is sampled at `0, dt, ..., n dt` with `n dt`
/// the first grid point at or past `t_end`.
///
/// A collapsed bus or a non-finite or non-positive DC-link voltage aborts the
/// run; the error carries the samples recorded up to that point.
pub fn simulate(sc: &Scenario) -> Result<SimOutput> {
    let init = init_equilibrium(sc)?;
    let model = Model { sc };
    let dt = sc.dt;
    let steps = step_count(sc.t_end, dt);
    let mut rec = Recorder::new(steps + 1, dt);
    let mut x: X = [init.vdc, init.xi, init.id, init.delta];

    for k in 0..=steps {
        let t = k as f64 * dt;
        let stage = |tt: f64, xx: &X| -> Result<X> {
            if !xx.iter().all(|v| v.is_finite()) || xx[0] <= 0.0 {
                return Err(Error::NumericalDivergence { time: tt, partial: None });
            }
            model.derivative(tt, xx).map(|(d, _)| d)
        };
        let (k1, a) = match model.derivative(t, &x) {
            Ok(r) => r,
            Err(e) => return Err(with_partial(e, t, rec.finish(init))),
        };
        rec.push(&x, &a);
        if k == steps {
            break;
        }
        let advance = || -> Result<X> {
            let k2 = stage(t + 0.5 * dt, &axpy(&x, 0.5 * dt, &k1))?;
            let k3 = stage(t + 0.5 * dt, &axpy(&x, 0.5 * dt, &k2))?;
            let k4 = stage(t + dt, &axpy(&x, dt, &k3))?;
            let mut next = x;
            for i in 0..4 {
                next[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if !next.iter().all(|v| v.is_finite()) || next[0] <= 0.0 {
                return Err(Error::NumericalDivergence {
                    time: t + dt,
                    partial: None,
                });
            }
            Ok(next)
        };
        match advance() {
            Ok(next) => x = next,
            Err(e) => return Err(with_partial(e, t, rec.finish(init))),
        }
    }
    Ok(rec.finish(init))
}

fn with_partial(e: Error, t: f64, out: SimOutput) -> Error {
    let partial = Some(Box::new(out));
    match e {
        Error::VoltageCollapse { time, voltage, .. } => Error::VoltageCollapse {
            time: if time.is_nan() { t } else { time },
            voltage,
            partial,
        },
        Error::NumericalDivergence { time, .. } => Error::NumericalDivergence { time, partial },
        other => other,
    }
}
