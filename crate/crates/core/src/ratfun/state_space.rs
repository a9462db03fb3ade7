use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::tf::TransferFunction;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Outputs beyond this magnitude are treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Single-input single-output realization `x' = A x + B u`, `y = C x + D u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// `C (sI - A)^-1 B + D`
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let n = self.order();
        if n == 0 {
            return Ok(Complex64::new(self.d, 0.0));
        }
        let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            diag - self.a[(i, j)]
        });
        let rhs = DVector::<Complex64>::from_fn(n, |i, _| Complex64::new(self.b[i], 0.0));
        let x = m.lu().solve(&rhs).ok_or(Error::PoleOnAxis {
            frequency_hz: s.im / std::f64::consts::TAU,
        })?;
        let y: Complex64 = (0..n).map(|i| x[i] * self.c[i]).sum();
        Ok(y + self.d)
    }

    fn derivative(&self, x: &DVector<f64>, u: f64) -> DVector<f64> {
        &self.a * x + &self.b * u
    }

    fn output(&self, x: &DVector<f64>, u: f64) -> f64 {
        self.c.dot(x) + self.d * u
    }
}

/// Controllable canonical form.
pub fn to_state_space(g: &TransferFunction) -> Result<StateSpace> {
    if !g.is_proper() {
        return Err(Error::ImproperSystem {
            num: g.num().degree(),
            den: g.den().degree(),
        });
    }
    let n = g.den().degree();
    let lead = g.den().leading();
    let a: Vec<f64> = g.den().coeffs().iter().map(|x| x / lead).collect();
    let b: Vec<f64> = g.num().padded(n + 1).iter().map(|x| x / lead).collect();

    let d = b[0];
    let mut am = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        am[(0, j)] = -a[j + 1];
    }
    for i in 1..n {
        am[(i, i - 1)] = 1.0;
    }
    let mut bm = DVector::<f64>::zeros(n);
    if n > 0 {
        bm[0] = 1.0;
    }
    let cm = DVector::<f64>::from_fn(n, |i, _| b[i + 1] - a[i + 1] * d);
    Ok(StateSpace { a: am, b: bm, c: cm, d })
}

/// Unit step response by fixed-step classical RK4.
///
/// Samples are taken at `0, dt, 2dt, ...` up to the first grid point at or
/// past `t_end`. A response leaving `DIVERGENCE_LIMIT` stops the run with
/// [`Error::StepTooLarge`], which carries the samples computed so far.
pub fn step_response(g: &TransferFunction, t_end: f64, dt: f64) -> Result<TimeSeries> {
    if !(t_end > 0.0 && dt > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("need t_end > 0 and dt > 0, got {t_end}, {dt}")));
    }
    let ss = to_state_space(g)?;
    let steps = step_count(t_end, dt);
    let u = 1.0;
    let mut x = DVector::<f64>::zeros(ss.order());
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(ss.output(&x, u));

    for k in 0..steps {
        let k1 = ss.derivative(&x, u);
        let k2 = ss.derivative(&(&x + &k1 * (0.5 * dt)), u);
        let k3 = ss.derivative(&(&x + &k2 * (0.5 * dt)), u);
        let k4 = ss.derivative(&(&x + &k3 * dt), u);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let y = ss.output(&x, u);
        if !y.is_finite() || y.abs() > DIVERGENCE_LIMIT {
            return Err(Error::StepTooLarge {
                time: (k + 1) as f64 * dt,
                prefix: TimeSeries::new("step", "", 0.0, dt, samples),
            });
        }
        samples.push(y);
    }
    Ok(TimeSeries::new("step", "", 0.0, dt, samples))
}

pub(crate) fn step_count(t_end: f64, dt: f64) -> usize {
    (t_end / dt - 1e-9).ceil().max(1.0) as usize
}
