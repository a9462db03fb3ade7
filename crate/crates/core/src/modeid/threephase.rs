use std::io::BufRead;

use crate::error::{Error, Result};
use crate::series::{uniform_grid, CsvTable, TimeSeries};

/// Instantaneous phase voltages and currents sampled on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseRecord {
    pub t0: f64,
    pub dt: f64,
    pub va: Vec<f64>,
    pub vb: Vec<f64>,
    pub vc: Vec<f64>,
    pub ia: Vec<f64>,
    pub ib: Vec<f64>,
    pub ic: Vec<f64>,
}

impl ThreePhaseRecord {
    pub fn new(t0: f64, dt: f64, v: [Vec<f64>; 3], i: [Vec<f64>; 3]) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        let n = v[0].len();
        if v.iter().chain(i.iter()).any(|c| c.len() != n) {
            return Err(Error::InvalidInput("phase channels differ in length".into()));
        }
        let [va, vb, vc] = v;
        let [ia, ib, ic] = i;
        Ok(Self { t0, dt, va, vb, vc, ia, ib, ic })
    }

    pub fn len(&self) -> usize {
        self.va.len()
    }

    pub fn is_empty(&self) -> bool {
        self.va.is_empty()
    }

    /// Seven columns `t, va, vb, vc, ia, ib, ic` on a uniform time grid.
    pub fn from_table(table: &CsvTable) -> Result<Self> {
        if table.columns.len() != 7 {
            return Err(Error::Parse(format!(
                "three-phase record needs 7 columns, found {}",
                table.columns.len()
            )));
        }
        let (t0, dt) = uniform_grid(&table.columns[0])?;
        let c = &table.columns;
        Self::new(
            t0,
            dt,
            [c[1].clone(), c[2].clone(), c[3].clone()],
            [c[4].clone(), c[5].clone(), c[6].clone()],
        )
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        Self::from_table(&CsvTable::read(r)?)
    }
}

/// `p = va ia + vb ib + vc ic` sample by sample.
pub fn instantaneous_power(rec: &ThreePhaseRecord) -> TimeSeries {
    let samples = (0..rec.len())
        .map(|k| rec.va[k] * rec.ia[k] + rec.vb[k] * rec.ib[k] + rec.vc[k] * rec.ic[k])
        .collect();
    TimeSeries::new("p", "", rec.t0, rec.dt, samples)
}

/// Sliding RMS over `cycles / f0` seconds, one output per input sample. The
/// first outputs average over the samples available so far.
pub fn rms_window(series: &TimeSeries, cycles: usize, f0: f64) -> Result<TimeSeries> {
    if cycles == 0 || !(f0 > 0.0 && f0.is_finite()) {
        return Err(Error::InvalidInput(format!("need cycles >= 1 and f0 > 0, got {cycles}, {f0}")));
    }
    let per_cycle = 1.0 / (f0 * series.dt);
    if per_cycle < 8.0 - 1e-9 {
        return Err(Error::WindowTooShort(format!(
            "{per_cycle:.2} samples per cycle of {f0} Hz, need at least 8"
        )));
    }
    let m = (cycles as f64 * per_cycle).round() as usize;
    if m > series.len() {
        return Err(Error::WindowTooShort(format!(
            "window of {m} samples exceeds series length {}",
            series.len()
        )));
    }
    let mut prefix = Vec::with_capacity(series.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &x in &series.samples {
        acc += x * x;
        prefix.push(acc);
    }
    let samples = (0..series.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(m);
            let count = (i + 1 - lo) as f64;
            ((prefix[i + 1] - prefix[lo]) / count).max(0.0).sqrt()
        })
        .collect();
    Ok(TimeSeries::new(
        format!("{}_rms", series.name),
        series.unit.clone(),
        series.t0,
        series.dt,
        samples,
    ))
}
