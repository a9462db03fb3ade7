//! Uniformly sampled signals and their CSV form.
//!
//! A series file has a header row followed by `t,value` rows. Numbers are
//! written with 17 significant digits so that a write/read cycle is exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub name: String,
    pub unit: String,
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, t0: f64, dt: f64, samples: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            t0,
            dt,
            samples,
        }
    }

    /// Samples a function on `n` points starting at `t0`.
    pub fn from_fn(name: &str, unit: &str, t0: f64, dt: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let samples = (0..n).map(|i| f(t0 + i as f64 * dt)).collect();
        Self::new(name, unit, t0, dt, samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn last(&self) -> Option<f64> {
        self.samples.last().copied()
    }

    /// Index range `[first, last]` of samples whose time lies in `[t_start, t_end]`.
    pub fn window_indices(&self, t_start: f64, t_end: f64) -> Result<(usize, usize)> {
        if !(t_start < t_end) || self.is_empty() {
            return Err(Error::InvalidInput(format!("empty window [{t_start}, {t_end}]")));
        }
        // half-sample slack so that window edges written as round numbers
        // land on the intended samples
        let slack = 1e-6 * self.dt;
        if t_start < self.t0 - slack || t_end > self.t_end() + slack {
            return Err(Error::InvalidInput(format!(
                "window [{t_start}, {t_end}] outside series extent [{}, {}]",
                self.t0,
                self.t_end()
            )));
        }
        let first = (((t_start - self.t0) / self.dt) - 1e-6).ceil().max(0.0) as usize;
        let last = ((((t_end - self.t0) / self.dt) + 1e-6).floor() as usize).min(self.len() - 1);
        if last <= first {
            return Err(Error::InvalidInput(format!("window [{t_start}, {t_end}] holds fewer than two samples")));
        }
        Ok((first, last))
    }

    pub fn window(&self, t_start: f64, t_end: f64) -> Result<TimeSeries> {
        let (a, b) = self.window_indices(t_start, t_end)?;
        Ok(TimeSeries::new(
            self.name.clone(),
            self.unit.clone(),
            self.time(a),
            self.dt,
            self.samples[a..=b].to_vec(),
        ))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> TimeSeries {
        TimeSeries {
            samples: self.samples.iter().map(|&x| f(x)).collect(),
            ..self.clone()
        }
    }

    pub fn peak_to_peak(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if lo.is_finite() && hi.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }

    pub fn header_label(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{}[{}]", self.name, self.unit)
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,{}", self.header_label())?;
        for (i, &x) in self.samples.iter().enumerate() {
            writeln!(w, "{},{}", fmt_num(self.time(i)), fmt_num(x))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<TimeSeries> {
        let table = CsvTable::read(r)?;
        if table.header.len() != 2 {
            return Err(Error::Parse(format!("expected 2 columns, found {}", table.header.len())));
        }
        let (name, unit) = split_label(&table.header[1]);
        let (t0, dt) = uniform_grid(&table.columns[0])?;
        Ok(TimeSeries::new(name, unit, t0, dt, table.columns[1].clone()))
    }
}

/// Fixed 17-significant-digit scientific format.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn split_label(label: &str) -> (String, String) {
    match (label.find('['), label.ends_with(']')) {
        (Some(i), true) => (label[..i].to_string(), label[i + 1..label.len() - 1].to_string()),
        _ => (label.to_string(), String::new()),
    }
}

/// A numeric CSV table with a mandatory header row, stored column-major.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn read<R: BufRead>(r: R) -> Result<CsvTable> {
        let mut lines = r.lines();
        let header: Vec<String> = match lines.next() {
            Some(line) => line?.trim_end_matches('\r').split(',').map(|s| s.trim().to_string()).collect(),
            None => return Err(Error::Parse("empty file".into())),
        };
        if header.iter().any(|h| h.parse::<f64>().is_ok()) {
            return Err(Error::Parse("header row required".into()));
        }
        let mut columns = vec![Vec::new(); header.len()];
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != header.len() {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, header has {}",
                    lineno + 2,
                    fields.len(),
                    header.len()
                )));
            }
            for (col, field) in columns.iter_mut().zip(fields) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: bad number {field:?}", lineno + 2)))?;
                col.push(v);
            }
        }
        if columns[0].len() < 2 {
            return Err(Error::Parse("need at least two data rows".into()));
        }
        Ok(CsvTable { header, columns })
    }
}

/// Checks that a time column is uniformly spaced and returns `(t0, dt)`.
pub fn uniform_grid(t: &[f64]) -> Result<(f64, f64)> {
    let n = t.len();
    if n < 2 {
        return Err(Error::Parse("time column too short".into()));
    }
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Parse("time column must be strictly increasing".into()));
    }
    for (i, w) in t.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-3 * dt {
            return Err(Error::Parse(format!("non-uniform sampling at row {}", i + 3)));
        }
    }
    Ok((t[0], dt))
}
