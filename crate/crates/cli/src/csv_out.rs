//! Deterministic CSV emission: header row, 17 significant digits, LF endings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use lelosc_core::series::fmt_num;
use lelosc_core::TimeSeries;

pub fn write_columns(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt_num).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_series(path: &Path, series: &TimeSeries) -> std::io::Result<()> {
    series
        .write_csv(BufWriter::new(File::create(path)?))
        .map_err(|e| match e {
            lelosc_core::Error::Io(io) => io,
            other => std::io::Error::other(other.to_string()),
        })
}
