//! Subcommand implementations. Each returns a [`Failure`] carrying the
//! process exit code on error.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use lelosc_core::lelmodel::{
    build_gdvc, build_gsync, build_loop_gain, classify_at, closed_loop_at, critical_gain, resonant_frequency,
    FeedbackParams, LoopOutput, StabilityVerdict,
};
use lelosc_core::modeid::{dominant_mode, instantaneous_power, ModeEstimate, ThreePhaseRecord};
use lelosc_core::ratfun::{bode_sweep, step_response};
use lelosc_core::series::{uniform_grid, CsvTable};
use lelosc_core::timesim::{simulate, to_mw, SimOutput};
use lelosc_core::{Error, TimeSeries};
use rayon::prelude::*;

use crate::config::ConfigDocument;
use crate::csv_out::{write_columns, write_series};
use crate::Which;

pub const EXIT_IO: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_STABLE_THROUGHOUT: u8 = 4;
pub const EXIT_COLLAPSE: u8 = 5;
pub const EXIT_FLAT: u8 = 6;

const BODE_POINTS_PER_DECADE: usize = 200;
const STEP_T_END: f64 = 1.0;
const STEP_DT: f64 = 2e-5;
const SIM_MODE_WINDOW: f64 = 2.0;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(EXIT_IO, format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_)
            | Error::InfeasibleLoad { .. }
            | Error::BracketInvalid { .. }
            | Error::Parse(_)
            | Error::WindowTooShort(_) => EXIT_CONFIG,
            Error::VoltageCollapse { .. } | Error::NumericalDivergence { .. } => EXIT_COLLAPSE,
            Error::FlatSignal { .. } => EXIT_FLAT,
            Error::Io(_) => EXIT_IO,
            _ => EXIT_NUMERICAL,
        };
        Self::new(code, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn params_of(doc: &ConfigDocument) -> Result<FeedbackParams, Failure> {
    Ok(doc.to_model().map_err(Failure::config)?.params)
}

pub fn bode(doc: &ConfigDocument, which: Which, f_lo: f64, f_hi: f64, out: &Path) -> CmdResult {
    let p = params_of(doc)?;
    if !(f_lo > 0.0 && f_lo < f_hi && f_hi.is_finite()) {
        return Err(Failure::config(format!("need 0 < f-lo < f-hi, got {f_lo} and {f_hi}")));
    }
    let g = match which {
        Which::Gdvc => build_gdvc(&p, true),
        Which::Gsync => build_gsync(&p),
        Which::Loopgain => build_loop_gain(&p),
    };
    let sweep = bode_sweep(&g, f_lo, f_hi, BODE_POINTS_PER_DECADE)?;
    let res = resonant_frequency(&g, f_lo, f_hi)?;
    write_columns(
        out,
        &["frequency_hz", "magnitude_db", "phase_deg_unwrapped"],
        sweep.iter().map(|pt| vec![pt.frequency, pt.magnitude_db, pt.phase_deg]),
    )
    .map_err(|e| Failure::io(out, e))?;
    if res.flat {
        println!(
            "resonant frequency: none (flat response, {:.3} dB variation)",
            res.prominence_db
        );
    } else {
        println!(
            "resonant frequency: {:.4} Hz (peak {:.3} dB)",
            res.frequency, res.peak_db
        );
    }
    Ok(())
}

fn verdict_line(v: &StabilityVerdict, k: f64) -> String {
    format!(
        "verdict: {} at k = {k}: dominant pole {:.6} {:+.6}j 1/s, oscillation {:.4} Hz, damping ratio {:.6}",
        v.class.label(),
        v.dominant_pole.re,
        v.dominant_pole.im,
        v.oscillation_frequency,
        v.damping_ratio
    )
}

pub fn step(doc: &ConfigDocument, k: Option<f64>, out: &Path) -> CmdResult {
    let p = params_of(doc)?;
    let k = k.unwrap_or_else(|| p.loop_factor());
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Failure::config(format!("k must be finite and non-negative, got {k}")));
    }
    let g = closed_loop_at(&p, k, LoopOutput::AcVoltage)?;
    let verdict = classify_at(&p, k)?;
    let (series, diverged) = match step_response(&g, STEP_T_END, STEP_DT) {
        Ok(y) => (y, None),
        Err(Error::StepTooLarge { time, prefix }) => (prefix, Some(time)),
        Err(e) => return Err(e.into()),
    };
    write_columns(
        out,
        &["t", "delta_v_ac"],
        (0..series.len()).map(|i| vec![series.time(i), series.samples[i]]),
    )
    .map_err(|e| Failure::io(out, e))?;
    println!("{}", verdict_line(&verdict, k));
    if let Some(t) = diverged {
        return Err(Failure::new(
            EXIT_NUMERICAL,
            format!("step response diverged at t = {t} s; samples up to that point were written"),
        ));
    }
    Ok(())
}

/// Worker count from `LELOSC_THREADS`, default 1.
fn thread_count() -> Result<usize, Failure> {
    match std::env::var("LELOSC_THREADS") {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::config(format!("LELOSC_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}

pub fn sweep(doc: &ConfigDocument, k_lo: f64, k_hi: f64, points: usize, out: &Path) -> CmdResult {
    let p = params_of(doc)?;
    let ok = k_lo.is_finite()
        && k_hi.is_finite()
        && k_lo >= 0.0
        && points >= 1
        && (k_lo < k_hi || (points == 1 && k_lo == k_hi));
    if !ok {
        return Err(Failure::config(format!(
            "need 0 <= k-lo < k-hi and points >= 1 (k-lo = k-hi only with one point), got [{k_lo}, {k_hi}] with {points}"
        )));
    }
    let ks: Vec<f64> = if points == 1 {
        vec![k_lo]
    } else {
        (0..points)
            .map(|i| k_lo + (k_hi - k_lo) * i as f64 / (points - 1) as f64)
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    let verdicts: Vec<StabilityVerdict> =
        pool.install(|| ks.par_iter().map(|&k| classify_at(&p, k)).collect::<lelosc_core::Result<_>>())?;
    write_columns(
        out,
        &["k", "max_pole_real", "freq_hz"],
        ks.iter()
            .zip(&verdicts)
            .map(|(&k, v)| vec![k, v.dominant_pole.re, v.oscillation_frequency]),
    )
    .map_err(|e| Failure::io(out, e))?;

    if verdicts.iter().all(|v| v.class.is_stable()) {
        println!("stable throughout [{k_lo}, {k_hi}]");
        return Err(Failure::new(EXIT_STABLE_THROUGHOUT, ""));
    }
    let crossing = verdicts
        .windows(2)
        .position(|w| w[0].class.is_stable() && !w[1].class.is_stable());
    match crossing {
        Some(i) => {
            let cg = critical_gain(&p, ks[i], ks[i + 1])?;
            println!(
                "critical k*: {:.6} (bracket [{:.6}, {:.6}]), oscillation {:.4} Hz",
                cg.gain, cg.lower, cg.upper, cg.frequency
            );
        }
        None => println!("not stable at k = {k_lo}; no stable-to-unstable crossing in range"),
    }
    Ok(())
}

const SIM_FILES: [(&str, &str); 5] = [
    ("P_ac", "P_ac_mw.csv"),
    ("V", "V.csv"),
    ("V_dc", "V_dc.csv"),
    ("i_d", "i_d.csv"),
    ("i_d_ref", "i_d_ref.csv"),
];

fn write_sim(out: &SimOutput, dir: &Path, p_base_mw: f64) -> CmdResult {
    for (name, file) in SIM_FILES {
        let series = out.signal(name)?;
        let series = if name == "P_ac" { to_mw(series, p_base_mw) } else { series.clone() };
        let path = dir.join(file);
        write_series(&path, &series).map_err(|e| Failure::io(&path, e))?;
    }
    Ok(())
}

fn describe_mode(label: &str, unit: &str, m: &ModeEstimate) -> String {
    format!(
        "{label} over [{:.3}, {:.3}] s: frequency {:.4} Hz, peak-to-peak {:.6e} {unit}, growth rate {:.4} 1/s, prominence {:.2} dB{}",
        m.window.0,
        m.window.1,
        m.frequency,
        m.peak_to_peak,
        m.growth_rate,
        m.prominence_db,
        if m.reliable { "" } else { " [flat signal: no dominant oscillation]" }
    )
}

pub fn sim(doc: &ConfigDocument, level: f64, dir: &Path) -> CmdResult {
    let model = doc.to_model().map_err(Failure::config)?;
    if !(level > 0.0 && level <= 100.0) {
        return Err(Failure::config(format!("level must lie in (0, 100], got {level}")));
    }
    let sc = model.scenario.rescaled_to_level(level / 100.0)?;
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let out = match simulate(&sc) {
        Ok(out) => out,
        Err(Error::VoltageCollapse { time, voltage, partial }) => {
            if let Some(partial) = partial {
                write_sim(&partial, dir, sc.p_base_mw)?;
            }
            return Err(Failure::new(
                EXIT_COLLAPSE,
                format!("voltage collapse at t = {time} s (v = {voltage} pu); partial output written"),
            ));
        }
        Err(Error::NumericalDivergence { time, partial }) => {
            if let Some(partial) = partial {
                write_sim(&partial, dir, sc.p_base_mw)?;
            }
            return Err(Failure::new(
                EXIT_COLLAPSE,
                format!("simulation diverged at t = {time} s; partial output written"),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    write_sim(&out, dir, sc.p_base_mw)?;
    let p_mw = to_mw(out.signal("P_ac")?, sc.p_base_mw);
    let t_end = p_mw.t_end();
    let window = ((t_end - SIM_MODE_WINDOW).max(p_mw.t0), t_end);
    let est = match dominant_mode(&p_mw, window) {
        Ok(m) => m,
        Err(Error::FlatSignal { estimate }) => *estimate,
        Err(e) => return Err(e.into()),
    };
    println!("load level {level}% of rated ({:.3} MW final)", sc.final_load() * sc.p_base_mw);
    println!("{}", describe_mode("P_ac", "MW", &est));
    Ok(())
}

fn read_input(path: &Path) -> Result<TimeSeries, Failure> {
    let file = File::open(path).map_err(|e| Failure::io(path, e))?;
    let table = CsvTable::read(BufReader::new(file)).map_err(|e| match e {
        Error::Io(io) => Failure::io(path, io),
        other => Failure::config(format!("{}: {other}", path.display())),
    })?;
    match table.columns.len() {
        2 => {
            let (t0, dt) = uniform_grid(&table.columns[0]).map_err(|e| Failure::config(e.to_string()))?;
            Ok(TimeSeries::new(table.header[1].clone(), "", t0, dt, table.columns[1].clone()))
        }
        7 => {
            let rec = ThreePhaseRecord::from_table(&table).map_err(|e| Failure::config(e.to_string()))?;
            Ok(instantaneous_power(&rec))
        }
        n => Err(Failure::config(format!(
            "{}: expected 2 columns (t, value) or 7 (t, va, vb, vc, ia, ib, ic), found {n}",
            path.display()
        ))),
    }
}

pub fn analyze(csv: &Path, start: Option<f64>, end: Option<f64>, out: Option<&Path>) -> CmdResult {
    let series = read_input(csv)?;
    let window = (start.unwrap_or(series.t0), end.unwrap_or(series.t_end()));
    let (est, flat) = match dominant_mode(&series, window) {
        Ok(m) => (m, false),
        Err(Error::FlatSignal { estimate }) => (*estimate, true),
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = out {
        write_columns(
            path,
            &[
                "frequency_hz",
                "peak_to_peak",
                "growth_rate_per_s",
                "window_start_s",
                "window_end_s",
                "prominence_db",
                "reliable",
            ],
            [vec![
                est.frequency,
                est.peak_to_peak,
                est.growth_rate,
                est.window.0,
                est.window.1,
                est.prominence_db,
                if est.reliable { 1.0 } else { 0.0 },
            ]],
        )
        .map_err(|e| Failure::io(path, e))?;
    }
    println!("{}", describe_mode(&series.name, "", &est));
    if flat {
        return Err(Failure::new(EXIT_FLAT, "no dominant oscillation in the window"));
    }
    Ok(())
}
