use thiserror::Error;

use crate::modeid::ModeEstimate;
use crate::series::TimeSeries;
use crate::timesim::SimOutput;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("denominator is the zero polynomial")]
    ZeroDenominator,

    #[error("closed loop is degenerate: 1 + g*h vanishes identically")]
    DegenerateLoop,

    #[error("pole on the imaginary axis at {frequency_hz} Hz")]
    PoleOnAxis { frequency_hz: f64 },

    #[error("root finder did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("transfer function is improper (numerator degree {num} > denominator degree {den})")]
    ImproperSystem { num: usize, den: usize },

    /// The integrated response left the representable range. The samples
    /// computed before the blow-up are kept.
    #[error("step response diverged at t = {time} s")]
    StepTooLarge { time: f64, prefix: TimeSeries },

    #[error("gain bracket [{k_lo}, {k_hi}] does not straddle a stability boundary")]
    BracketInvalid { k_lo: f64, k_hi: f64 },

    #[error("no synchronizing time constant in the scan range satisfies both constraints")]
    NoFeasibleSync,

    #[error("load {p_dc} pu exceeds the maximum transferable power {p_max} pu")]
    InfeasibleLoad { p_dc: f64, p_max: f64 },

    /// Bus voltage dropped below the collapse threshold. The trajectory up
    /// to the failing step is kept.
    #[error("voltage collapse at t = {time} s (v = {voltage} pu)")]
    VoltageCollapse {
        time: f64,
        voltage: f64,
        partial: Option<Box<SimOutput>>,
    },

    #[error("simulation state became non-finite at t = {time} s")]
    NumericalDivergence {
        time: f64,
        partial: Option<Box<SimOutput>>,
    },

    /// No spectral peak stands out; the estimate is still attached.
    #[error("no dominant oscillation (peak prominence {:.2} dB)", .estimate.prominence_db)]
    FlatSignal { estimate: Box<ModeEstimate> },

    #[error("window too short: {0}")]
    WindowTooShort(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
