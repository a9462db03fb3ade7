//! Dominant-mode identification and three-phase waveform reduction.

mod mode;
mod threephase;

pub use mode::{compare_runs, dominant_mode, ModeEstimate, RunComparison, GROWTH_FIT_FRACTION, MIN_PROMINENCE_DB};
pub use threephase::{instantaneous_power, rms_window, ThreePhaseRecord};
