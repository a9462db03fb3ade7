//! The DC-link voltage control loop of a large electronic load: block
//! builders, closed-loop stability classification, critical gain search and
//! synchronizing-lag calibration.

mod blocks;
mod params;
mod stability;

pub use blocks::{
    build_closed_loop, build_current_lag, build_gdvc, build_gsync, build_loop_gain, build_pi, build_plant,
    characteristic_polynomial, closed_loop_at, loop_gain_at, LoopOutput,
};
pub use params::{FeedbackParams, CALIBRATED_TAU_SYNC};
pub use stability::{
    calibrate_sync, classify_at, classify_stability, closed_loop_poles, critical_gain, resonant_frequency,
    stability_margin, sync_scan_grid, CriticalGain, Resonance, StabilityClass, StabilityVerdict, SyncCalibration,
    CRITICAL_GAIN_TOL, MARGINAL_BAND, SYNC_SCAN_POINTS, SYNC_SCAN_RANGE, SYNC_TARGET_HZ,
};
