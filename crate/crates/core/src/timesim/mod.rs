//! Averaged nonlinear time-domain model of a converter-interfaced load on a
//! Thevenin grid: exact DC-link energy balance, clamped PI voltage control
//! with a current lag, a synchronizing lag and an algebraic phasor network.

mod network;
mod scenario;
mod simulate;

pub use network::{network_residual, network_solve, synchronized_point, COLLAPSE_VOLTAGE};
pub use scenario::{
    equilibrium_current, max_transfer, rated_power, Scenario, DEFAULT_DT, DEFAULT_I_LIMIT, DEFAULT_P_BASE_MW,
    DEFAULT_T_END,
};
pub use simulate::{init_equilibrium, simulate, to_mw, SimOutput, SimState, SIGNALS};
