//! Stability analysis of the DC-link voltage control loop of large
//! converter-interfaced loads.
//!
//! * [`ratfun`]: polynomial and rational transfer-function algebra, Bode
//!   sweeps, pole computation and RK4 step responses.
//! * [`lelmodel`]: the loop's blocks, closed-loop stability classification,
//!   critical gain search and synchronizing-lag calibration.
//! * [`timesim`]: nonlinear averaged time-domain simulation on a Thevenin grid.
//! * [`modeid`]: dominant-mode estimation and three-phase reduction.

pub mod error;
pub mod lelmodel;
pub mod modeid;
pub mod ratfun;
pub mod series;
pub mod timesim;

pub use error::{Error, Result};
pub use lelmodel::{FeedbackParams, LoopOutput, StabilityClass, StabilityVerdict};
pub use modeid::{ModeEstimate, ThreePhaseRecord};
pub use ratfun::{FrequencyPoint, Polynomial, StateSpace, TransferFunction};
pub use series::TimeSeries;
pub use timesim::{Scenario, SimOutput, SimState};
