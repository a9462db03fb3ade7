//! Real-coefficient polynomial and rational transfer-function algebra.

mod bode;
mod poly;
mod roots;
mod state_space;
mod tf;

pub use bode::{bode_sweep, log_grid, magnitude_db, phase_crossings_180, unwrap_towards, FrequencyPoint, MAG_DB_FLOOR};
pub use poly::Polynomial;
pub use roots::{MAX_ITERATIONS as ROOT_MAX_ITERATIONS, RESIDUAL_TOL as ROOT_RESIDUAL_TOL};
pub use state_space::{step_response, to_state_space, StateSpace, DIVERGENCE_LIMIT};
pub use tf::{TransferFunction, POLE_GUARD};

pub(crate) use state_space::step_count;
