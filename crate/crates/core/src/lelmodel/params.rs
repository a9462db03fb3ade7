use crate::error::{Error, Result};

/// Synchronizing-lag time constant selected by [`super::calibrate_sync`] for
/// the after-tuning controller (k = 0.4225 not stable, k = 0.1 stable,
/// oscillation closest to 26 Hz). Frozen here so defaults do not depend on
/// running the scan; a unit test re-derives it.
pub const CALIBRATED_TAU_SYNC: f64 = 0.038724160734303105;

/// Every quantity of the DC-link voltage control loop, in per unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackParams {
    /// DVC proportional gain, pu current per pu voltage.
    pub kp: f64,
    /// DVC integral gain, pu/s.
    pub ki: f64,
    /// DC-link inertia constant, s.
    pub tau_dc: f64,
    /// Current tracking lag, s.
    pub tau_i: f64,
    /// Synchronizing lag, s. Zero means instantaneous synchronization.
    pub tau_sync: f64,
    /// Grid reactance, pu.
    pub xg: f64,
    /// Operating-point real current, pu.
    pub id0: f64,
    /// Thevenin source magnitude, pu.
    pub vg: f64,
    /// DC-link voltage reference, pu.
    pub vdc_ref: f64,
}

impl FeedbackParams {
    /// Retuned controller `2.8 + 1/(0.0005 s)` that produces the 26 Hz resonance.
    pub fn after_tuning() -> Self {
        Self {
            kp: 2.8,
            ki: 1.0 / 0.0005,
            tau_dc: 0.0377,
            tau_i: 0.001,
            tau_sync: CALIBRATED_TAU_SYNC,
            xg: 0.65,
            id0: 1.0,
            vg: 1.0,
            vdc_ref: 1.0,
        }
    }

    /// Original controller `10 + 1/(0.0063 s)`.
    pub fn before_tuning() -> Self {
        Self {
            kp: 10.0,
            ki: 1.0 / 0.0063,
            ..Self::after_tuning()
        }
    }

    pub fn with_tau_sync(self, tau_sync: f64) -> Self {
        Self { tau_sync, ..self }
    }

    pub fn with_operating_current(self, id0: f64) -> Self {
        Self { id0, ..self }
    }

    /// The operating-point factor `(xg * id0)^2` that scales the outer loop.
    pub fn loop_factor(&self) -> f64 {
        let x = self.xg * self.id0;
        x * x
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("kp", self.kp),
            ("ki", self.ki),
            ("tau_dc", self.tau_dc),
            ("tau_i", self.tau_i),
            ("tau_sync", self.tau_sync),
            ("xg", self.xg),
            ("id0", self.id0),
            ("vg", self.vg),
            ("vdc_ref", self.vdc_ref),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} is not finite ({v})")));
        }
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::InvalidInput(msg.to_string())) };
        check(self.kp >= 0.0 && self.ki >= 0.0, "PI gains must be non-negative")?;
        check(self.kp + self.ki > 0.0, "kp + ki must be positive")?;
        check(self.tau_dc > 0.0, "tau_dc must be positive")?;
        check(self.tau_i >= 0.0, "tau_i must be non-negative")?;
        check(self.tau_sync >= 0.0, "tau_sync must be non-negative")?;
        check(self.xg >= 0.0, "xg must be non-negative")?;
        check(self.id0 >= 0.0, "id0 must be non-negative")?;
        check(self.vg > 0.0, "vg must be positive")?;
        check(self.id0 * self.xg < self.vg, "operating point violates id0*xg < vg")?;
        check(self.vdc_ref > 0.0, "vdc_ref must be positive")?;
        Ok(())
    }
}

impl Default for FeedbackParams {
    fn default() -> Self {
        Self::after_tuning()
    }
}
