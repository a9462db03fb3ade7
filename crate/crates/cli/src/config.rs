//! JSON configuration document and its mapping onto model parameters.

use std::path::Path;

use lelosc_core::lelmodel::FeedbackParams;
use lelosc_core::timesim::{equilibrium_current, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub grid: Grid,
    pub dvc: Dvc,
    pub current_lag: CurrentLag,
    pub sync: Sync,
    pub scenario: ScenarioSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub vg: f64,
    pub xg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dvc {
    pub kp: f64,
    pub ki: f64,
    pub tau_dc: f64,
    pub vdc_ref: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurrentLag {
    pub tau_i: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sync {
    pub tau_sync: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub p_base_mw: f64,
    /// `[t, P_dc]` breakpoints, s and pu.
    pub pdc_profile: Vec<[f64; 2]>,
    pub t_end: f64,
    pub dt: f64,
    pub i_limit: f64,
}

/// Model inputs decoded from a document. The operating current is the
/// equilibrium current of the profile's final load.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub params: FeedbackParams,
    pub scenario: Scenario,
}

impl ConfigDocument {
    pub fn after_tuning() -> Self {
        Self::from_params(&FeedbackParams::after_tuning())
    }

    #[cfg(test)]
    pub fn before_tuning() -> Self {
        Self::from_params(&FeedbackParams::before_tuning())
    }

    /// Document for `p` with the default load ramp to rated power.
    fn from_params(p: &FeedbackParams) -> Self {
        let sc = Scenario::load_ramp(*p, 1.0).expect("default grid carries unit current");
        Self::from_model(p, &sc)
    }

    pub fn from_model(p: &FeedbackParams, sc: &Scenario) -> Self {
        Self {
            grid: Grid { vg: p.vg, xg: p.xg },
            dvc: Dvc {
                kp: p.kp,
                ki: p.ki,
                tau_dc: p.tau_dc,
                vdc_ref: p.vdc_ref,
            },
            current_lag: CurrentLag { tau_i: p.tau_i },
            sync: Sync { tau_sync: p.tau_sync },
            scenario: ScenarioSection {
                p_base_mw: sc.p_base_mw,
                pdc_profile: sc.pdc_profile.iter().map(|&(t, v)| [t, v]).collect(),
                t_end: sc.t_end,
                dt: sc.dt,
                i_limit: sc.i_limit,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed configuration: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numeric document serializes")
    }

    /// Checks finiteness and the model invariants, and derives the operating
    /// current from the final load.
    pub fn to_model(&self) -> Result<Model, String> {
        let sc = &self.scenario;
        let scalars = [
            self.grid.vg,
            self.grid.xg,
            self.dvc.kp,
            self.dvc.ki,
            self.dvc.tau_dc,
            self.dvc.vdc_ref,
            self.current_lag.tau_i,
            self.sync.tau_sync,
            sc.p_base_mw,
            sc.t_end,
            sc.dt,
            sc.i_limit,
        ];
        if scalars.iter().chain(sc.pdc_profile.iter().flatten()).any(|v| !v.is_finite()) {
            return Err("configuration values must be finite".into());
        }
        let mut params = FeedbackParams {
            kp: self.dvc.kp,
            ki: self.dvc.ki,
            tau_dc: self.dvc.tau_dc,
            tau_i: self.current_lag.tau_i,
            tau_sync: self.sync.tau_sync,
            xg: self.grid.xg,
            id0: 0.0,
            vg: self.grid.vg,
            vdc_ref: self.dvc.vdc_ref,
        };
        let final_load = sc.pdc_profile.last().map_or(0.0, |bp| bp[1]);
        params.id0 = equilibrium_current(final_load, params.vg, params.xg).map_err(|e| e.to_string())?;
        let scenario = Scenario {
            params,
            p_base_mw: sc.p_base_mw,
            pdc_profile: sc.pdc_profile.iter().map(|bp| (bp[0], bp[1])).collect(),
            t_end: sc.t_end,
            dt: sc.dt,
            i_limit: sc.i_limit,
        };
        scenario.validate().map_err(|e| e.to_string())?;
        Ok(Model { params, scenario })
    }
}

impl Default for ConfigDocument {
    fn default() -> Self {
        Self::after_tuning()
    }
}
