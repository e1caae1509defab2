use serde::{Deserialize, Serialize};

use super::LedgerError;

pub const DEFAULT_CPU_POWER_W: f64 = 65.0;
/// World-average grid intensity.
pub const DEFAULT_CARBON_INTENSITY: f64 = 0.475;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyModel {
    pub cpu_power_w: f64,
    pub carbon_intensity_kg_per_kwh: f64,
    pub utilization: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel {
            cpu_power_w: DEFAULT_CPU_POWER_W,
            carbon_intensity_kg_per_kwh: DEFAULT_CARBON_INTENSITY,
            utilization: 1.0,
        }
    }
}

impl EnergyModel {
    pub fn new(cpu_power_w: f64, carbon_intensity_kg_per_kwh: f64) -> Result<EnergyModel, LedgerError> {
        let m = EnergyModel {
            cpu_power_w,
            carbon_intensity_kg_per_kwh,
            utilization: 1.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), LedgerError> {
        if !(self.cpu_power_w > 0.0 && self.carbon_intensity_kg_per_kwh > 0.0) {
            return Err(LedgerError::InvalidEnergyModel);
        }
        if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            return Err(LedgerError::InvalidEnergyModel);
        }
        Ok(())
    }

    /// kg CO2 for `duration_s` seconds of compute.
    pub fn emissions_kg(&self, duration_s: f64) -> f64 {
        let kwh = self.cpu_power_w * self.utilization * duration_s / 3.6e6;
        kwh * self.carbon_intensity_kg_per_kwh
    }
}
