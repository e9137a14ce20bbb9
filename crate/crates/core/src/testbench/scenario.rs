use serde::{Deserialize, Serialize};

use super::protocol::{Algorithm1Options, BATCH_ABC_STEP_KPA};
use super::rig::BenchConfig;
use super::valve::{Degradation, ValveSimModel};
use crate::error::{Error, Result};

/// Bench scenario read from a TOML file.
///
/// ```toml
/// critical_pressure_kpa = 25.0
/// base_response_time_s = 1.2
/// step_kpa = 0.2
/// start_kpa = 20.0
/// sample_rate_hz = 10000
/// seed = 7
/// leak_threshold = 32
///
/// [degradation]
/// a = 2.09
/// b = 0.028
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    /// Taken from the shell model when absent.
    pub critical_pressure_kpa: Option<f64>,
    pub base_response_time_s: f64,
    pub degradation: Option<Degradation>,
    pub leak_threshold: Option<u32>,
    pub step_kpa: f64,
    pub start_kpa: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            critical_pressure_kpa: None,
            base_response_time_s: 1.0,
            degradation: None,
            leak_threshold: None,
            step_kpa: BATCH_ABC_STEP_KPA,
            start_kpa: 1.0,
            sample_rate_hz: 1000.0,
            seed: 0,
        }
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))
    }

    /// Valve model, using `model_pc_kpa` when the scenario gives no critical
    /// pressure.
    pub fn valve_model(&self, model_pc_kpa: f64) -> Result<ValveSimModel> {
        let pc = self.critical_pressure_kpa.unwrap_or(model_pc_kpa);
        let mut v = ValveSimModel::new(pc, self.base_response_time_s)?;
        if let Some(d) = self.degradation {
            v = v.with_degradation(d)?;
        }
        if let Some(n) = self.leak_threshold {
            v = v.with_leak_threshold(n);
        }
        Ok(v)
    }

    pub fn bench_config(&self) -> BenchConfig {
        BenchConfig {
            sample_rate_hz: self.sample_rate_hz,
            ..BenchConfig::default()
        }
    }

    pub fn algorithm1_options(&self) -> Algorithm1Options {
        Algorithm1Options {
            seed: self.seed,
            ..Algorithm1Options::new(self.step_kpa, self.start_kpa)
        }
    }
}
