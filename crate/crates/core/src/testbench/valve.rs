use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential growth of the response time with cycle count,
/// `T(n) = a exp(b n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Degradation {
    /// Seconds.
    pub a: f64,
    /// Per cycle.
    pub b: f64,
}

impl Degradation {
    pub fn response_time(&self, cycle: u32) -> f64 {
        self.a * (self.b * f64::from(cycle)).exp()
    }
}

/// Support-removal post-processing of the printed valve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValvePreset {
    /// Chemical bath.
    Chemical,
    /// Water jetting.
    Physical,
}

impl ValvePreset {
    /// Critical-pressure reduction of chemically processed valves relative to
    /// physically processed ones.
    pub const CHEMICAL_PRESSURE_SHIFT: f64 = 0.2036;
    /// Response-time reduction of chemically processed valves.
    pub const CHEMICAL_RESPONSE_SHIFT: f64 = 0.3123;

    pub fn degradation(&self) -> Degradation {
        match self {
            ValvePreset::Chemical => Degradation { a: 0.341, b: 0.00388 },
            ValvePreset::Physical => Degradation { a: 2.09, b: 0.0280 },
        }
    }

    pub fn leak_threshold(&self) -> Option<u32> {
        match self {
            ValvePreset::Chemical => None,
            ValvePreset::Physical => Some(32),
        }
    }

    /// Valve model for this preset. `chemical_pc_kpa` is the critical
    /// pressure of the chemically processed valve; physically processed
    /// valves switch higher by the reported shift.
    pub fn model(&self, chemical_pc_kpa: f64) -> Result<ValveSimModel> {
        let pc = match self {
            ValvePreset::Chemical => chemical_pc_kpa,
            ValvePreset::Physical => chemical_pc_kpa / (1.0 - Self::CHEMICAL_PRESSURE_SHIFT),
        };
        let deg = self.degradation();
        let mut model = ValveSimModel::new(pc, deg.a)?.with_degradation(deg)?;
        if let Some(n) = self.leak_threshold() {
            model = model.with_leak_threshold(n);
        }
        Ok(model)
    }
}

/// Bench-side model of one valve: where it switches, how fast it seals, and
/// how that changes with use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValveSimModel {
    pub critical_pressure_kpa: f64,
    /// Response time without degradation, seconds.
    pub base_response_time_s: f64,
    pub degradation: Option<Degradation>,
    /// Current working cycle; 0 before any fatigue cycling.
    pub cycle_count: u32,
    /// Cycles completed before the shell starts leaking.
    pub leak_threshold: Option<u32>,
}

impl ValveSimModel {
    pub fn new(critical_pressure_kpa: f64, base_response_time_s: f64) -> Result<Self> {
        if !(critical_pressure_kpa.is_finite() && critical_pressure_kpa > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "critical pressure must be positive, got {critical_pressure_kpa}"
            )));
        }
        if !(base_response_time_s.is_finite() && base_response_time_s >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "response time must be non-negative, got {base_response_time_s}"
            )));
        }
        Ok(ValveSimModel {
            critical_pressure_kpa,
            base_response_time_s,
            degradation: None,
            cycle_count: 0,
            leak_threshold: None,
        })
    }

    pub fn with_degradation(mut self, degradation: Degradation) -> Result<Self> {
        if !(degradation.a.is_finite() && degradation.a > 0.0 && degradation.b.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "degradation needs a > 0 and finite b, got a = {}, b = {}",
                degradation.a, degradation.b
            )));
        }
        self.degradation = Some(degradation);
        Ok(self)
    }

    pub fn with_leak_threshold(mut self, cycles: u32) -> Self {
        self.leak_threshold = Some(cycles);
        self
    }

    pub fn response_time_at(&self, cycle: u32) -> f64 {
        match self.degradation {
            Some(d) => d.response_time(cycle),
            None => self.base_response_time_s,
        }
    }

    /// Response time at the current cycle.
    pub fn response_time(&self) -> f64 {
        self.response_time_at(self.cycle_count)
    }

    /// A leaking shell no longer seals its channel.
    pub fn is_leaking(&self) -> bool {
        self.leak_threshold.is_some_and(|n| self.cycle_count > n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_time_models() {
        let v = ValveSimModel::new(20.0, 1.2).unwrap();
        assert_eq!(v.response_time_at(0), 1.2);
        assert_eq!(v.response_time_at(400), 1.2);
        let chem = ValvePreset::Chemical.model(20.0).unwrap();
        assert!((chem.response_time_at(100) - 0.341 * (0.388f64).exp()).abs() < 1e-15);
        assert_eq!(chem.critical_pressure_kpa, 20.0);
        let phys = ValvePreset::Physical.model(20.0).unwrap();
        assert!((phys.critical_pressure_kpa * (1.0 - 0.2036) - 20.0).abs() < 1e-12);
        assert_eq!(phys.leak_threshold, Some(32));
    }

    #[test]
    fn leak_starts_after_threshold() {
        let mut v = ValvePreset::Physical.model(20.0).unwrap();
        v.cycle_count = 32;
        assert!(!v.is_leaking());
        v.cycle_count = 33;
        assert!(v.is_leaking());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ValveSimModel::new(0.0, 1.0).is_err());
        assert!(ValveSimModel::new(10.0, -1.0).is_err());
        let v = ValveSimModel::new(10.0, 1.0).unwrap();
        assert!(v.with_degradation(Degradation { a: 0.0, b: 0.1 }).is_err());
    }
}
