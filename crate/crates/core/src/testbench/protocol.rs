//! Scripted rig procedures: the stepped critical-pressure search and the
//! fatigue cycling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::response::{extract_response_time, ExtractionOptions};
use super::rig::{
    Bench, BenchConfig, LogRecord, ValveState, S1_VENT_CHAMBER_2, S2_ENGAGE_CHAMBER_2,
    S4_VENT_CHAMBER_1, S5_ENGAGE_CHAMBER_1,
};
use super::valve::ValveSimModel;
use crate::error::{Error, Result};

/// Pressure increment for the hardness, thickness and angle batches.
pub const BATCH_ABC_STEP_KPA: f64 = 1.0;
/// Pressure increment for the post-processing and fatigue batches.
pub const BATCH_DE_STEP_KPA: f64 = 0.2;
pub const FATIGUE_PRESSURE_KPA: f64 = 35.0;
pub const FATIGUE_CYCLES: u32 = 500;

const ENGAGE_PAUSE_S: f64 = 10.0;
const HOLD_PAUSE_S: f64 = 5.0;
const RESET_PAUSE_S: f64 = 5.0;

/// `k`-th pressure of the search ladder, rounded to 1e-9 kPa so repeated
/// steps do not accumulate binary fractions.
pub fn ladder_value(start: f64, step: f64, k: usize) -> f64 {
    ((start + k as f64 * step) * 1e9).round() / 1e9
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchDirection {
    /// Pressurise chamber 2, valve goes from state I to state II.
    ToStateII,
    /// Pressurise chamber 1, valve goes from state II to state I.
    ToStateI,
}

impl SwitchDirection {
    fn initial_state(&self) -> ValveState {
        match self {
            SwitchDirection::ToStateII => ValveState::StateI,
            SwitchDirection::ToStateI => ValveState::StateII,
        }
    }

    fn final_state(&self) -> ValveState {
        match self {
            SwitchDirection::ToStateII => ValveState::StateII,
            SwitchDirection::ToStateI => ValveState::StateI,
        }
    }

    /// (engage port, own vent port, opposite vent port, driven chamber).
    fn ports(&self) -> (usize, usize, usize, usize) {
        match self {
            SwitchDirection::ToStateII => (S2_ENGAGE_CHAMBER_2, S1_VENT_CHAMBER_2, S4_VENT_CHAMBER_1, 2),
            SwitchDirection::ToStateI => (S5_ENGAGE_CHAMBER_1, S4_VENT_CHAMBER_1, S1_VENT_CHAMBER_2, 1),
        }
    }

    pub fn random(seed: u64) -> Self {
        if ChaCha8Rng::seed_from_u64(seed).random_bool(0.5) {
            SwitchDirection::ToStateII
        } else {
            SwitchDirection::ToStateI
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Algorithm1Options {
    pub step_kpa: f64,
    pub start_kpa: f64,
    pub max_trials: usize,
    /// Picks the switching direction.
    pub seed: u64,
    /// Record every n-th sample; `None` keeps no log.
    pub log_every: Option<u64>,
}

impl Algorithm1Options {
    pub fn new(step_kpa: f64, start_kpa: f64) -> Self {
        Algorithm1Options {
            step_kpa,
            start_kpa,
            max_trials: 200,
            seed: 0,
            log_every: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step_kpa.is_finite() && self.step_kpa > 0.0) {
            return Err(Error::InvalidConfig(format!("pressure step must be positive, got {}", self.step_kpa)));
        }
        if !(self.start_kpa.is_finite() && self.start_kpa > 0.0) {
            return Err(Error::InvalidConfig(format!("start pressure must be positive, got {}", self.start_kpa)));
        }
        if self.max_trials == 0 {
            return Err(Error::InvalidConfig("max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Algorithm2Options {
    pub cycles: u32,
    pub pressure_kpa: f64,
    pub log_every: Option<u64>,
}

impl Default for Algorithm2Options {
    fn default() -> Self {
        Algorithm2Options {
            cycles: FATIGUE_CYCLES,
            pressure_kpa: FATIGUE_PRESSURE_KPA,
            log_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    /// Pressure of the first successful trial of a critical-pressure search.
    pub critical_pressure_kpa: Option<f64>,
    pub direction: Option<SwitchDirection>,
    /// Search trials or fatigue cycles run.
    pub trials: usize,
    /// Response time of the valve model for each switching event recorded.
    pub response_times: Vec<f64>,
    /// The same events measured from the rig signals.
    pub extracted_response_times: Vec<Option<f64>>,
    /// Completed fatigue cycles before the valve stopped sealing.
    pub failed_after_cycle: Option<u32>,
    #[serde(skip)]
    pub log: Vec<LogRecord>,
}

/// Stepped critical-pressure search. Each trial holds the driving pressure
/// for 10 s, vents for 5 s, checks the controlled flow, then resets both
/// chambers to atmosphere for 5 s.
pub fn run_algorithm_1(
    valve: ValveSimModel,
    config: &BenchConfig,
    opts: &Algorithm1Options,
) -> Result<ProtocolResult> {
    opts.validate()?;
    let mut bench = Bench::new(config.clone(), valve)?;
    let direction = SwitchDirection::random(opts.seed);
    let (engage, own_vent, other_vent, chamber) = direction.ports();
    bench.set_valve_state(direction.initial_state());
    bench.set_monitored_channel(direction.final_state().blocked_channel());
    if let Some(every) = opts.log_every {
        bench.enable_log(every);
    }

    for k in 0..opts.max_trials {
        let target = ladder_value(opts.start_kpa, opts.step_kpa, k);
        bench.release_chamber_solenoids();
        bench.set_reservoir_target(target);
        bench.set_solenoid(other_vent, true);
        bench.set_solenoid(engage, true);
        bench.start_trace(chamber);
        bench.advance(ENGAGE_PAUSE_S);
        bench.set_solenoid(engage, false);
        bench.set_solenoid(own_vent, true);
        bench.advance(HOLD_PAUSE_S);
        let blocked = bench.state().flow_ml_min <= config.blocked_flow_ml_min;
        let trace = bench.take_trace();
        bench.set_solenoid(own_vent, true);
        bench.set_solenoid(other_vent, true);
        bench.advance(RESET_PAUSE_S);
        bench.set_solenoid(own_vent, false);
        bench.set_solenoid(other_vent, false);
        if blocked {
            let extracted = extract_response_time(&trace, &ExtractionOptions::new(target))
                .ok()
                .map(|e| e.response_time);
            return Ok(ProtocolResult {
                critical_pressure_kpa: Some(target),
                direction: Some(direction),
                trials: k + 1,
                response_times: vec![bench.valve().response_time()],
                extracted_response_times: vec![extracted],
                failed_after_cycle: None,
                log: bench.take_log(),
            });
        }
    }
    Err(Error::NeverSwitched { trials: opts.max_trials })
}

/// Fatigue cycling at a fixed driving pressure. Each cycle switches the
/// valve to state II and back, 15 s per half. Cycle `n` runs with the valve's
/// cycle count set to `n`; cycling stops at the first half-cycle whose
/// controlled flow is still open when its vent phase ends.
pub fn run_algorithm_2(
    valve: ValveSimModel,
    config: &BenchConfig,
    opts: &Algorithm2Options,
) -> Result<ProtocolResult> {
    if !(opts.pressure_kpa.is_finite() && opts.pressure_kpa > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "driving pressure must be positive, got {}",
            opts.pressure_kpa
        )));
    }
    let mut bench = Bench::new(config.clone(), valve)?;
    bench.set_valve_state(ValveState::StateI);
    if let Some(every) = opts.log_every {
        bench.enable_log(every);
    }
    let halves = [SwitchDirection::ToStateII, SwitchDirection::ToStateI];
    let mut response_times = Vec::new();
    let mut extracted = Vec::new();
    let mut failed_after_cycle = None;
    let mut completed = 0;

    'cycles: for n in 1..=opts.cycles {
        bench.valve_mut().cycle_count = n;
        bench.release_chamber_solenoids();
        for (half, direction) in halves.iter().enumerate() {
            let (engage, own_vent, _, chamber) = direction.ports();
            bench.set_monitored_channel(direction.final_state().blocked_channel());
            bench.set_reservoir_target(opts.pressure_kpa);
            bench.set_solenoid(engage, true);
            if half == 0 {
                bench.start_trace(chamber);
            }
            bench.advance(ENGAGE_PAUSE_S);
            bench.set_solenoid(engage, false);
            bench.set_solenoid(own_vent, true);
            bench.advance(HOLD_PAUSE_S);
            let sealed = bench.state().flow_ml_min <= config.blocked_flow_ml_min;
            bench.set_solenoid(own_vent, false);
            if half == 0 {
                let trace = bench.take_trace();
                extracted.push(
                    extract_response_time(&trace, &ExtractionOptions::new(opts.pressure_kpa))
                        .ok()
                        .map(|e| e.response_time),
                );
            }
            if !sealed {
                failed_after_cycle = Some(n - 1);
                if half == 0 {
                    extracted.pop();
                }
                break 'cycles;
            }
        }
        response_times.push(bench.valve().response_time());
        completed = n as usize;
    }

    Ok(ProtocolResult {
        critical_pressure_kpa: None,
        direction: None,
        trials: completed,
        response_times,
        extracted_response_times: extracted,
        failed_after_cycle,
        log: bench.take_log(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_exact_decimal() {
        assert_eq!(ladder_value(24.9, 0.2, 1), 25.1);
        assert_eq!(ladder_value(1.0, 1.0, 24), 25.0);
        assert_eq!(ladder_value(0.2, 0.2, 2), 0.6);
    }

    #[test]
    fn direction_is_seeded() {
        assert_eq!(SwitchDirection::random(5), SwitchDirection::random(5));
        let both = (0..32).map(SwitchDirection::random).collect::<Vec<_>>();
        assert!(both.contains(&SwitchDirection::ToStateI));
        assert!(both.contains(&SwitchDirection::ToStateII));
    }

    #[test]
    fn immediate_success_when_start_is_above() {
        let v = ValveSimModel::new(10.0, 0.5).unwrap();
        let r = run_algorithm_1(v, &BenchConfig::default(), &Algorithm1Options::new(1.0, 12.0)).unwrap();
        assert_eq!(r.critical_pressure_kpa, Some(12.0));
        assert_eq!(r.trials, 1);
    }

    #[test]
    fn never_switches_within_budget() {
        let v = ValveSimModel::new(50.0, 0.5).unwrap();
        let opts = Algorithm1Options {
            max_trials: 3,
            ..Algorithm1Options::new(1.0, 1.0)
        };
        assert_eq!(
            run_algorithm_1(v, &BenchConfig::default(), &opts).unwrap_err(),
            Error::NeverSwitched { trials: 3 }
        );
    }

    #[test]
    fn trial_timing_is_twenty_seconds() {
        let v = ValveSimModel::new(5.0, 0.5).unwrap();
        let opts = Algorithm1Options {
            log_every: Some(1000),
            ..Algorithm1Options::new(1.0, 1.0)
        };
        let r = run_algorithm_1(v, &BenchConfig::default(), &opts).unwrap();
        assert_eq!(r.trials, 5);
        assert_eq!(r.log.last().unwrap().sim_time_s, 100.0);
    }

    #[test]
    fn short_fatigue_run() {
        let v = ValveSimModel::new(18.0, 0.7).unwrap();
        let opts = Algorithm2Options {
            cycles: 3,
            ..Algorithm2Options::default()
        };
        let r = run_algorithm_2(v, &BenchConfig::default(), &opts).unwrap();
        assert_eq!(r.trials, 3);
        assert_eq!(r.response_times, vec![0.7; 3]);
        assert_eq!(r.failed_after_cycle, None);
        for t in r.extracted_response_times {
            assert!((t.unwrap() - 0.7).abs() <= 2e-3);
        }
    }
}
