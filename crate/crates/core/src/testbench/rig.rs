use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::regulator::{Pid, PidGains};
use super::response::ResponseTrace;
use super::valve::ValveSimModel;
use crate::error::{Error, Result};
use crate::format::sig;

pub const S0_RESERVOIR_SUPPLY: usize = 0;
pub const S1_VENT_CHAMBER_2: usize = 1;
pub const S2_ENGAGE_CHAMBER_2: usize = 2;
pub const S3_RESERVOIR_EXHAUST: usize = 3;
pub const S4_VENT_CHAMBER_1: usize = 4;
pub const S5_ENGAGE_CHAMBER_1: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValveState {
    /// Top channel blocked, bottom open.
    #[serde(rename = "I")]
    StateI,
    /// Bottom channel blocked, top open.
    #[serde(rename = "II")]
    StateII,
}

impl ValveState {
    pub fn blocked_channel(&self) -> Channel {
        match self {
            ValveState::StateI => Channel::Top,
            ValveState::StateII => Channel::Bottom,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ValveState::StateI => "I",
            ValveState::StateII => "II",
        }
    }

    /// Chamber index (0 = chamber 1, 1 = chamber 2) whose pressure switches
    /// the valve into this state.
    fn driving_chamber(&self) -> usize {
        match self {
            ValveState::StateI => 0,
            ValveState::StateII => 1,
        }
    }
}

/// Controlled air channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    Top,
    Bottom,
}

impl Channel {
    fn index(&self) -> usize {
        match self {
            Channel::Top => 0,
            Channel::Bottom => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub sample_rate_hz: f64,
    /// First-order lag of chamber filling and venting.
    pub fill_time_constant_s: f64,
    pub pid: PidGains,
    /// Reservoir pressure rate per unit of regulator output, 1/s.
    pub reservoir_gain_per_s: f64,
    /// Pressures within this distance of their source are considered
    /// equalised and snap onto it.
    pub pressure_resolution_kpa: f64,
    pub pump_flow_ml_min: f64,
    /// Flow at or below which a channel counts as blocked.
    pub blocked_flow_ml_min: f64,
    /// Relative band around the target in which a chamber counts as engaged.
    pub engage_band: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sample_rate_hz: 1000.0,
            fill_time_constant_s: 0.5,
            pid: PidGains::default(),
            reservoir_gain_per_s: 10.0,
            pressure_resolution_kpa: 1e-3,
            pump_flow_ml_min: 2000.0,
            blocked_flow_ml_min: 5.0,
            engage_band: 0.02,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sample_rate_hz", self.sample_rate_hz),
            ("fill_time_constant_s", self.fill_time_constant_s),
            ("reservoir_gain_per_s", self.reservoir_gain_per_s),
            ("pressure_resolution_kpa", self.pressure_resolution_kpa),
            ("pump_flow_ml_min", self.pump_flow_ml_min),
            ("blocked_flow_ml_min", self.blocked_flow_ml_min),
            ("engage_band", self.engage_band),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        // Time step must not exceed 1 ms.
        if self.sample_rate_hz < 1000.0 {
            return Err(Error::InvalidConfig(format!(
                "sample rate {} Hz gives a step above 1 ms",
                self.sample_rate_hz
            )));
        }
        if self.pump_flow_ml_min <= self.blocked_flow_ml_min {
            return Err(Error::InvalidConfig(
                "pump flow must exceed the blocked-flow threshold".into(),
            ));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    /// Number of samples covering `seconds`.
    pub fn ticks(&self, seconds: f64) -> u64 {
        (seconds * self.sample_rate_hz).round() as u64
    }
}

/// Snapshot of the rig; also the log record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchState {
    pub sim_time_s: f64,
    pub reservoir_kpa: f64,
    /// Chamber 1 and chamber 2 gauge pressures.
    pub chamber_kpa: [f64; 2],
    pub solenoids: [bool; 6],
    pub valve_state: ValveState,
    /// Flow through the monitored channel.
    pub flow_ml_min: f64,
}

pub type LogRecord = BenchState;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Seal {
    Open,
    /// Blocked by the valve state, flow not yet decaying.
    Waiting,
    Decaying { factor: f64 },
    Sealed,
}

/// The simulated rig.
#[derive(Debug, Clone)]
pub struct Bench {
    config: BenchConfig,
    dt: f64,
    fill_decay: f64,
    valve: ValveSimModel,
    state: BenchState,
    tick: u64,
    setpoint: Option<f64>,
    latched: bool,
    pid: Pid,
    engaged_at: [Option<u64>; 2],
    seals: [Seal; 2],
    flows: [f64; 2],
    monitored: Channel,
    toggles: u64,
    log: Option<(u64, Vec<LogRecord>)>,
    trace: Option<(usize, ResponseTrace)>,
}

impl Bench {
    /// A rig at atmosphere with the valve in state I and the bottom channel
    /// monitored.
    pub fn new(config: BenchConfig, valve: ValveSimModel) -> Result<Self> {
        config.validate()?;
        let dt = config.dt();
        let fill_decay = (-dt / config.fill_time_constant_s).exp();
        let pump = config.pump_flow_ml_min;
        let pid = Pid::new(config.pid);
        let mut bench = Bench {
            dt,
            fill_decay,
            valve,
            state: BenchState {
                sim_time_s: 0.0,
                reservoir_kpa: 0.0,
                chamber_kpa: [0.0; 2],
                solenoids: [false; 6],
                valve_state: ValveState::StateI,
                flow_ml_min: pump,
            },
            tick: 0,
            setpoint: None,
            latched: false,
            pid,
            engaged_at: [None; 2],
            seals: [Seal::Sealed, Seal::Open],
            flows: [0.0, pump],
            monitored: Channel::Bottom,
            toggles: 0,
            log: None,
            trace: None,
            config,
        };
        bench.set_valve_state(ValveState::StateI);
        Ok(bench)
    }

    pub fn config(&self) -> &BenchConfig {
        &self.config
    }

    pub fn state(&self) -> &BenchState {
        &self.state
    }

    pub fn valve(&self) -> &ValveSimModel {
        &self.valve
    }

    pub fn valve_mut(&mut self) -> &mut ValveSimModel {
        &mut self.valve
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Number of valve state changes so far.
    pub fn toggles(&self) -> u64 {
        self.toggles
    }

    pub fn flow(&self, channel: Channel) -> f64 {
        self.flows[channel.index()]
    }

    /// Channels currently blocked by the valve. Always exactly one.
    pub fn blocked_channels(&self) -> Vec<Channel> {
        vec![self.state.valve_state.blocked_channel()]
    }

    /// Time at which chamber `chamber` (1 or 2) became engaged, if it is.
    pub fn engaged_at(&self, chamber: usize) -> Option<f64> {
        self.engaged_at
            .get(chamber.wrapping_sub(1))
            .copied()
            .flatten()
            .map(|t| t as f64 * self.dt)
    }

    /// Places the valve in `state` with its blocked channel fully sealed, as
    /// when a valve is mounted on the rig.
    pub fn set_valve_state(&mut self, state: ValveState) {
        self.state.valve_state = state;
        let blocked = state.blocked_channel().index();
        let open = 1 - blocked;
        self.seals[blocked] = if self.valve.is_leaking() { Seal::Waiting } else { Seal::Sealed };
        self.seals[open] = Seal::Open;
        self.flows[blocked] = if self.valve.is_leaking() { self.config.pump_flow_ml_min } else { 0.0 };
        self.flows[open] = self.config.pump_flow_ml_min;
        self.state.flow_ml_min = self.flows[self.monitored.index()];
    }

    pub fn set_monitored_channel(&mut self, channel: Channel) {
        self.monitored = channel;
        self.state.flow_ml_min = self.flows[channel.index()];
    }

    pub fn set_solenoid(&mut self, index: usize, on: bool) {
        self.state.solenoids[index] = on;
    }

    /// Turns S1 to S5 off.
    pub fn release_chamber_solenoids(&mut self) {
        for s in 1..=5 {
            self.state.solenoids[s] = false;
        }
    }

    /// Starts regulating the reservoir toward `target_kpa`.
    pub fn set_reservoir_target(&mut self, target_kpa: f64) {
        if self.setpoint != Some(target_kpa) {
            self.latched = false;
            self.pid.reset();
        }
        self.setpoint = Some(target_kpa);
        self.state.solenoids[S0_RESERVOIR_SUPPLY] = true;
    }

    /// Whether the reservoir has reached and holds its setpoint.
    pub fn reservoir_settled(&self) -> bool {
        self.latched
    }

    /// Records every `every`-th sample from now on.
    pub fn enable_log(&mut self, every: u64) {
        self.log = Some((every.max(1), vec![self.state.clone()]));
    }

    pub fn take_log(&mut self) -> Vec<LogRecord> {
        self.log.as_mut().map(|(_, r)| std::mem::take(r)).unwrap_or_default()
    }

    /// Starts recording chamber `chamber` (1 or 2) pressure and the monitored
    /// flow at every sample.
    pub fn start_trace(&mut self, chamber: usize) {
        self.trace = Some((chamber - 1, ResponseTrace::default()));
    }

    pub fn take_trace(&mut self) -> ResponseTrace {
        self.trace.take().map(|(_, t)| t).unwrap_or_default()
    }

    /// Runs for `seconds` of simulated time.
    pub fn advance(&mut self, seconds: f64) {
        for _ in 0..self.config.ticks(seconds) {
            self.step();
        }
    }

    /// Advances the rig by one sample period.
    pub fn step(&mut self) -> &BenchState {
        self.tick += 1;
        let res = self.config.pressure_resolution_kpa;
        let sol = self.state.solenoids;

        // Reservoir.
        let mut pr = self.state.reservoir_kpa;
        if sol[S3_RESERVOIR_EXHAUST] {
            pr *= self.fill_decay;
            if pr <= res {
                pr = 0.0;
            }
            self.latched = false;
        } else if let (true, Some(sp)) = (sol[S0_RESERVOIR_SUPPLY], self.setpoint) {
            if self.latched {
                pr = sp;
            } else {
                let before = sp - pr;
                let u = self.pid.update(before, self.dt);
                pr = (pr + self.config.reservoir_gain_per_s * u * self.dt).max(0.0);
                // The regulator holds the setpoint once reached instead of
                // overshooting it.
                if (sp - pr).abs() <= res || (sp - pr).signum() != before.signum() {
                    pr = sp;
                    self.latched = true;
                }
            }
        }
        self.state.reservoir_kpa = pr;

        // Chambers: vent wins over engage when both are open.
        let ports = [
            (S5_ENGAGE_CHAMBER_1, S4_VENT_CHAMBER_1),
            (S2_ENGAGE_CHAMBER_2, S1_VENT_CHAMBER_2),
        ];
        for (c, &(engage, vent)) in ports.iter().enumerate() {
            let source = if sol[vent] {
                Some(0.0)
            } else if sol[engage] {
                Some(pr)
            } else {
                None
            };
            let mut p = self.state.chamber_kpa[c];
            if let Some(ps) = source {
                p = ps - (ps - p) * self.fill_decay;
                if (ps - p).abs() <= res {
                    p = ps;
                }
            }
            self.state.chamber_kpa[c] = p;

            let fed = sol[engage] && !sol[vent];
            match (fed, self.setpoint) {
                (true, Some(sp)) => {
                    if self.engaged_at[c].is_none() && (p - sp).abs() <= self.config.engage_band * sp {
                        self.engaged_at[c] = Some(self.tick);
                    }
                }
                _ => self.engaged_at[c] = None,
            }
        }

        // Valve state machine: switches on the chamber pressure difference.
        let diff = self.state.chamber_kpa[1] - self.state.chamber_kpa[0];
        let pc = self.valve.critical_pressure_kpa;
        let next = match self.state.valve_state {
            ValveState::StateI if diff >= pc => Some(ValveState::StateII),
            ValveState::StateII if -diff >= pc => Some(ValveState::StateI),
            _ => None,
        };
        if let Some(next) = next {
            self.state.valve_state = next;
            self.toggles += 1;
            let blocked = next.blocked_channel().index();
            self.seals[blocked] = Seal::Waiting;
            self.seals[1 - blocked] = Seal::Open;
        }

        // Controlled flow.
        let pump = self.config.pump_flow_ml_min;
        let driver = self.state.valve_state.driving_chamber();
        let (engage_port, vent_port) = ports[driver];
        let drive_removed = !sol[engage_port] || sol[vent_port];
        for ch in 0..2 {
            self.flows[ch] = match self.seals[ch] {
                Seal::Open => pump,
                Seal::Sealed => 0.0,
                Seal::Waiting if self.valve.is_leaking() => pump,
                Seal::Waiting => {
                    if self.engaged_at[driver].is_some() || drive_removed {
                        let t = self.valve.response_time();
                        if t <= 0.0 {
                            self.seals[ch] = Seal::Sealed;
                            0.0
                        } else {
                            let tau = t / (pump / self.config.blocked_flow_ml_min).ln();
                            self.seals[ch] = Seal::Decaying {
                                factor: (-self.dt / tau).exp(),
                            };
                            pump
                        }
                    } else {
                        pump
                    }
                }
                Seal::Decaying { factor } => self.flows[ch] * factor,
            };
        }

        self.state.flow_ml_min = self.flows[self.monitored.index()];
        self.state.sim_time_s = self.tick as f64 * self.dt;

        if let Some((every, records)) = self.log.as_mut() {
            if self.tick % *every == 0 {
                records.push(self.state.clone());
            }
        }
        if let Some((c, trace)) = self.trace.as_mut() {
            trace.push(self.state.sim_time_s, self.state.chamber_kpa[*c], self.state.flow_ml_min);
        }
        &self.state
    }
}

/// Log CSV with header
/// `t_s,P_reservoir_kPa,P1_kPa,P2_kPa,Q_mL_min,valve_state,S0,...,S5`.
pub fn logs_to_csv(records: &[LogRecord]) -> String {
    let mut out = String::from("t_s,P_reservoir_kPa,P1_kPa,P2_kPa,Q_mL_min,valve_state,S0,S1,S2,S3,S4,S5\n");
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            sig(r.sim_time_s),
            sig(r.reservoir_kpa),
            sig(r.chamber_kpa[0]),
            sig(r.chamber_kpa[1]),
            sig(r.flow_ml_min),
            r.valve_state.label()
        );
        for s in r.solenoids {
            out.push_str(if s { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}
