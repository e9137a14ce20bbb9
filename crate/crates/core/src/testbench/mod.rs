//! Virtual pneumatic characterisation rig.
//!
//! A reservoir regulated by a PID loop feeds the two valve chambers through
//! solenoid valves; a pump pushes a constant flow through the controlled
//! channels and a flow sensor watches one of them. The bistable valve itself
//! is a two-state machine with an injected response time.
//!
//! Solenoid roles:
//!
//! | index | role |
//! |-------|------|
//! | S0 | reservoir supply (driven by the regulator) |
//! | S1 | vent chamber 2 |
//! | S2 | engage chamber 2 from the reservoir |
//! | S3 | reservoir exhaust |
//! | S4 | vent chamber 1 |
//! | S5 | engage chamber 1 from the reservoir |
//!
//! State I blocks the top channel and state II the bottom one; pressurising
//! chamber 2 switches I -> II, chamber 1 switches II -> I.

mod fatigue;
mod protocol;
mod regulator;
mod response;
mod rig;
mod scenario;
mod valve;

pub use fatigue::{fit_exponential, ExponentialFit};
pub use protocol::{
    ladder_value, run_algorithm_1, run_algorithm_2, Algorithm1Options, Algorithm2Options,
    ProtocolResult, SwitchDirection, BATCH_ABC_STEP_KPA, BATCH_DE_STEP_KPA, FATIGUE_CYCLES,
    FATIGUE_PRESSURE_KPA,
};
pub use regulator::{Pid, PidGains};
pub use response::{extract_response_time, ExtractionOptions, ResponseEvents, ResponseTrace};
pub use rig::{logs_to_csv, Bench, BenchConfig, BenchState, Channel, LogRecord, ValveState};
pub use scenario::Scenario;
pub use valve::{Degradation, ValvePreset, ValveSimModel};
