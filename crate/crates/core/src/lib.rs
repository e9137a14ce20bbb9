//! Model, design tools and virtual test bench for pneumatically driven
//! bistable conical-shell valves.
//!
//! The crate is organised bottom-up:
//!
//! * [`shell`] models one conical shell slant as a variable-section beam:
//!   compression kinematics, axial elasticity, Rayleigh-Ritz buckling and the
//!   piecewise strain energy.
//! * [`curves`] doubles that energy for the tethered two-shell valve, derives
//!   the pressure-displacement curve and extracts the critical switching
//!   pressure.
//! * [`materials`] maps Shore-A hardness to Young's modulus.
//! * [`explorer`] runs parameter sweeps and inverse design.
//! * [`testbench`] simulates the pneumatic characterisation rig and its
//!   measurement protocols.
//!
//! Units are mm, N, MPa and mJ throughout; pressures crossing an interface
//! (curves, sweeps, bench) are in kPa.

pub mod curves;
pub mod error;
pub mod explorer;
pub mod format;
pub mod materials;
pub mod quadrature;
pub mod shell;
pub mod testbench;

pub use curves::{
    characterize, chamber_volume_derivative, energy_from_pressure_roundtrip, pressure_curve,
    total_energy_curve, EnergyCurve, PressureCurve, ValveCharacteristic, DEFAULT_GRID,
};
pub use error::{Error, Result};
pub use explorer::{
    invert_design, run_sweep, InverseParameter, InverseSolution, SweepParameter, SweepResult,
    SweepRow, SweepSpec,
};
pub use materials::{modulus_for_hardness, Fallback, HardnessTable};
pub use shell::{BucklingSolution, MaterialModel, ModulusSource, ShellGeometry};
