//! Shared fixtures for the criterion benchmarks.

use bvl_core::testbench::{BenchConfig, ValveSimModel};
use bvl_core::{MaterialModel, ShellGeometry};

/// Baseline shell and material.
pub fn baseline_design() -> (ShellGeometry, MaterialModel) {
    (ShellGeometry::baseline(), MaterialModel::baseline())
}

/// A valve switching at 18 kPa with a 0.5 s response.
pub fn reference_valve() -> ValveSimModel {
    ValveSimModel::new(18.0, 0.5).expect("valid valve")
}

pub fn reference_config() -> BenchConfig {
    BenchConfig::default()
}
