use bvl_bench::{baseline_design, reference_config, reference_valve};
use bvl_core::characterize;
use bvl_core::testbench::{run_algorithm_1, Algorithm1Options};

#[test]
fn baseline_design_is_bistable() {
    let (g, m) = baseline_design();
    let ch = characterize(&g, &m, 2001).unwrap();
    assert!(ch.is_bistable());
}

#[test]
fn reference_valve_is_found_by_the_search() {
    let valve = reference_valve();
    assert_eq!(valve.critical_pressure_kpa, 18.0);
    assert_eq!(valve.base_response_time_s, 0.5);
    let config = reference_config();
    config.validate().unwrap();
    let r = run_algorithm_1(valve, &config, &Algorithm1Options::new(1.0, 16.0)).unwrap();
    assert_eq!(r.critical_pressure_kpa, Some(18.0));
    assert_eq!(r.trials, 3);
}
