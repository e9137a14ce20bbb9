//! Acceptance gate. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use bvl_core::explorer::InverseParameter;
use bvl_core::materials::modulus_for_hardness;
use bvl_core::shell::{self, numeric};
use bvl_core::testbench::{
    extract_response_time, fit_exponential, ladder_value, run_algorithm_1, run_algorithm_2,
    Algorithm1Options, Algorithm2Options, Bench, BenchConfig, ExtractionOptions, ValvePreset,
    ValveSimModel,
};
use bvl_core::{
    characterize, energy_from_pressure_roundtrip, invert_design, pressure_curve, run_sweep,
    total_energy_curve, Error, HardnessTable, MaterialModel, ShellGeometry, SweepSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(ok: bool, detail: String, failures: &mut Vec<String>) -> bool {
    if !ok {
        failures.push(detail);
    }
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn finish(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: summary }
    } else {
        Outcome { pass: false, detail: format!("{summary}; failed: {}", failures.join("; ")) }
    }
}

fn baseline() -> (ShellGeometry, MaterialModel) {
    (ShellGeometry::baseline(), MaterialModel::explicit(1.65).unwrap())
}

fn pc(geom: &ShellGeometry, mat: &MaterialModel, grid: usize) -> f64 {
    characterize(geom, mat, grid).unwrap().critical_pressure_kpa.unwrap()
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ")
}

fn bistability() -> Outcome {
    let start = Instant::now();
    let (g, m) = baseline();
    let mut f = Vec::new();
    let curve = total_energy_curve(&g, &m, 2001).unwrap();
    let minima = curve.interior_minima();
    let step = 2.0 * g.rest_height() / 2000.0;
    check(
        minima.len() == 2,
        format!("U(h) has {} interior local minima, expected exactly 2", minima.len()),
        &mut f,
    );
    if minima.len() == 2 {
        let h = curve.heights();
        let asym = (h[minima[0]] + h[minima[1]]).abs();
        check(asym <= step, format!("minima asymmetric by {asym:.3e} mm"), &mut f);
    }
    let ch = characterize(&g, &m, 2001).unwrap();
    let p = ch.critical_pressure_kpa.unwrap_or(0.0);
    check(p > 0.0, format!("P_c = {p}"), &mut f);
    let elapsed = start.elapsed().as_secs_f64();
    check(elapsed < 1.0, format!("runtime {elapsed:.2} s"), &mut f);
    finish(
        f,
        format!(
            "stable states [{}] mm, P_c = {p:.4} kPa, {elapsed:.3} s",
            fmt_list(&ch.stable_states)
        ),
    )
}

fn modulus_linearity() -> Outcome {
    let (g, m) = baseline();
    let mut f = Vec::new();
    let base = characterize(&g, &m, 2001).unwrap();
    let p0 = base.critical_pressure_kpa.unwrap();
    for k in [0.5, 2.0, 4.0] {
        let c = characterize(&g, &m.scaled(k).unwrap(), 2001).unwrap();
        let ratio = c.critical_pressure_kpa.unwrap() / p0;
        check(rel(ratio, k) < 1e-9, format!("P_c ratio {ratio} for k = {k}"), &mut f);
        check(c.stable_states == base.stable_states, format!("states moved for k = {k}"), &mut f);
    }
    let sweep = run_sweep(&SweepSpec::batch_a()).unwrap();
    let ps: Vec<f64> = sweep.pressures().into_iter().map(|p| p.unwrap()).collect();
    let max = ps.iter().copied().fold(f64::MIN, f64::max);
    let min = ps.iter().copied().fold(f64::MAX, f64::min);
    let table = HardnessTable::default();
    let e70 = modulus_for_hardness(&table, 70.0).unwrap().youngs_modulus;
    let e30 = modulus_for_hardness(&table, 30.0).unwrap().youngs_modulus;
    check(
        rel(max / min, e70 / e30) < 1e-9,
        format!("hardness ratio {} vs E(70)/E(30) {}", max / min, e70 / e30),
        &mut f,
    );
    finish(
        f,
        format!("hardness max/min P_c = {:.4} (E(70)/E(30) = {:.4}; measured 4.26 for reference)", max / min, e70 / e30),
    )
}

fn trends() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let series = |spec: SweepSpec| -> Vec<f64> {
        run_sweep(&spec).unwrap().pressures().into_iter().map(|p| p.unwrap()).collect()
    };
    let thick = series(SweepSpec::batch_b());
    let hard = series(SweepSpec::batch_a());
    let angle = series(SweepSpec::batch_c());
    check(strictly_increasing(&thick), format!("thickness not increasing: {}", fmt_list(&thick)), &mut f);
    check(strictly_increasing(&hard), format!("hardness not increasing: {}", fmt_list(&hard)), &mut f);
    check(
        strictly_increasing(&angle),
        format!("slope-angle sweep 30..60 deg not monotone increasing: {}", fmt_list(&angle)),
        &mut f,
    );
    let elapsed = start.elapsed().as_secs_f64();
    check(elapsed < 10.0, format!("runtime {elapsed:.2} s"), &mut f);
    finish(
        f,
        format!(
            "thickness {:.2} -> {:.2} kPa, hardness {:.2} -> {:.2} kPa, angle {:.2} -> {:.2} kPa (measured angle envelope 19.8 -> 38.3 kPa for reference)",
            thick[0], thick[6], hard[0], hard[4], angle[0], angle[6]
        ),
    )
}

fn magnitude() -> Outcome {
    let (g, m) = baseline();
    let p = pc(&g, &m, 2001);
    let mut f = Vec::new();
    check((5.0..=70.0).contains(&p), format!("P_c = {p} outside [5, 70] kPa"), &mut f);
    finish(f, format!("baseline P_c = {p:.4} kPa"))
}

fn self_consistency() -> Outcome {
    let mut f = Vec::new();
    let designs = [
        ShellGeometry::baseline(),
        ShellGeometry::new(8.0, 4.0, 0.7, 30.0).unwrap(),
        ShellGeometry::new(8.0, 4.0, 1.3, 60.0).unwrap(),
    ];
    let m = MaterialModel::explicit(1.65).unwrap();
    let mut worst: f64 = 0.0;
    for g in designs {
        let l = g.slant_length();
        for x in [0.0, 0.37 * l, l] {
            let area = 2.0 * PI * (g.inner_radius() + x * g.slope_angle().cos()) * g.thickness();
            worst = worst.max(rel(g.cross_section_area(x).unwrap(), area));
        }
        let pairs = [
            (shell::axial_compliance(&g, &m), numeric::axial_compliance(&g, &m).unwrap()),
            (
                shell::axial_force_from_compression(&g, &m, 0.1).unwrap(),
                numeric::axial_force_from_compression(&g, &m, 0.1).unwrap(),
            ),
            (shell::axial_energy(&g, &m, 1.3).unwrap(), numeric::axial_energy(&g, &m, 1.3).unwrap()),
            (shell::bending_energy(&g, &m, 0.8).unwrap(), numeric::bending_energy(&g, &m, 0.8).unwrap()),
            (
                shell::critical_buckling_force(&g, &m).unwrap().critical_force,
                numeric::critical_force(&g, &m).unwrap(),
            ),
        ];
        for (closed, quad) in pairs {
            worst = worst.max(rel(closed, quad));
        }
    }
    check(worst < 1e-9, format!("closed form vs quadrature {worst:.2e}"), &mut f);

    let (g, m) = baseline();
    let curve = total_energy_curve(&g, &m, 2001).unwrap();
    let p = pressure_curve(&curve, &g);
    let back = energy_from_pressure_roundtrip(&p, &g);
    let umax = curve.energies().iter().copied().fold(0.0, f64::max);
    let round_trip = curve
        .energies()
        .iter()
        .zip(back.energies())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / umax;
    check(round_trip < 1e-4, format!("p dV round trip {round_trip:.2e}"), &mut f);

    let ps = p.pressures();
    let pmax = ps.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let odd = (0..ps.len()).map(|i| (ps[i] + ps[ps.len() - 1 - i]).abs()).fold(0.0, f64::max) / pmax;
    check(odd <= 1e-6, format!("p(h) oddness {odd:.2e}"), &mut f);

    let coarse = pc(&g, &m, 2001);
    let fine = pc(&g, &m, 20001);
    let refine = rel(coarse, fine);
    check(refine < 5e-3, format!("grid refinement changes P_c by {refine:.2e}"), &mut f);
    finish(
        f,
        format!(
            "quadrature {worst:.1e}, round trip {round_trip:.1e}, oddness {odd:.1e}, refinement {refine:.1e}"
        ),
    )
}

fn search_oracle() -> Outcome {
    let start = Instant::now();
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let config = BenchConfig::default();
    let mut runs = 0;
    let mut trials = 0;
    for _ in 0..100 {
        let pc: f64 = rng.random_range(5.0..=70.0);
        let response: f64 = rng.random_range(0.1..3.0);
        let seed: u64 = rng.random();
        for step in [1.0, 0.2] {
            // A ladder start below P_c, at most 40 steps under it.
            let top = ((pc - step) / step).floor().max(0.0) as usize;
            let back = rng.random_range(0..=40usize).min(top);
            let start_kpa = ladder_value(step, step, top - back);
            let opts = Algorithm1Options { seed, ..Algorithm1Options::new(step, start_kpa) };
            let valve = ValveSimModel::new(pc, response).unwrap();
            match run_algorithm_1(valve, &config, &opts) {
                Ok(r) => {
                    let measured = r.critical_pressure_kpa.unwrap();
                    trials += r.trials;
                    check(
                        measured >= pc && measured < pc + step,
                        format!("P_c {pc} step {step}: measured {measured}"),
                        &mut f,
                    );
                }
                Err(e) => {
                    check(false, format!("P_c {pc} step {step}: {e}"), &mut f);
                }
            }
            runs += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(elapsed < 30.0, format!("runtime {elapsed:.2} s"), &mut f);
    finish(
        f,
        format!("{runs} searches, {trials} trials ({:.0} s simulated) in {elapsed:.2} s", trials as f64 * 20.0),
    )
}

fn fatigue_round_trip() -> Outcome {
    let mut f = Vec::new();
    let config = BenchConfig::default();
    let chem = run_algorithm_2(
        ValvePreset::Chemical.model(18.7).unwrap(),
        &config,
        &Algorithm2Options::default(),
    )
    .unwrap();
    check(chem.response_times.len() == 500, format!("{} cycles recorded", chem.response_times.len()), &mut f);
    let series: Vec<_> = chem
        .response_times
        .iter()
        .enumerate()
        .map(|(i, &t)| ((i + 1) as f64, t))
        .collect();
    let fit = fit_exponential(&series).unwrap();
    let (ea, eb) = (rel(fit.a, 0.341), rel(fit.b, 0.00388));
    check(ea < 1e-6 && eb < 1e-6, format!("noiseless refit a {ea:.1e}, b {eb:.1e}"), &mut f);

    let normal = Normal::new(0.0, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noisy: Vec<_> = series.iter().map(|&(n, t)| (n, t * (1.0 + normal.sample(&mut rng)))).collect();
    let noisy_fit = fit_exponential(&noisy).unwrap();
    let en = rel(noisy_fit.b, 0.00388);
    check(en < 0.05, format!("noisy refit b off by {en:.3}"), &mut f);

    let phys = run_algorithm_2(
        ValvePreset::Physical.model(18.7).unwrap(),
        &config,
        &Algorithm2Options::default(),
    )
    .unwrap();
    check(
        phys.failed_after_cycle == Some(32),
        format!("physical preset failure {:?}", phys.failed_after_cycle),
        &mut f,
    );
    finish(
        f,
        format!(
            "a = {:.6}, b = {:.8}; noisy b = {:.6}; physical fails after {:?} cycles",
            fit.a, fit.b, noisy_fit.b, phys.failed_after_cycle
        ),
    )
}

fn response_extraction() -> Outcome {
    let mut f = Vec::new();
    let mut got = Vec::new();
    for t in [0.3, 1.8, 5.0] {
        let mut b = Bench::new(BenchConfig::default(), ValveSimModel::new(20.0, t).unwrap()).unwrap();
        b.set_reservoir_target(30.0);
        b.set_solenoid(4, true);
        b.set_solenoid(2, true);
        b.start_trace(2);
        b.advance(15.0);
        match extract_response_time(&b.take_trace(), &ExtractionOptions::new(30.0)) {
            Ok(ev) => {
                got.push(ev.response_time);
                check(
                    (ev.response_time - t).abs() <= 2e-3,
                    format!("injected {t} s, extracted {} s", ev.response_time),
                    &mut f,
                );
            }
            Err(e) => {
                check(false, format!("injected {t} s: {e}"), &mut f);
            }
        }
    }
    finish(f, format!("extracted {} s", fmt_list(&got)))
}

fn inverse_round_trip() -> Outcome {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = bvl_core::explorer::DesignBaseline::default();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let t: f64 = rng.random_range(0.7..=1.3);
        let target = pc(&base.geometry.with_thickness(t).unwrap(), &base.material, base.grid_n);
        match invert_design(target, InverseParameter::Thickness, (0.7, 1.3), &base) {
            Ok(sol) => {
                let err = (sol.value - t).abs();
                worst = worst.max(err);
                check(err <= 1e-3, format!("t = {t}: recovered {}", sol.value), &mut f);
            }
            Err(e) => {
                check(false, format!("t = {t}: {e}"), &mut f);
            }
        }
    }
    for target in [0.0, 500.0] {
        let r = invert_design(target, InverseParameter::Thickness, (0.7, 1.3), &base);
        check(
            matches!(r, Err(Error::TargetUnreachable { .. })),
            format!("target {target} kPa not rejected: {r:?}"),
            &mut f,
        );
    }
    finish(f, format!("worst thickness error {worst:.2e} mm; unreachable targets rejected"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("baseline bistability", bistability),
        ("modulus linearity", modulus_linearity),
        ("trend reproduction", trends),
        ("magnitude sanity", magnitude),
        ("numerical self-consistency", self_consistency),
        ("critical-pressure search oracle", search_oracle),
        ("fatigue round trip", fatigue_round_trip),
        ("response-time extraction", response_extraction),
        ("inverse-design round trip", inverse_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("acceptance {} {name:<32} {tag}  {}", i + 1, outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
