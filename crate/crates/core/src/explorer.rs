//! Parameter sweeps and inverse design over the valve model.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{characterize, ValveCharacteristic, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::format::sig;
use crate::materials::{modulus_for_hardness, HardnessTable, MAX_SHORE, MIN_SHORE, PRINTABLE_SHORE};
use crate::shell::{MaterialModel, ShellGeometry};

/// Design parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    ShoreHardness,
    Thickness,
    SlopeAngle,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::ShoreHardness => "shore_hardness",
            SweepParameter::Thickness => "thickness",
            SweepParameter::SlopeAngle => "slope_angle",
        }
    }
}

/// Everything held fixed while one parameter varies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignBaseline {
    pub geometry: ShellGeometry,
    pub material: MaterialModel,
    pub table: HardnessTable,
    pub grid_n: usize,
}

impl Default for DesignBaseline {
    fn default() -> Self {
        DesignBaseline {
            geometry: ShellGeometry::baseline(),
            material: MaterialModel::baseline(),
            table: HardnessTable::default(),
            grid_n: DEFAULT_GRID,
        }
    }
}

impl DesignBaseline {
    fn thickness(&self, t: f64) -> Result<(ShellGeometry, MaterialModel)> {
        Ok((self.geometry.with_thickness(t)?, self.material))
    }

    fn slope_angle(&self, deg: f64) -> Result<(ShellGeometry, MaterialModel)> {
        Ok((self.geometry.with_slope_angle_deg(deg)?, self.material))
    }

    fn hardness(&self, shore: f64) -> Result<(ShellGeometry, MaterialModel)> {
        Ok((self.geometry, modulus_for_hardness(&self.table, shore)?))
    }

    fn modulus(&self, e: f64) -> Result<(ShellGeometry, MaterialModel)> {
        Ok((self.geometry, MaterialModel::explicit(e)?))
    }

    fn design(&self, parameter: SweepParameter, value: f64) -> Result<(ShellGeometry, MaterialModel)> {
        match parameter {
            SweepParameter::ShoreHardness => self.hardness(value),
            SweepParameter::Thickness => self.thickness(value),
            SweepParameter::SlopeAngle => self.slope_angle(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub baseline: DesignBaseline,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, values: Vec<f64>) -> Self {
        SweepSpec {
            parameter,
            values,
            baseline: DesignBaseline::default(),
        }
    }

    pub fn with_baseline(mut self, baseline: DesignBaseline) -> Self {
        self.baseline = baseline;
        self
    }

    /// Hardness grades of batch A.
    pub fn batch_a() -> Self {
        Self::new(SweepParameter::ShoreHardness, PRINTABLE_SHORE.to_vec())
    }

    /// Shell thicknesses of batch B, 0.7 to 1.3 mm.
    pub fn batch_b() -> Self {
        Self::new(
            SweepParameter::Thickness,
            vec![0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3],
        )
    }

    /// Slope angles of batch C, 30 to 60 degrees.
    pub fn batch_c() -> Self {
        Self::new(
            SweepParameter::SlopeAngle,
            vec![30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0],
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidSweep("no values".into()));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSweep("values must be strictly increasing".into()));
        }
        for &v in &self.values {
            let ok = match self.parameter {
                SweepParameter::ShoreHardness => (MIN_SHORE..=MAX_SHORE).contains(&v),
                SweepParameter::Thickness => v.is_finite() && v > 0.0,
                SweepParameter::SlopeAngle => v > 0.0 && v < 90.0,
            };
            if !ok {
                return Err(Error::InvalidSweep(format!(
                    "{} = {v} outside its valid range",
                    self.parameter.name()
                )));
            }
        }
        // Surfaces invalid grids before any row runs.
        if self.baseline.grid_n < crate::curves::MIN_GRID || self.baseline.grid_n % 2 == 0 {
            return Err(Error::InvalidGrid(self.baseline.grid_n));
        }
        Ok(())
    }

    fn row(&self, value: f64) -> Result<SweepRow> {
        let (geom, mat) = self.baseline.design(self.parameter, value)?;
        let ch = characterize(&geom, &mat, self.baseline.grid_n)?;
        Ok(SweepRow::from_characteristic(value, &ch))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub youngs_modulus: f64,
    pub critical_pressure_kpa: Option<f64>,
    pub bistable: bool,
    pub stable_states: Vec<f64>,
}

impl SweepRow {
    fn from_characteristic(value: f64, ch: &ValveCharacteristic) -> Self {
        SweepRow {
            value,
            youngs_modulus: ch.material.youngs_modulus,
            critical_pressure_kpa: ch.critical_pressure_kpa,
            bistable: ch.is_bistable(),
            stable_states: ch.stable_states.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub baseline: DesignBaseline,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Critical pressures of bistable rows, in row order.
    pub fn pressures(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.critical_pressure_kpa).collect()
    }

    /// CSV with header `param,P_c_kPa,bistable,h_state_mm`. Monostable rows
    /// leave the pressure and state empty; the state column carries the
    /// upper stable height.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,P_c_kPa,bistable,h_state_mm\n");
        for row in &self.rows {
            let pc = row.critical_pressure_kpa.map(sig).unwrap_or_default();
            let state = row.stable_states.last().map(|&h| sig(h)).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", sig(row.value), pc, row.bistable, state);
        }
        out
    }
}

/// Characterises every value of the sweep in order.
///
/// Monostable designs are flagged in their row; they never abort the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows = spec
        .values
        .iter()
        .map(|&v| spec.row(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter: spec.parameter,
        baseline: spec.baseline.clone(),
        rows,
    })
}

/// [`run_sweep`] with rows evaluated on the current rayon pool. Row order
/// and values are identical to the sequential run.
pub fn run_sweep_parallel(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows = spec
        .values
        .par_iter()
        .map(|&v| spec.row(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter: spec.parameter,
        baseline: spec.baseline.clone(),
        rows,
    })
}

/// Parameter solved for by [`invert_design`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InverseParameter {
    /// Resolves to the nearest printable hardness grade.
    ShoreHardness,
    Thickness,
    SlopeAngle,
    /// Continuous inversion on Young's modulus (MPa).
    YoungsModulus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseSolution {
    pub parameter: InverseParameter,
    pub target_kpa: f64,
    pub value: f64,
    pub achieved_kpa: f64,
    pub iterations: usize,
}

/// Stopping rules for [`invert_design`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseOptions {
    /// Required agreement between the target and the achieved pressure.
    pub pressure_tol_kpa: f64,
    /// Bracket width, relative to the bounds, at which bisection stops.
    pub relative_bracket: f64,
    pub max_iterations: usize,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            pressure_tol_kpa: 0.05,
            relative_bracket: 1e-9,
            max_iterations: 60,
        }
    }
}

fn critical_pressure(
    baseline: &DesignBaseline,
    parameter: InverseParameter,
    value: f64,
) -> Result<Option<f64>> {
    let (geom, mat) = match parameter {
        InverseParameter::ShoreHardness => baseline.hardness(value)?,
        InverseParameter::Thickness => baseline.thickness(value)?,
        InverseParameter::SlopeAngle => baseline.slope_angle(value)?,
        InverseParameter::YoungsModulus => baseline.modulus(value)?,
    };
    Ok(characterize(&geom, &mat, baseline.grid_n)?.critical_pressure_kpa)
}

/// Finds the parameter value whose critical pressure matches `target_kpa`.
pub fn invert_design(
    target_kpa: f64,
    parameter: InverseParameter,
    bounds: (f64, f64),
    baseline: &DesignBaseline,
) -> Result<InverseSolution> {
    invert_design_with(target_kpa, parameter, bounds, baseline, &InverseOptions::default())
}

pub fn invert_design_with(
    target_kpa: f64,
    parameter: InverseParameter,
    bounds: (f64, f64),
    baseline: &DesignBaseline,
    opts: &InverseOptions,
) -> Result<InverseSolution> {
    let (lo, hi) = bounds;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || !target_kpa.is_finite() {
        return Err(Error::InvalidSweep(format!("invalid bounds [{lo}, {hi}]")));
    }
    if parameter == InverseParameter::ShoreHardness {
        return invert_hardness(target_kpa, bounds, baseline, opts);
    }

    let eval = |v: f64| -> Result<f64> {
        critical_pressure(baseline, parameter, v)?
            .ok_or_else(|| Error::NonMonotone(format!("monostable design at {v}")))
    };
    let p_lo = eval(lo)?;
    let p_hi = eval(hi)?;
    if p_lo == p_hi {
        return Err(Error::NonMonotone(format!(
            "equal critical pressure {p_lo} kPa at both bounds"
        )));
    }
    let increasing = p_hi > p_lo;
    let (p_min, p_max) = if increasing { (p_lo, p_hi) } else { (p_hi, p_lo) };
    if target_kpa < p_min - opts.pressure_tol_kpa || target_kpa > p_max + opts.pressure_tol_kpa {
        return Err(Error::TargetUnreachable {
            target: target_kpa,
            low: p_min,
            high: p_max,
        });
    }

    let width = hi - lo;
    let (mut a, mut b) = (lo, hi);
    let mut best = if (p_lo - target_kpa).abs() <= (p_hi - target_kpa).abs() {
        (lo, p_lo)
    } else {
        (hi, p_hi)
    };
    let mut iterations = 0;
    while iterations < opts.max_iterations && b - a > opts.relative_bracket * width {
        iterations += 1;
        let mid = 0.5 * (a + b);
        let p_mid = eval(mid)?;
        if (p_mid - target_kpa).abs() <= (best.1 - target_kpa).abs() {
            best = (mid, p_mid);
        }
        if p_mid == target_kpa {
            break;
        }
        if (p_mid < target_kpa) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    if (best.1 - target_kpa).abs() >= opts.pressure_tol_kpa {
        return Err(Error::NonMonotone(format!(
            "bisection ended {} kPa from the target",
            (best.1 - target_kpa).abs()
        )));
    }
    Ok(InverseSolution {
        parameter,
        target_kpa,
        value: best.0,
        achieved_kpa: best.1,
        iterations,
    })
}

fn invert_hardness(
    target_kpa: f64,
    (lo, hi): (f64, f64),
    baseline: &DesignBaseline,
    opts: &InverseOptions,
) -> Result<InverseSolution> {
    let grades: Vec<f64> = PRINTABLE_SHORE
        .iter()
        .copied()
        .filter(|s| (lo..=hi).contains(s))
        .collect();
    if grades.len() < 2 {
        return Err(Error::InvalidSweep(format!(
            "fewer than two printable hardness grades in [{lo}, {hi}]"
        )));
    }
    let pressures = grades
        .iter()
        .map(|&s| {
            critical_pressure(baseline, InverseParameter::ShoreHardness, s)?
                .ok_or_else(|| Error::NonMonotone(format!("monostable design at {s}A")))
        })
        .collect::<Result<Vec<_>>>()?;
    let (first, last) = (pressures[0], pressures[pressures.len() - 1]);
    if !(last > first) {
        return Err(Error::NonMonotone(
            "critical pressure does not increase with hardness".into(),
        ));
    }
    if target_kpa < first - opts.pressure_tol_kpa || target_kpa > last + opts.pressure_tol_kpa {
        return Err(Error::TargetUnreachable {
            target: target_kpa,
            low: first,
            high: last,
        });
    }
    let k = (0..grades.len())
        .min_by(|&i, &j| {
            (pressures[i] - target_kpa)
                .abs()
                .total_cmp(&(pressures[j] - target_kpa).abs())
        })
        .expect("at least two grades");
    Ok(InverseSolution {
        parameter: InverseParameter::ShoreHardness,
        target_kpa,
        value: grades[k],
        achieved_kpa: pressures[k],
        iterations: grades.len(),
    })
}
