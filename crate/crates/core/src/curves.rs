//! Two-shell valve energy landscape and pressure-displacement curve.
//!
//! The tether keeps both shells at the same strain energy, so the valve
//! energy is twice the single-shell energy. The driving pressure follows from
//! energy balance, `p = (dU/dh) / (dV/dh)`, with the chamber volume modelled as
//! a linear conical displacement of the slant.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig;
use crate::shell::{self, BucklingSolution, MaterialModel, ShellGeometry};

/// Default grid size for energy and pressure curves.
pub const DEFAULT_GRID: usize = 2001;
/// Smallest accepted grid.
pub const MIN_GRID: usize = 101;

/// MPa to kPa.
const KPA_PER_MPA: f64 = 1000.0;

/// Valve strain energy U(h) = 2 U1(h) sampled uniformly over [-h0, h0].
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCurve {
    heights: Vec<f64>,
    energies: Vec<f64>,
    geometry: ShellGeometry,
    material: MaterialModel,
}

impl EnergyCurve {
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Energies in mJ.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.heights.iter().copied().zip(self.energies.iter().copied())
    }

    pub fn grid_resolution(&self) -> usize {
        self.heights.len()
    }

    pub fn geometry(&self) -> &ShellGeometry {
        &self.geometry
    }

    pub fn material(&self) -> &MaterialModel {
        &self.material
    }

    /// Indices of strict local minima in the open interval (-h0, h0).
    ///
    /// A flat run of equal values bounded by strictly higher neighbours counts
    /// as one minimum, located at the run member with the smallest |h|.
    pub fn interior_minima(&self) -> Vec<usize> {
        let u = &self.energies;
        let n = u.len();
        let mut minima = Vec::new();
        let mut i = 1;
        while i + 1 < n {
            let mut j = i;
            while j + 1 < n - 1 && u[j + 1] == u[i] {
                j += 1;
            }
            if u[i - 1] > u[i] && u[j + 1] > u[j] {
                let best = (i..=j)
                    .min_by(|&a, &b| self.heights[a].abs().total_cmp(&self.heights[b].abs()))
                    .expect("non-empty run");
                minima.push(best);
            }
            i = j + 1;
        }
        minima
    }

    /// CSV with header `h_mm,U_mJ`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h_mm,U_mJ\n");
        for (h, u) in self.samples() {
            let _ = writeln!(out, "{},{}", sig(h), sig(u));
        }
        out
    }
}

/// Driving pressure p(h) in kPa on the energy curve's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureCurve {
    heights: Vec<f64>,
    pressures: Vec<f64>,
    volume_rate: f64,
    geometry: ShellGeometry,
    material: MaterialModel,
}

impl PressureCurve {
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Pressures in kPa.
    pub fn pressures(&self) -> &[f64] {
        &self.pressures
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.heights.iter().copied().zip(self.pressures.iter().copied())
    }

    /// Constant dV/dh in mm^2.
    pub fn volume_rate(&self) -> f64 {
        self.volume_rate
    }

    /// Scales every pressure by `factor`.
    pub fn scaled(&self, factor: f64) -> PressureCurve {
        PressureCurve {
            pressures: self.pressures.iter().map(|p| p * factor).collect(),
            ..self.clone()
        }
    }

    /// CSV with header `h_mm,p_kPa`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h_mm,p_kPa\n");
        for (h, p) in self.samples() {
            let _ = writeln!(out, "{},{}", sig(h), sig(p));
        }
        out
    }
}

/// Switching characteristic of one valve design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValveCharacteristic {
    pub geometry: ShellGeometry,
    pub material: MaterialModel,
    pub grid_n: usize,
    /// The two stable cone heights (mm), ascending. Empty when monostable.
    pub stable_states: Vec<f64>,
    /// Largest driving pressure between the stable states, kPa.
    pub critical_pressure_kpa: Option<f64>,
    /// Height at which that pressure peak occurs, mm.
    pub snap_height: Option<f64>,
    pub monostable: bool,
    pub buckling: Option<BucklingSolution>,
}

impl ValveCharacteristic {
    pub fn is_bistable(&self) -> bool {
        !self.monostable
    }

    fn monostable(
        geometry: ShellGeometry,
        material: MaterialModel,
        grid_n: usize,
        buckling: Option<BucklingSolution>,
    ) -> Self {
        ValveCharacteristic {
            geometry,
            material,
            grid_n,
            stable_states: Vec::new(),
            critical_pressure_kpa: None,
            snap_height: None,
            monostable: true,
            buckling,
        }
    }
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < MIN_GRID || grid_n % 2 == 0 {
        return Err(Error::InvalidGrid(grid_n));
    }
    Ok(())
}

/// Uniform grid over [-h0, h0] that is exactly mirror-symmetric and contains 0.
fn symmetric_grid(h0: f64, n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| h0 * (2.0 * i as f64 - m) / m)
        .collect()
}

/// Samples U(h) = 2 U1(h) on `grid_n` points.
pub fn total_energy_curve(
    geom: &ShellGeometry,
    mat: &MaterialModel,
    grid_n: usize,
) -> Result<EnergyCurve> {
    check_grid(grid_n)?;
    let buckling = shell::critical_buckling_force(geom, mat)?;
    let heights = symmetric_grid(geom.rest_height(), grid_n);
    let energies = heights
        .iter()
        .map(|&h| shell::strain_energy(geom, mat, &buckling, h).map(|u| 2.0 * u))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyCurve {
        heights,
        energies,
        geometry: *geom,
        material: *mat,
    })
}

/// dV/dh for a frustum annulus swept linearly between radii `inner` and
/// `outer`: pi (R^2 + R r + r^2) / 3.
pub fn frustum_sweep_area(outer: f64, inner: f64) -> f64 {
    PI * (outer * outer + outer * inner + inner * inner) / 3.0
}

/// Chamber volume rate dV/dh (mm^2) under the linear conical-displacement
/// model V(h) = h pi (R^2 + R r + r^2) / 3.
pub fn chamber_volume_derivative(geom: &ShellGeometry) -> f64 {
    frustum_sweep_area(geom.outer_radius(), geom.inner_radius())
}

/// Chamber volume change (mm^3) relative to the flat configuration.
pub fn chamber_volume(geom: &ShellGeometry, h: f64) -> f64 {
    chamber_volume_derivative(geom) * h
}

/// p(h) from central differences of U (one-sided at the ends), in kPa.
pub fn pressure_curve(curve: &EnergyCurve, geom: &ShellGeometry) -> PressureCurve {
    let h = &curve.heights;
    let u = &curve.energies;
    let n = h.len();
    let volume_rate = chamber_volume_derivative(geom);
    let pressures = (0..n)
        .map(|i| {
            let (lo, hi) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            let du_dh = (u[hi] - u[lo]) / (h[hi] - h[lo]);
            du_dh / volume_rate * KPA_PER_MPA
        })
        .collect();
    PressureCurve {
        heights: h.clone(),
        pressures,
        volume_rate,
        geometry: curve.geometry,
        material: curve.material,
    }
}

/// Rebuilds U(h) as the cumulative trapezoidal integral of p dV from -h0.
pub fn energy_from_pressure_roundtrip(pc: &PressureCurve, geom: &ShellGeometry) -> EnergyCurve {
    let volume_rate = chamber_volume_derivative(geom);
    let h = &pc.heights;
    let p = &pc.pressures;
    let mut energies = Vec::with_capacity(h.len());
    let mut acc = 0.0;
    energies.push(acc);
    for i in 1..h.len() {
        let mean_mpa = 0.5 * (p[i - 1] + p[i]) / KPA_PER_MPA;
        acc += mean_mpa * volume_rate * (h[i] - h[i - 1]);
        energies.push(acc);
    }
    EnergyCurve {
        heights: h.clone(),
        energies,
        geometry: pc.geometry,
        material: pc.material,
    }
}

/// Stable states and critical switching pressure of a valve design.
///
/// Stable states are searched in the open interval first. The rest states
/// +-h0 (where U = 0) are candidates too, and the two lowest-energy candidates
/// win, so the rest states define the minima when the interior has none.
/// The critical pressure is taken in the +h switching direction.
pub fn characterize(
    geom: &ShellGeometry,
    mat: &MaterialModel,
    grid_n: usize,
) -> Result<ValveCharacteristic> {
    check_grid(grid_n)?;
    let curve = match total_energy_curve(geom, mat, grid_n) {
        Ok(curve) => curve,
        Err(Error::NoBuckling { .. }) => {
            return Ok(ValveCharacteristic::monostable(*geom, *mat, grid_n, None));
        }
        Err(e) => return Err(e),
    };
    let buckling = shell::critical_buckling_force(geom, mat).ok();
    let u = curve.energies();
    let h = curve.heights();
    let n = u.len();

    let mut candidates = curve.interior_minima();
    if u[0] <= u[1] {
        candidates.push(0);
    }
    if u[n - 1] <= u[n - 2] {
        candidates.push(n - 1);
    }
    candidates.sort_by(|&a, &b| {
        u[a].total_cmp(&u[b])
            .then(h[a].abs().total_cmp(&h[b].abs()))
            .then(h[a].total_cmp(&h[b]))
    });
    if candidates.len() < 2 {
        return Ok(ValveCharacteristic::monostable(*geom, *mat, grid_n, buckling));
    }
    let (lo, hi) = match candidates[0].cmp(&candidates[1]) {
        Ordering::Less => (candidates[0], candidates[1]),
        _ => (candidates[1], candidates[0]),
    };

    let pc = pressure_curve(&curve, geom);
    let p = pc.pressures();
    let peak = (lo + 1..hi).max_by(|&a, &b| p[a].total_cmp(&p[b]).then(b.cmp(&a)));
    match (peak, buckling) {
        (Some(i), Some(b)) if p[i] > 0.0 => {
            let (snap, pressure) = refine_peak(geom, mat, &b, h[i.saturating_sub(2).max(lo)], h[(i + 2).min(hi)])?;
            let (snap, pressure) = if pressure > p[i] { (snap, pressure) } else { (h[i], p[i]) };
            Ok(ValveCharacteristic {
                geometry: *geom,
                material: *mat,
                grid_n,
                stable_states: vec![h[lo], h[hi]],
                critical_pressure_kpa: Some(pressure),
                snap_height: Some(snap),
                monostable: false,
                buckling,
            })
        }
        _ => Ok(ValveCharacteristic::monostable(*geom, *mat, grid_n, buckling)),
    }
}

/// p(h) in kPa from a narrow central difference of the continuous energy.
fn pressure_at(
    geom: &ShellGeometry,
    mat: &MaterialModel,
    buckling: &BucklingSolution,
    h: f64,
) -> Result<f64> {
    let h0 = geom.rest_height();
    let step = 1e-6 * h0;
    let lo = (h - step).max(-h0);
    let hi = (h + step).min(h0);
    let du = 2.0
        * (shell::strain_energy(geom, mat, buckling, hi)?
            - shell::strain_energy(geom, mat, buckling, lo)?);
    Ok(du / (hi - lo) / chamber_volume_derivative(geom) * KPA_PER_MPA)
}

/// Golden-section search for the pressure peak near the grid maximum. The
/// peak sits on the buckling kink for typical designs, and the central
/// difference smears it by up to two grid steps.
fn refine_peak(
    geom: &ShellGeometry,
    mat: &MaterialModel,
    buckling: &BucklingSolution,
    mut a: f64,
    mut b: f64,
) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let tol = 1e-12 * geom.rest_height();
    let p = |h: f64| pressure_at(geom, mat, buckling, h);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (p(x1)?, p(x2)?);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = p(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = p(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}
