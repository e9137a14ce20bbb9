//! Quadrature route for the slant integrals.
//!
//! Each function integrates the defining integrand directly instead of using
//! the closed forms in the parent module.

use std::f64::consts::PI;

use super::{MaterialModel, ShellGeometry};
use crate::error::Result;
use crate::quadrature::{integrate, DEFAULT_REL_TOL};

/// Integral of dx / (E A(x)) over the slant, mm/N.
pub fn axial_compliance(geom: &ShellGeometry, mat: &MaterialModel) -> Result<f64> {
    let e = mat.youngs_modulus;
    integrate(
        |x| 1.0 / (e * 2.0 * PI * geom.ring_radius(x) * geom.thickness()),
        0.0,
        geom.slant_length(),
        DEFAULT_REL_TOL,
    )
}

/// Axial force for a given shortening by inverting the compliance integral.
pub fn axial_force_from_compression(
    geom: &ShellGeometry,
    mat: &MaterialModel,
    compression: f64,
) -> Result<f64> {
    Ok(compression / axial_compliance(geom, mat)?)
}

/// Integral of F^2 / (2 E A(x)) over the slant.
pub fn axial_energy(geom: &ShellGeometry, mat: &MaterialModel, force: f64) -> Result<f64> {
    let e = mat.youngs_modulus;
    integrate(
        |x| force * force / (2.0 * e * 2.0 * PI * geom.ring_radius(x) * geom.thickness()),
        0.0,
        geom.slant_length(),
        DEFAULT_REL_TOL,
    )
}

/// Integral of (1/2) E I(x) (w'')^2 with w = C sin(pi x / L).
pub fn bending_energy(geom: &ShellGeometry, mat: &MaterialModel, amplitude: f64) -> Result<f64> {
    let l = geom.slant_length();
    let k = PI / l;
    let e = mat.youngs_modulus;
    let t3 = geom.thickness().powi(3);
    integrate(
        |x| {
            let w2 = -amplitude * k * k * (k * x).sin();
            0.5 * e * PI / 6.0 * geom.ring_radius(x) * t3 * w2 * w2
        },
        0.0,
        l,
        DEFAULT_REL_TOL,
    )
}

/// Integral of (1/2) (w')^2 with w = C sin(pi x / L): the shortening taken up
/// by the mode.
pub fn mode_shortening(geom: &ShellGeometry, amplitude: f64) -> Result<f64> {
    let l = geom.slant_length();
    let k = PI / l;
    integrate(
        |x| {
            let w1 = amplitude * k * (k * x).cos();
            0.5 * w1 * w1
        },
        0.0,
        l,
        DEFAULT_REL_TOL,
    )
}

/// Rayleigh-Ritz quotient of bending energy over mode shortening, unit
/// amplitude.
pub fn critical_force(geom: &ShellGeometry, mat: &MaterialModel) -> Result<f64> {
    Ok(bending_energy(geom, mat, 1.0)? / mode_shortening(geom, 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shell;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for geom in [
            ShellGeometry::baseline(),
            ShellGeometry::new(8.0, 4.0, 0.7, 30.0).unwrap(),
            ShellGeometry::new(12.0, 3.0, 1.3, 60.0).unwrap(),
        ] {
            let mat = MaterialModel::baseline();
            assert!(rel(shell::axial_compliance(&geom, &mat), axial_compliance(&geom, &mat).unwrap()) < 1e-9);
            let f = shell::axial_force_from_compression(&geom, &mat, 0.1).unwrap();
            assert!(rel(f, axial_force_from_compression(&geom, &mat, 0.1).unwrap()) < 1e-9);
            assert!(rel(shell::axial_energy(&geom, &mat, f).unwrap(), axial_energy(&geom, &mat, f).unwrap()) < 1e-9);
            assert!(rel(shell::bending_energy(&geom, &mat, 1.0).unwrap(), bending_energy(&geom, &mat, 1.0).unwrap()) < 1e-9);
            let c = shell::mode_amplitude(&geom, 0.5).unwrap();
            assert!(rel(mode_shortening(&geom, c).unwrap(), 0.5) < 1e-9);
        }
    }
}
