//! Single conical-shell slant modelled as a pin-ended beam of varying
//! cross-section.
//!
//! The slant shortens as the cone height `h` passes through zero. Below the
//! buckling threshold it stores axial strain energy; past it the axial force is
//! frozen at the critical load and further shortening is taken up by a
//! half-sine bending mode.
//!
//! All integrals over the slant have closed forms because the section area and
//! second moment are affine in the slant coordinate. [`numeric`] evaluates the
//! same quantities by adaptive quadrature for cross-checking.

pub mod numeric;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of one conical shell.
///
/// Lengths are in mm. The slope angle is given in degrees at construction and
/// held in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryParams", into = "GeometryParams")]
pub struct ShellGeometry {
    outer_radius: f64,
    inner_radius: f64,
    thickness: f64,
    slope_angle: f64,
    slant_length: f64,
    rest_height: f64,
}

/// Serialised form of [`ShellGeometry`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GeometryParams {
    outer_radius_mm: f64,
    inner_radius_mm: f64,
    thickness_mm: f64,
    slope_angle_deg: f64,
}

impl TryFrom<GeometryParams> for ShellGeometry {
    type Error = Error;

    fn try_from(p: GeometryParams) -> Result<Self> {
        ShellGeometry::new(
            p.outer_radius_mm,
            p.inner_radius_mm,
            p.thickness_mm,
            p.slope_angle_deg,
        )
    }
}

impl From<ShellGeometry> for GeometryParams {
    fn from(g: ShellGeometry) -> Self {
        GeometryParams {
            outer_radius_mm: g.outer_radius,
            inner_radius_mm: g.inner_radius,
            thickness_mm: g.thickness,
            slope_angle_deg: g.slope_angle_deg(),
        }
    }
}

impl ShellGeometry {
    pub const BASELINE_OUTER_RADIUS: f64 = 8.0;
    pub const BASELINE_INNER_RADIUS: f64 = 4.0;
    pub const BASELINE_THICKNESS: f64 = 1.0;
    pub const BASELINE_SLOPE_DEG: f64 = 45.0;

    pub fn new(
        outer_radius: f64,
        inner_radius: f64,
        thickness: f64,
        slope_angle_deg: f64,
    ) -> Result<Self> {
        let all_finite = [outer_radius, inner_radius, thickness, slope_angle_deg]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidGeometry("non-finite parameter".into()));
        }
        if !(inner_radius > 0.0 && outer_radius > inner_radius) {
            return Err(Error::InvalidGeometry(format!(
                "need R > r > 0, got R = {outer_radius}, r = {inner_radius}"
            )));
        }
        if thickness <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "thickness must be positive, got {thickness}"
            )));
        }
        if !(slope_angle_deg > 0.0 && slope_angle_deg < 90.0) {
            return Err(Error::InvalidGeometry(format!(
                "slope angle must lie in (0, 90) degrees, got {slope_angle_deg}"
            )));
        }
        let slope_angle = slope_angle_deg.to_radians();
        let run = outer_radius - inner_radius;
        Ok(ShellGeometry {
            outer_radius,
            inner_radius,
            thickness,
            slope_angle,
            slant_length: run / slope_angle.cos(),
            rest_height: run * slope_angle.tan(),
        })
    }

    /// R = 8 mm, r = 4 mm, t = 1 mm, 45 degrees.
    pub fn baseline() -> Self {
        Self::new(
            Self::BASELINE_OUTER_RADIUS,
            Self::BASELINE_INNER_RADIUS,
            Self::BASELINE_THICKNESS,
            Self::BASELINE_SLOPE_DEG,
        )
        .expect("baseline geometry is valid")
    }

    pub fn with_thickness(&self, thickness: f64) -> Result<Self> {
        Self::new(
            self.outer_radius,
            self.inner_radius,
            thickness,
            self.slope_angle_deg(),
        )
    }

    /// Changes the slope angle holding both radii fixed, so the rest height
    /// and slant length follow.
    pub fn with_slope_angle_deg(&self, slope_angle_deg: f64) -> Result<Self> {
        Self::new(
            self.outer_radius,
            self.inner_radius,
            self.thickness,
            slope_angle_deg,
        )
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// Slope angle in radians.
    pub fn slope_angle(&self) -> f64 {
        self.slope_angle
    }

    pub fn slope_angle_deg(&self) -> f64 {
        self.slope_angle.to_degrees()
    }

    /// Undeformed slant length L.
    pub fn slant_length(&self) -> f64 {
        self.slant_length
    }

    /// Unstressed cone height h0.
    pub fn rest_height(&self) -> f64 {
        self.rest_height
    }

    /// Horizontal projection R - r of the slant.
    pub fn radial_run(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }

    /// Largest compression the slant sees, reached at h = 0.
    pub fn max_compression(&self) -> f64 {
        self.slant_length - self.radial_run()
    }

    /// Axial shortening of the slant at cone height `h`.
    ///
    /// Heights past the rest states would stretch the slant; that tension is
    /// clamped to zero compression.
    pub fn slant_compression(&self, h: f64) -> Result<f64> {
        if !h.is_finite() {
            return Err(Error::OutOfDomain {
                what: "cone height h",
                value: h,
            });
        }
        Ok(self.compression_unchecked(h))
    }

    pub(crate) fn compression_unchecked(&self, h: f64) -> f64 {
        (self.slant_length - self.radial_run().hypot(h)).max(0.0)
    }

    /// Full-circumference section area A(x) = 2 pi (r + x cos a) t.
    pub fn cross_section_area(&self, x: f64) -> Result<f64> {
        self.check_slant_coordinate(x)?;
        Ok(2.0 * PI * self.ring_radius(x) * self.thickness)
    }

    /// Full-circumference second moment I(x) = (pi / 6)(r + x cos a) t^3.
    pub fn second_moment(&self, x: f64) -> Result<f64> {
        self.check_slant_coordinate(x)?;
        Ok(PI / 6.0 * self.ring_radius(x) * self.thickness.powi(3))
    }

    /// Radius of the ring at slant coordinate `x`, measured from the inner
    /// edge.
    pub(crate) fn ring_radius(&self, x: f64) -> f64 {
        self.inner_radius + x * self.slope_angle.cos()
    }

    fn check_slant_coordinate(&self, x: f64) -> Result<()> {
        // Allow rounding slack at x = L, where L comes from a division.
        let slack = 1e-12 * self.slant_length;
        if !x.is_finite() || x < 0.0 || x > self.slant_length + slack {
            return Err(Error::OutOfDomain {
                what: "slant coordinate x",
                value: x,
            });
        }
        Ok(())
    }
}

impl Default for ShellGeometry {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Where a Young's modulus value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulusSource {
    Explicit,
    Table,
    FallbackFormula,
}

/// Linear elastic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    /// Young's modulus in MPa.
    pub youngs_modulus: f64,
    /// Shore-A hardness the modulus was derived from, if any.
    pub shore_hardness: Option<f64>,
    pub source: ModulusSource,
}

impl MaterialModel {
    /// The 50A digital material.
    pub const BASELINE_MODULUS: f64 = 1.65;

    pub fn explicit(youngs_modulus: f64) -> Result<Self> {
        Self::check_modulus(youngs_modulus)?;
        Ok(MaterialModel {
            youngs_modulus,
            shore_hardness: None,
            source: ModulusSource::Explicit,
        })
    }

    pub(crate) fn from_hardness(
        youngs_modulus: f64,
        shore_hardness: f64,
        source: ModulusSource,
    ) -> Result<Self> {
        Self::check_modulus(youngs_modulus)?;
        Ok(MaterialModel {
            youngs_modulus,
            shore_hardness: Some(shore_hardness),
            source,
        })
    }

    pub fn baseline() -> Self {
        MaterialModel {
            youngs_modulus: Self::BASELINE_MODULUS,
            shore_hardness: Some(50.0),
            source: ModulusSource::Table,
        }
    }

    /// Same material with the modulus multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::explicit(self.youngs_modulus * factor)
    }

    fn check_modulus(e: f64) -> Result<()> {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidMaterial(format!(
                "Young's modulus must be positive and finite, got {e}"
            )));
        }
        Ok(())
    }
}

impl Default for MaterialModel {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Axial compliance of the slant, integral of dx / (E A(x)) over [0, L], in mm/N.
pub fn axial_compliance(geom: &ShellGeometry, mat: &MaterialModel) -> f64 {
    (geom.outer_radius / geom.inner_radius).ln()
        / (2.0 * PI * mat.youngs_modulus * geom.thickness * geom.slope_angle.cos())
}

/// Axial force that produces the shortening `compression`.
pub fn axial_force_from_compression(
    geom: &ShellGeometry,
    mat: &MaterialModel,
    compression: f64,
) -> Result<f64> {
    if !(compression.is_finite() && compression >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "compression",
            value: compression,
        });
    }
    Ok(compression / axial_compliance(geom, mat))
}

/// Axial strain energy (mJ) stored under a compressive force `force` (N).
pub fn axial_energy(geom: &ShellGeometry, mat: &MaterialModel, force: f64) -> Result<f64> {
    if !(force.is_finite() && force >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "axial force",
            value: force,
        });
    }
    Ok(0.5 * force * force * axial_compliance(geom, mat))
}

/// Buckling threshold of the slant under the half-sine mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucklingSolution {
    /// F_c in N.
    pub critical_force: f64,
    /// Slant shortening at the threshold, mm.
    pub critical_compression: f64,
    /// Magnitude of the cone height at the threshold, mm.
    pub critical_height: f64,
    slant_length: f64,
}

impl BucklingSolution {
    /// Mode amplitude C (mm) taking up `excess` shortening beyond the
    /// threshold.
    pub fn mode_amplitude(&self, excess: f64) -> Result<f64> {
        amplitude_for_length(self.slant_length, excess)
    }
}

/// Critical axial load of the slant by the Rayleigh-Ritz quotient with the
/// pin-ended mode w(x) = C sin(pi x / L).
///
/// The bending and shortening integrals reduce to
/// `F_c = E pi^3 t^3 (R + r) / (12 L^2)`.
pub fn critical_buckling_force(
    geom: &ShellGeometry,
    mat: &MaterialModel,
) -> Result<BucklingSolution> {
    let l = geom.slant_length;
    let critical_force = mat.youngs_modulus
        * PI.powi(3)
        * geom.thickness.powi(3)
        * (geom.outer_radius + geom.inner_radius)
        / (12.0 * l * l);
    let critical_compression = critical_force * axial_compliance(geom, mat);
    let max_compression = geom.max_compression();
    if critical_compression >= max_compression {
        return Err(Error::NoBuckling {
            critical_compression,
            max_compression,
        });
    }
    let chord = l - critical_compression;
    let run = geom.radial_run();
    let critical_height = ((chord - run) * (chord + run)).max(0.0).sqrt();
    Ok(BucklingSolution {
        critical_force,
        critical_compression,
        critical_height,
        slant_length: l,
    })
}

/// Amplitude C of the half-sine mode whose arc-length shortening equals
/// `excess_compression`: C = (2 / pi) sqrt(L * excess).
pub fn mode_amplitude(geom: &ShellGeometry, excess_compression: f64) -> Result<f64> {
    amplitude_for_length(geom.slant_length, excess_compression)
}

fn amplitude_for_length(l: f64, excess: f64) -> Result<f64> {
    if !(excess.is_finite() && excess >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "excess compression",
            value: excess,
        });
    }
    Ok(2.0 / PI * (l * excess).sqrt())
}

/// Bending strain energy (mJ) of the half-sine mode with amplitude `amplitude`.
///
/// Closed form `E C^2 pi^5 t^3 (R + r) / (48 L^3)`.
pub fn bending_energy(geom: &ShellGeometry, mat: &MaterialModel, amplitude: f64) -> Result<f64> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "mode amplitude",
            value: amplitude,
        });
    }
    let l = geom.slant_length;
    Ok(mat.youngs_modulus
        * amplitude
        * amplitude
        * PI.powi(5)
        * geom.thickness.powi(3)
        * (geom.outer_radius + geom.inner_radius)
        / (48.0 * l.powi(3)))
}

/// Strain energy U1(h) (mJ) of one shell at cone height `h`.
pub fn strain_energy(
    geom: &ShellGeometry,
    mat: &MaterialModel,
    buckling: &BucklingSolution,
    h: f64,
) -> Result<f64> {
    let h0 = geom.rest_height;
    if !h.is_finite() || h.abs() > h0 * (1.0 + 1e-9) {
        return Err(Error::OutOfDomain {
            what: "cone height h",
            value: h,
        });
    }
    let compression = geom.compression_unchecked(h);
    if compression <= buckling.critical_compression {
        let force = axial_force_from_compression(geom, mat, compression)?;
        axial_energy(geom, mat, force)
    } else {
        let stored = axial_energy(geom, mat, buckling.critical_force)?;
        let amplitude = buckling.mode_amplitude(compression - buckling.critical_compression)?;
        Ok(stored + bending_energy(geom, mat, amplitude)?)
    }
}
