//! Adaptive Simpson quadrature.
//!
//! Every integral in the shell model has a closed form; this module is the
//! numerical route those closed forms are cross-checked against.

use crate::error::{Error, Result};

/// Default relative tolerance for cross-checks.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to a relative tolerance.
///
/// The interval is first split into a fixed number of panels so that
/// periodic integrands cannot fool the error estimate with a lucky
/// three-point sample.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || rel_tol <= 0.0 {
        return Err(Error::Quadrature { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut magnitude = 0.0;
    for i in 0..INITIAL_PANELS {
        let x0 = lo + width * i as f64;
        let x1 = if i + 1 == INITIAL_PANELS { hi } else { x0 + width };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        let whole = simpson(x0, x1, f0, fm, f1);
        magnitude += whole.abs();
        panels.push((x0, x1, f0, fm, f1, whole));
    }
    // An identically zero integrand converges immediately.
    let eps_total = rel_tol * magnitude.max(f64::MIN_POSITIVE);
    let eps_panel = eps_total / INITIAL_PANELS as f64;

    let mut total = 0.0;
    for (x0, x1, f0, fm, f1, whole) in panels {
        total += refine(&f, x0, x1, f0, fm, f1, whole, eps_panel, MAX_DEPTH)
            .ok_or(Error::Quadrature { a, b })?;
    }
    if !total.is_finite() {
        return Err(Error::Quadrature { a, b });
    }
    Ok(sign * total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?;
    let r = refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?;
    Some(l + r)
}
