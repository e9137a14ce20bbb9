//! Shell and curve quantities against a composite Gauss-Legendre rule that
//! shares no code with the library's own quadrature.

use std::f64::consts::PI;

use bvl_core::shell::{self, numeric};
use bvl_core::{
    chamber_volume_derivative, characterize, pressure_curve, total_energy_curve, MaterialModel,
    ShellGeometry,
};

const NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * w;
            NODES
                .iter()
                .zip(WEIGHTS)
                .map(|(x, wt)| wt * f(mid + 0.5 * w * x))
                .sum::<f64>()
                * 0.5
                * w
        })
        .sum()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Oracle {
    big_r: f64,
    r: f64,
    t: f64,
    alpha: f64,
    e: f64,
}

impl Oracle {
    fn new(big_r: f64, r: f64, t: f64, alpha_deg: f64, e: f64) -> Self {
        Oracle { big_r, r, t, alpha: alpha_deg.to_radians(), e }
    }

    fn length(&self) -> f64 {
        (self.big_r - self.r) / self.alpha.cos()
    }

    fn radius(&self, x: f64) -> f64 {
        self.r + x * self.alpha.cos()
    }

    fn compliance(&self) -> f64 {
        gauss(|x| 1.0 / (self.e * 2.0 * PI * self.radius(x) * self.t), 0.0, self.length(), 400)
    }

    fn bending(&self, c: f64) -> f64 {
        let l = self.length();
        let k = PI / l;
        gauss(
            |x| {
                let i = PI / 6.0 * self.radius(x) * self.t.powi(3);
                let w2 = c * k * k * (k * x).sin();
                0.5 * self.e * i * w2 * w2
            },
            0.0,
            l,
            400,
        )
    }

    fn shortening(&self, c: f64) -> f64 {
        let l = self.length();
        let k = PI / l;
        gauss(|x| 0.5 * (c * k * (k * x).cos()).powi(2), 0.0, l, 400)
    }

    fn critical_force(&self) -> f64 {
        self.bending(1.0) / self.shortening(1.0)
    }

    /// Single-shell energy at height `h`, every integral by quadrature and
    /// the mode amplitude by bisection on the shortening integral.
    fn energy(&self, h: f64) -> f64 {
        let run = self.big_r - self.r;
        let dl = (self.length() - run.hypot(h)).max(0.0);
        let comp = self.compliance();
        let fc = self.critical_force();
        let dl_c = fc * comp;
        let axial = |f: f64| {
            gauss(
                |x| f * f / (2.0 * self.e * 2.0 * PI * self.radius(x) * self.t),
                0.0,
                self.length(),
                400,
            )
        };
        if dl <= dl_c {
            return axial(dl / comp);
        }
        let excess = dl - dl_c;
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.shortening(mid) < excess {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        axial(fc) + self.bending(0.5 * (lo + hi))
    }
}

fn designs() -> Vec<(ShellGeometry, MaterialModel, Oracle)> {
    [(8.0, 4.0, 1.0, 45.0, 1.65), (8.0, 4.0, 0.7, 30.0, 0.77), (10.0, 3.0, 1.3, 60.0, 3.7)]
        .into_iter()
        .map(|(big_r, r, t, a, e)| {
            (
                ShellGeometry::new(big_r, r, t, a).unwrap(),
                MaterialModel::explicit(e).unwrap(),
                Oracle::new(big_r, r, t, a, e),
            )
        })
        .collect()
}

#[test]
fn compliance_and_axial_energy() {
    for (g, m, o) in designs() {
        assert!(rel(shell::axial_compliance(&g, &m), o.compliance()) < 1e-9);
        assert!(rel(numeric::axial_compliance(&g, &m).unwrap(), o.compliance()) < 1e-9);
        let f = shell::axial_force_from_compression(&g, &m, 0.05).unwrap();
        assert!(rel(f, 0.05 / o.compliance()) < 1e-9);
    }
}

#[test]
fn critical_force_matches_rayleigh_quotient() {
    for (g, m, o) in designs() {
        let b = shell::critical_buckling_force(&g, &m).unwrap();
        assert!(rel(b.critical_force, o.critical_force()) < 1e-9);
        assert!(rel(numeric::critical_force(&g, &m).unwrap(), o.critical_force()) < 1e-9);
    }
}

#[test]
fn bending_energy_and_amplitude() {
    for (g, m, o) in designs() {
        for c in [0.1, 0.7, 1.5] {
            assert!(rel(shell::bending_energy(&g, &m, c).unwrap(), o.bending(c)) < 1e-9);
        }
        let c = shell::mode_amplitude(&g, 0.5).unwrap();
        assert!(rel(o.shortening(c), 0.5) < 1e-9);
    }
}

#[test]
fn strain_energy_through_the_quadrature_pipeline() {
    for (g, m, o) in designs() {
        let b = shell::critical_buckling_force(&g, &m).unwrap();
        let h0 = g.rest_height();
        for h in [0.0, 0.3 * h0, -0.6 * h0, 0.95 * h0, h0] {
            let lib = shell::strain_energy(&g, &m, &b, h).unwrap();
            let oracle = o.energy(h);
            if oracle == 0.0 {
                assert!(lib.abs() < 1e-15);
            } else {
                assert!(rel(lib, oracle) < 1e-9, "h = {h}: {lib} vs {oracle}");
            }
        }
    }
}

#[test]
fn volume_rate_is_the_frustum_integral() {
    for (g, _, o) in designs() {
        // Mean disc area of a linearly tapering frustum between r and R.
        let oracle = gauss(|s| PI * (o.r + (o.big_r - o.r) * s).powi(2), 0.0, 1.0, 50);
        assert!(rel(chamber_volume_derivative(&g), oracle) < 1e-12);
    }
    assert!(rel(chamber_volume_derivative(&ShellGeometry::baseline()), 112.0 * PI / 3.0) < 1e-14);
}

#[test]
fn critical_pressure_from_independent_curve() {
    // Rebuild p(h) from the oracle energy on a coarse symmetric grid and
    // compare its peak with the library at the same grid.
    let (g, m, o) = designs().remove(0);
    let n = 201;
    let h0 = g.rest_height();
    let h: Vec<f64> = (0..n).map(|i| h0 * (2.0 * i as f64 - (n - 1) as f64) / (n - 1) as f64).collect();
    let u: Vec<f64> = h.iter().map(|&x| 2.0 * o.energy(x)).collect();
    let dv = PI * (o.big_r * o.big_r + o.big_r * o.r + o.r * o.r) / 3.0;
    let peak = (1..n - 1)
        .map(|i| (u[i + 1] - u[i - 1]) / (h[i + 1] - h[i - 1]) / dv * 1000.0)
        .fold(f64::MIN, f64::max);

    let curve = total_energy_curve(&g, &m, n).unwrap();
    let p = pressure_curve(&curve, &g);
    let lib_peak = p.pressures().iter().copied().fold(f64::MIN, f64::max);
    assert!(rel(lib_peak, peak) < 1e-8);
}

#[test]
fn critical_pressure_sits_on_the_buckling_kink() {
    // Above threshold the bending energy grows as F_c times the excess
    // compression, so dU/dh peaks where buckling starts.
    for (g, m, o) in designs() {
        let dl_c = o.critical_force() * o.compliance();
        let run = o.big_r - o.r;
        let slant = o.length() - dl_c;
        let h_k = (slant * slant - run * run).sqrt();
        let dv = PI * (o.big_r * o.big_r + o.big_r * o.r + o.r * o.r) / 3.0;
        let oracle = 2.0 * o.critical_force() * h_k / slant / dv * 1000.0;
        for n in [101, 2001] {
            let ch = characterize(&g, &m, n).unwrap();
            assert!(rel(ch.critical_pressure_kpa.unwrap(), oracle) < 1e-6, "{n}");
            let off = (ch.snap_height.unwrap().abs() - h_k).abs();
            // Within the library's difference step of the kink.
            assert!(off < 2e-6 * g.rest_height(), "{n} {off:e}");
        }
    }
}
