//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use latticewave::twave::TravellingWaveSpec;

/// Field means of a single-mode travelling wave by trapezoid quadrature of
/// the profile over a whole number of periods.
///
/// Returns `(R, V, P, E, F)` where `P = −⟨Φ'(r)⟩` and `F = −⟨vΦ'(r)⟩`.
/// The velocity profile is reconstructed from the strain profile through
/// `ṙ_j = v_{j+1} − v_j`, independently of the library's sampler.
pub fn quadrature_means(spec: &TravellingWaveSpec, points: usize) -> [f64; 5] {
    assert_eq!(spec.modes.len(), 1, "oracle handles single-mode waves");
    let m = spec.modes[0];
    let c = spec.c_ph;
    // strain R(φ) = R̄ + A cos(κφ + κ/2 + η); from ṙ = v(φ+1) − v(φ) with
    // v = V̄ + B cos(κφ + η): −cκA sin(·+κ/2) = −2B sin(κ/2) sin(·+κ/2)
    let b = -c * m.kappa * m.amplitude / (2.0 * (0.5 * m.kappa).sin());
    let period = 2.0 * PI / m.kappa;
    let length = period * (1000.0 / period).ceil();
    let h = length / points as f64;
    let mut acc = [0.0; 5];
    // periodic integrand: the trapezoid rule reduces to the plain mean
    for k in 0..points {
        let phi = k as f64 * h;
        let r = spec.mean_strain + m.amplitude * (m.kappa * phi + 0.5 * m.kappa + m.phase).cos();
        let v = spec.mean_velocity + b * (m.kappa * phi + m.phase).cos();
        let force = spec.potential.force(r);
        acc[0] += r;
        acc[1] += v;
        acc[2] += -force;
        acc[3] += 0.5 * v * v + spec.potential.value(r);
        acc[4] += -v * force;
    }
    acc.map(|x| x / points as f64)
}

/// All roots of `|Ω(k)| = |c|k` on `(0, 2c0/|c|]` from a dense scan refined
/// by Newton's method.
pub fn dense_roots(c: f64, c0: f64, points: usize) -> Vec<f64> {
    let c = c.abs();
    let g = |k: f64| 2.0 * c0 * (0.5 * k).sin().abs() - c * k;
    let dg = |k: f64| c0 * (0.5 * k).cos() * (0.5 * k).sin().signum() - c;
    let k_max = 2.0 * c0 / c;
    let h = k_max / points as f64;
    let mut roots = Vec::new();
    let mut prev = g(h * 1e-3);
    for i in 1..=points {
        let k = i as f64 * h;
        let cur = g(k);
        if prev == 0.0 || prev * cur < 0.0 {
            let (a, b0) = (k - h, k);
            let mut x = a + h * prev / (prev - cur);
            for _ in 0..50 {
                let step = g(x) / dg(x);
                let next = (x - step).clamp(a, b0);
                if (next - x).abs() < 1e-15 {
                    break;
                }
                x = next;
            }
            roots.push(x);
        }
        prev = cur;
    }
    roots
}
