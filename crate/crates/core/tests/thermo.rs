use std::f64::consts::PI;

use latticewave::riemann::{run_riemann, RiemannConfig};
use latticewave::thermo::{
    average_trajectory, conservation_residual, production_xi, window_average, FieldSlice, Law,
    ScalingConfig, TestFunction, ThermoFields,
};
use latticewave::twave::{build_wave, tw_mean_fields};
use latticewave::{simulate, ChainState, Direction, Potential, SimConfig, TravellingWaveSpec};

fn unit_wave(r: f64, v: f64) -> TravellingWaveSpec {
    TravellingWaveSpec::single_mode(
        Potential::unit_harmonic(),
        PI / 3.0,
        1.0 / 3f64.sqrt(),
        0.0,
        Direction::Right,
        r,
        v,
    )
}

#[test]
fn window_average_of_sampled_wave_matches_closed_form() {
    let spec = unit_wave(0.25, -0.4);
    let closed = tw_mean_fields(&spec).unwrap();
    let state = build_wave(&spec)
        .unwrap()
        .sample(-3000, 3000, 17.0)
        .unwrap();
    let cfg = ScalingConfig {
        epsilon: 1.0 / 6000.0,
        halfwidth: 200,
        stride: 40,
    };
    let fields = window_average(&state, &Potential::unit_harmonic(), &cfg).unwrap();
    for c in fields.slices[0].cells.iter().filter(|c| !c.truncated) {
        for (a, b) in [
            (c.r, closed.r),
            (c.v, closed.v),
            (c.e, closed.e),
            (c.f, closed.f),
            (c.e_osc, closed.e_osc),
            (c.q, closed.q),
        ] {
            assert!((a - b).abs() < 0.02 * b.abs(), "{a} vs {b}");
        }
    }
}

#[test]
fn harmonic_oscillatory_energy_is_a_variance() {
    let spec = unit_wave(0.1, 0.2);
    let state = build_wave(&spec).unwrap().sample(-1000, 1000, 0.0).unwrap();
    let p = Potential::harmonic(1.0, 0.3, 0.0).unwrap();
    let cfg = ScalingConfig::for_particles(2000);
    let fields = window_average(&state, &p, &cfg).unwrap();
    let (r, v) = (state.strains(), state.velocities());
    for c in fields.slices[0].cells.iter().filter(|c| !c.truncated) {
        assert!(c.e_osc >= -1e-9 * c.e.abs());
        // ½⟨(v − V)²⟩ + ⟨Φ(r) − Φ(R)⟩ over the same window
        let jc = (c.xi / cfg.epsilon).round() as i64;
        let w = cfg.halfwidth as i64;
        let idx = |j: i64| (j + 1000) as usize;
        let n = (2 * w + 1) as f64;
        let kin: f64 = (jc - w..=jc + w)
            .map(|j| 0.5 * (v[idx(j)] - c.v).powi(2))
            .sum::<f64>()
            / n;
        let pot: f64 = (jc - w..=jc + w)
            .map(|j| p.value(r[idx(j)]) - p.value(c.r))
            .sum::<f64>()
            / n;
        assert!(
            (kin + pot - c.e_osc).abs() < 1e-10,
            "{} vs {}",
            kin + pot,
            c.e_osc
        );
    }
}

fn sampled_wave_fields(kappa: f64, n: usize) -> ThermoFields {
    let spec = TravellingWaveSpec::single_mode(
        Potential::unit_harmonic(),
        kappa,
        0.5,
        0.3,
        Direction::Right,
        0.3,
        0.1,
    );
    let wave = build_wave(&spec).unwrap();
    let cfg = ScalingConfig::for_particles(n);
    let half = n as i64 / 2;
    let slices: Vec<FieldSlice> = (0..=20)
        .map(|k| {
            let s = wave
                .sample(-half, half, 0.01 * k as f64 * n as f64)
                .unwrap();
            window_average(&s, &Potential::unit_harmonic(), &cfg)
                .unwrap()
                .slices
                .remove(0)
        })
        .collect();
    ThermoFields {
        epsilon: cfg.epsilon,
        slices,
    }
}

#[test]
fn sampled_travelling_wave_has_negligible_residual() {
    // the exact residual is zero, what is left is boxcar aliasing of the oscillations
    let test = TestFunction {
        tau_center: 0.1,
        tau_halfwidth: 0.09,
        xi_center: 0.0,
        xi_halfwidth: 0.3,
    };
    for kappa in [0.5, 1.0, PI / 3.0, 2.3] {
        for n in [1000, 4000] {
            let fields = sampled_wave_fields(kappa, n);
            for law in [Law::Mass, Law::Momentum, Law::Energy] {
                let r = conservation_residual(&fields, law, &test, false).unwrap();
                assert!(r.relative() < 1e-4, "κ = {kappa}, N = {n}, {law:?}: {r:?}");
            }
        }
    }
}

fn rp1_fields(n: usize) -> ThermoFields {
    let mut cfg = RiemannConfig::new(-4.0, 1.0, 1.0, -1.0, n, 0.4);
    cfg.slices = 40;
    run_riemann(&cfg).unwrap().fields
}

fn rp1_test_function() -> TestFunction {
    TestFunction {
        tau_center: 0.2,
        tau_halfwidth: 0.18,
        xi_center: 0.0,
        xi_halfwidth: 0.4,
    }
}

#[test]
fn riemann_residual_shrinks_with_epsilon() {
    let residual = |f: &ThermoFields, law| {
        conservation_residual(f, law, &rp1_test_function(), false)
            .unwrap()
            .relative()
    };
    let coarse = rp1_fields(1000);
    let fine = rp1_fields(4000);
    for law in [Law::Mass, Law::Momentum] {
        let (a, b) = (residual(&coarse, law), residual(&fine, law));
        assert!(
            2.0 * b <= a,
            "{law:?}: {a:e} at ε = 1/1000, {b:e} at ε = 1/4000"
        );
    }
    // the energy error follows the window width √N ε, so it needs a longer lever
    let finest = rp1_fields(16000);
    let e = [&coarse, &fine, &finest].map(|f| residual(f, Law::Energy));
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    assert!(2.0 * e[2] <= e[0], "{e:?}");
}

#[test]
fn riemann_run_conserves_mass_weakly() {
    let fields = rp1_fields(4000);
    for law in [Law::Mass, Law::Momentum, Law::Energy] {
        let r = conservation_residual(&fields, law, &rp1_test_function(), false).unwrap();
        assert!(r.relative() < 1e-2, "{law:?}: {r:?}");
    }
}

#[test]
fn oscillatory_energy_balance_across_interface() {
    // d/dτ ∫E_osc + Q(b) − Q(a) = ∫Ξ on [a, b] = [0.1, 0.29] for τ ∈ [0.3, 0.4],
    // where the interval holds the phase interface and no other wave
    let mut cfg = RiemannConfig::new(-4.0, 1.0, 1.0, -1.0, 4000, 0.4);
    cfg.slices = 40;
    let run = run_riemann(&cfg).unwrap();
    let (a, b) = (0.1, 0.29);
    let h = run.fields.h_xi();
    let slices: Vec<&FieldSlice> = run
        .fields
        .slices
        .iter()
        .filter(|s| s.tau >= 0.3 - 1e-9)
        .collect();
    let integral = |s: &FieldSlice, f: fn(&latticewave::thermo::CellFields) -> f64| -> f64 {
        s.cells
            .iter()
            .filter(|c| c.xi >= a && c.xi <= b)
            .map(|c| f(c) * h)
            .sum()
    };
    let first = slices[0];
    let last = slices[slices.len() - 1];
    let span = last.tau - first.tau;
    let storage = (integral(last, |c| c.e_osc) - integral(first, |c| c.e_osc)) / span;
    let mut flux = 0.0;
    let mut production = 0.0;
    for s in &slices {
        flux += s.mean_in(b - 0.01, b, |c| c.q).unwrap() - s.mean_in(a, a + 0.01, |c| c.q).unwrap();
        production += integral(s, |c| c.production);
    }
    flux /= slices.len() as f64;
    production /= slices.len() as f64;
    assert!(production > 0.0);
    let lhs = storage + flux;
    assert!(
        (lhs - production).abs() < 0.1 * production,
        "storage + flux = {lhs}, production = {production}"
    );
}

#[test]
fn harmonic_run_has_no_production() {
    let p = Potential::harmonic(1.0, 0.0, 0.0).unwrap();
    let s = ChainState::riemann(-500, 500, -0.5, 0.5, 0.2, -0.2).unwrap();
    let traj = simulate(&SimConfig::new(p, s, 200.0).with_stride(1000)).unwrap();
    let mut fields = average_trajectory(&traj, &ScalingConfig::for_particles(1000)).unwrap();
    production_xi(&mut fields, &p);
    for s in &fields.slices {
        for c in &s.cells {
            assert!(c.production.abs() < 1e-9, "Ξ = {}", c.production);
        }
    }
}
