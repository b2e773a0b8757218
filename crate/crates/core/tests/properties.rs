mod common;

use std::f64::consts::PI;

use proptest::prelude::*;

use latticewave::chain::discrete_energy;
use latticewave::integrator::{simulate, verlet_step, SimConfig};
use latticewave::ptwave::{close_family, evaluate_criteria};
use latticewave::spectral::{critical_speeds, solve_kappa_tw};
use latticewave::twave::tw_mean_fields;
use latticewave::{ChainState, Direction, Forcing, Potential, TravellingWaveSpec};

fn harmonic() -> impl Strategy<Value = Potential> {
    (0.3f64..3.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(c0, d1, d0)| Potential::harmonic(c0, d1, d0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        // integration tests have no lib.rs next to them to anchor regression files
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn force_is_derivative_of_potential(p in harmonic(), r in -5.0f64..5.0) {
        let h = 1e-6;
        let fd = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
        prop_assert!((fd - p.force(r)).abs() < 1e-6 * (1.0 + p.force(r).abs()));
    }

    #[test]
    fn biquadratic_force_away_from_the_spinodal(r in prop_oneof![-5.0f64..-0.01, 0.01f64..5.0]) {
        let p = Potential::BiQuadratic;
        let h = 1e-7;
        let fd = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
        prop_assert!((fd - p.force(r)).abs() < 1e-6);
        prop_assert!(p.value(r) >= 0.0);
    }

    #[test]
    fn wave_numbers_match_dense_scan(c in 0.02f64..0.99, c0 in 0.5f64..2.0) {
        let speed = c * c0;
        let roots = solve_kappa_tw(speed, c0).unwrap();
        let oracle = common::dense_roots(speed, c0, 200_000);
        prop_assert_eq!(roots.len(), oracle.len());
        for (a, b) in roots.iter().zip(&oracle) {
            prop_assert!((a.kappa - b).abs() < 1e-6);
            prop_assert!((a.c_gr - c0 * (0.5 * a.kappa).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_quadrature(
        p in harmonic(),
        kappa in 0.05f64..(2.0 * PI - 0.05),
        amplitude in 0.0f64..2.0,
        phase in -PI..PI,
        right in any::<bool>(),
        r in -1.0f64..1.0,
        v in -1.0f64..1.0,
    ) {
        let direction = if right { Direction::Right } else { Direction::Left };
        let spec = TravellingWaveSpec::single_mode(p, kappa, amplitude, phase, direction, r, v);
        let f = tw_mean_fields(&spec).unwrap();
        let [qr, qv, qp, qe, qf] = common::quadrature_means(&spec, 200_000);
        for (a, b) in [(f.r, qr), (f.v, qv), (f.p, qp), (f.e, qe), (f.f, qf)] {
            prop_assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "{} vs {}", a, b);
        }
        prop_assert!((f.e - f.e_osc - f.e_non).abs() < 1e-14 * f.e.abs().max(1.0));
        prop_assert!(f.e_osc >= 0.0);
    }

    #[test]
    fn ptwave_identities(
        c in 0.22f64..0.99,
        left in any::<bool>(),
        a_minus in 0.0f64..4.0,
        a_plus in 0.0f64..4.0,
        mean_v in -3.0f64..3.0,
    ) {
        prop_assume!(c > critical_speeds(1.0).c2 + 1e-6);
        let c = if left { -c } else { c };
        let s = close_family(c, a_minus, a_plus, mean_v).unwrap();
        let scale = 1.0 + s.xi.abs();
        prop_assert!((s.c_ph * s.upsilon - s.xi).abs() < 1e-10 * scale);
        prop_assert!((s.xi + 2.0 * s.c_ph * s.mean_r).abs() < 1e-10 * scale);
        prop_assert!((s.upsilon + 2.0 * s.mean_r).abs() < 1e-10 * (1.0 + s.mean_r.abs()));
        let r = evaluate_criteria(&s);
        prop_assert_eq!(r.som1, r.entropy);
        // flux has the sign of the group speed wherever there are oscillations
        if s.e_osc_minus > 0.0 {
            prop_assert_eq!(s.q_minus > 0.0, s.c_gr > 0.0);
        }
        // time reversal is an involution
        let back = s.time_reversed().unwrap().time_reversed().unwrap();
        prop_assert!((back.xi - s.xi).abs() < 1e-12 * scale);
        prop_assert!((back.v_minus - s.v_minus).abs() < 1e-12 * (1.0 + s.v_minus.abs()));
    }

    #[test]
    fn reversed_forcing_mirrors_profile(
        sigma in 0.1f64..3.0,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        phase in -PI..PI,
        t_end in 0.0f64..100.0,
        s in 0.0f64..100.0,
    ) {
        let mut f = Forcing::cosine(a, sigma).unwrap();
        f.harmonics.push(latticewave::chain::Harmonic { amplitude: b, multiple: 3, phase });
        let r = f.time_reversed(t_end);
        prop_assert!((r.value(s) - f.value(t_end - s)).abs() < 1e-9);
    }

    #[test]
    fn verlet_step_is_reversible(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 40;
        let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        v[0] = 0.0;
        v[n] = 0.0;
        let s = ChainState::new(0.0, -20, r, v).unwrap();
        let p = Potential::BiQuadratic;
        let one = verlet_step(&s, &p, None, 0.05).unwrap();
        let back = verlet_step(&one.reversed(), &p, None, 0.05).unwrap().reversed();
        // sign flips of Φ' across r = 0 are the only source of non-smoothness
        prop_assert!(back.max_abs_diff(&s) < 1e-12);
    }
}

#[test]
fn forcing_work_balances_energy() {
    // E(t) − E(0) = ∫ v₀ζ dt for the forced harmonic chain
    let p = Potential::unit_harmonic();
    let f = Forcing::cosine(0.7, 1.3).unwrap();
    let s = ChainState::uniform(-300, 300, 0.0, 0.0).unwrap();
    let cfg = SimConfig::new(p, s, 150.0)
        .with_dt(0.01)
        .with_forcing(f.clone());
    let traj = simulate(&cfg).unwrap();
    let dt = cfg.dt;
    let g: Vec<f64> = traj
        .forced_velocity
        .iter()
        .enumerate()
        .map(|(n, v)| v * f.value(n as f64 * dt))
        .collect();
    let work: f64 = dt * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[g.len() - 1]));
    let gain = discrete_energy(&traj.final_state, &p);
    assert!(
        (gain - work).abs() < 2e-3 * gain,
        "energy {gain} vs work {work}"
    );
}
