//! Closed-form fields of a harmonic travelling wave compared with window
//! averages of the sampled lattice state.
//!
//! ```text
//! cargo run --release --example travelling_wave
//! ```

use std::f64::consts::PI;

use latticewave::thermo::window_average;
use latticewave::twave::{build_wave, tw_mean_fields};
use latticewave::{Direction, Potential, ScalingConfig, TravellingWaveSpec};

fn main() -> latticewave::Result<()> {
    let potential = Potential::harmonic(1.0, 0.0, 0.0)?;
    let spec = TravellingWaveSpec::single_mode(
        potential,
        PI / 3.0,
        1.0 / 3f64.sqrt(),
        0.0,
        Direction::Right,
        0.2,
        -0.1,
    );
    let exact = tw_mean_fields(&spec)?;

    let wave = build_wave(&spec)?;
    let state = wave.sample(-4000, 4000, 0.0)?;
    let scaling = ScalingConfig {
        epsilon: 1.0 / 8000.0,
        halfwidth: 200,
        stride: 100,
    };
    let fields = window_average(&state, &potential, &scaling)?;
    let slice = &fields.slices[0];
    let mean = |f: fn(&latticewave::thermo::CellFields) -> f64| {
        slice.mean_in(-0.4, 0.4, f).unwrap_or(f64::NAN)
    };

    println!("c_ph = {:.6}", spec.c_ph);
    println!("{:>6} {:>12} {:>12}", "field", "closed form", "averaged");
    let rows: [(&str, f64, f64); 6] = [
        ("R", exact.r, mean(|c| c.r)),
        ("V", exact.v, mean(|c| c.v)),
        ("P", exact.p, mean(|c| c.p)),
        ("E_osc", exact.e_osc, mean(|c| c.e_osc)),
        ("E_non", exact.e_non, mean(|c| c.e_non)),
        ("Q", exact.q, mean(|c| c.q)),
    ];
    for (name, a, b) in rows {
        println!("{name:>6} {a:>12.6} {b:>12.6}");
    }
    Ok(())
}
