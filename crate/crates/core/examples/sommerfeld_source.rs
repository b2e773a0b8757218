//! A harmonic chain forced at one atom radiates energy to both sides.
//!
//! Starting from rest, the atom `j = 0` is driven with `ζ(t) = cos t`. The
//! energy production of the forcing and the radiation flux in both half
//! lattices approach the values of the outgoing (source) solution. Running
//! the final state backwards turns the source into a sink.
//!
//! ```text
//! cargo run --release --example sommerfeld_source
//! ```

use latticewave::spectral::{sommerfeld_fields, sommerfeld_solution};
use latticewave::thermo::{production_theta, window_average};
use latticewave::{
    simulate, ChainState, Forcing, Potential, ScalingConfig, SimConfig, SommerfeldBranch,
};

fn main() -> latticewave::Result<()> {
    let n = 2000;
    let t_end = 400.0;
    let potential = Potential::unit_harmonic();
    let forcing = Forcing::cosine(1.0, 1.0)?;

    let source = sommerfeld_fields(&sommerfeld_solution(1.0, SommerfeldBranch::Source)?);
    println!(
        "closed form: E_osc = {:.6}, Q = ±{:.6}, θ = {:.6}",
        source.e_osc, source.q_plus_inf, source.theta
    );

    let initial = ChainState::uniform(-(n as i64) / 2, n as i64 / 2, 0.0, 0.0)?;
    let cfg = SimConfig::new(potential, initial, t_end).with_forcing(forcing.clone());
    let forward = simulate(&cfg)?;
    let scaling = ScalingConfig::for_particles(n);

    // average over t ∈ [200, 400], after the transient
    let theta = production_theta(&forward, &forcing, &scaling, 0.15, 0.05)?;
    let fields = window_average(&forward.final_state, &potential, &scaling)?;
    let slice = &fields.slices[0];
    let q_right = slice.mean_in(0.03, 0.15, |c| c.q).unwrap_or(f64::NAN);
    let q_left = slice.mean_in(-0.15, -0.03, |c| c.q).unwrap_or(f64::NAN);
    println!("simulation:  θ = {theta:.6}, Q(left) = {q_left:.6}, Q(right) = {q_right:.6}");

    let reversed_forcing = forcing.time_reversed(2.0 * t_end);
    let back = SimConfig::new(potential, forward.final_state.reversed(), t_end)
        .with_forcing(reversed_forcing.clone());
    let backward = simulate(&back)?;
    let theta_back = production_theta(&backward, &reversed_forcing, &scaling, 0.25, 0.05)?;
    let rest = ChainState::uniform(-(n as i64) / 2, n as i64 / 2, 0.0, 0.0)?;
    println!(
        "reversed:    θ = {theta_back:.6}, distance to rest after return = {:.2e}",
        backward.final_state.max_abs_diff(&rest)
    );
    Ok(())
}
