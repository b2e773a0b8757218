//! Causality waves of the bi-quadratic chain over the range of phase speeds
//! with a unique wave number, and the selection criteria they satisfy.
//!
//! ```text
//! cargo run --release --example phase_transition_waves
//! ```

use latticewave::ptwave::{causality_wave, close_family, evaluate_criteria};
use latticewave::spectral::critical_speeds;

fn main() -> latticewave::Result<()> {
    let c2 = critical_speeds(1.0).c2;
    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>9} {:>9}  type  SOM1  SOM2",
        "c_ph", "c_gr", "R-", "R+", "A-", "Xi"
    );
    for k in 1..=15 {
        let c = c2 + (0.98 - c2) * k as f64 / 15.0;
        let s = causality_wave(c, 0.0)?;
        let r = evaluate_criteria(&s);
        println!(
            "{c:>6.3} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}  {:>4}  {:>4}  {:>4}",
            s.c_gr,
            s.r_minus,
            s.r_plus,
            s.a_minus,
            s.xi,
            format!("{:?}", r.wave_type),
            r.som1,
            r.som2
        );
    }

    // a wave running into stronger oscillations violates the production sign
    let s = close_family(0.7, 0.5, 1.5, 0.0)?;
    let r = evaluate_criteria(&s);
    println!(
        "\nc_ph = 0.7, A- = 0.5, A+ = 1.5: Xi = {:.4}, SOM1 = {}, entropy = {}",
        s.xi, r.som1, r.entropy
    );
    Ok(())
}
