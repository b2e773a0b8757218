//! Wave numbers of travelling waves and the reference speeds of the
//! harmonic chain.
//!
//! ```text
//! cargo run --release --example dispersion
//! ```

use latticewave::spectral::{critical_speeds, solve_kappa_forced, solve_kappa_tw};

fn main() -> latticewave::Result<()> {
    let c0 = 1.0;
    let speeds = critical_speeds(c0);
    println!(
        "c1 = {:.6}  c2 = {:.6}  group speed reversal at {:.6}",
        speeds.c1, speeds.c2, speeds.c_reversal
    );

    println!("\n{:>6} {:>4}  wave numbers (group speed)", "c_ph", "n");
    for c in [0.95, 0.8, 0.6, 0.3, 0.2, 0.1, 0.05] {
        let roots = solve_kappa_tw(c, c0)?;
        let list: Vec<String> = roots
            .iter()
            .map(|r| format!("{:.5} ({:+.4})", r.kappa, r.c_gr))
            .collect();
        println!("{c:>6.2} {:>4}  {}", roots.len(), list.join("  "));
    }

    println!("\nforced wave numbers");
    for sigma in [0.25, 0.5, 1.0, 1.5, 1.9] {
        println!("σ = {sigma:<5} κ = {:.6}", solve_kappa_forced(sigma, c0)?);
    }
    Ok(())
}
