//! Weak-form residuals of the macroscopic conservation laws for the fields
//! of a Riemann run, and the energy transfer at the phase interface.
//!
//! ```text
//! cargo run --release --example conservation
//! ```

use latticewave::riemann::{run_riemann, RiemannConfig};
use latticewave::thermo::{conservation_residual, Law, TestFunction};

fn main() -> latticewave::Result<()> {
    let mut cfg = RiemannConfig::new(-4.0, 1.0, 1.0, -1.0, 4000, 0.4);
    cfg.slices = 40;
    let run = run_riemann(&cfg)?;
    let test = TestFunction {
        tau_center: 0.2,
        tau_halfwidth: 0.19,
        xi_center: 0.0,
        xi_halfwidth: 0.45,
    };
    for law in [Law::Mass, Law::Momentum, Law::Energy] {
        let r = conservation_residual(&run.fields, law, &test, false)?;
        println!(
            "{law:?}: residual {:+.3e}, relative {:.3e}",
            r.value,
            r.relative()
        );
    }

    let last = run.fields.last();
    let h = run.fields.h_xi();
    let transfer: f64 = last.cells.iter().map(|c| c.production * h).sum();
    println!("∫Ξ dξ at τ = {:.2}: {transfer:.4}", last.tau);
    Ok(())
}
