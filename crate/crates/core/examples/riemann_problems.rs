//! The two Riemann problems of the bi-quadratic chain that select a type-I
//! and a type-II phase transition wave.
//!
//! Both runs execute in parallel. Fields are written to the system temp
//! directory for plotting.
//!
//! ```text
//! cargo run --release --example riemann_problems
//! ```

use latticewave::riemann::{analyze, run_batch, RiemannConfig, DEFAULT_CAUSALITY_TOL};

fn main() -> latticewave::Result<()> {
    let configs = [
        RiemannConfig::new(-4.0, 1.0, 1.0, -1.0, 4000, 0.4),
        RiemannConfig::new(-1.5, 1.0, 1.0, -1.0, 4000, 0.4),
    ];
    for (k, run) in run_batch(&configs).into_iter().enumerate() {
        let run = run?;
        let report = analyze(&run, DEFAULT_CAUSALITY_TOL)?;
        println!("r- = {}:", configs[k].r_minus);
        for s in &report.decomposition.states {
            println!(
                "  state  ξ ∈ [{:+.3}, {:+.3}]  R = {:+.4}  V = {:+.4}  E_osc = {:.4}  Q = {:+.4}",
                s.xi_start, s.xi_end, s.r, s.v, s.e_osc, s.q
            );
        }
        for w in &report.decomposition.waves {
            println!(
                "  wave   {:?} at ξ = {:+.4}, speed {:+.4}",
                w.kind, w.xi, w.speed
            );
        }
        if let Some(c) = &report.comparison {
            println!(
                "  type {:?}; largest deviation from the causality wave {:.2}% (pass: {}); jumps pass: {}",
                c.wave_type,
                100.0 * c.deviations.max(),
                c.pass,
                c.jumps_pass
            );
        }
        let path = std::env::temp_dir().join(format!("riemann_{k}.csv"));
        run.fields
            .write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        println!("  fields written to {}", path.display());
    }
    Ok(())
}
