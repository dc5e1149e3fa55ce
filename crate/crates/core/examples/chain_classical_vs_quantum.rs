//! Classical oscillators against the quantum chain at weak and strong coupling.
//!
//! `cargo run --example chain_classical_vs_quantum`

use dipole_eet::scenarios::{run_chain, ChainScenario};

fn main() -> dipole_eet::Result<()> {
    for ratio in [1.0 / 40.0, 1.0 / 6.0] {
        let run = run_chain(&ChainScenario::with_ratio(ratio))?;
        println!("V/eps = {ratio:.4}");
        for (name, r) in &run.reports {
            println!(
                "  {name:<22} max {:.3e}  mean {:.3e}",
                r.max_pop_dev, r.mean_pop_dev
            );
        }
        let origin = run.scenario.origin();
        let k = run.quantum.len() / 4;
        println!(
            "  centre population at tau = {:.2}: quantum {:.5}, classical {:.5}",
            run.quantum.times[k],
            run.quantum.populations[k][origin],
            run.classical.populations[k][origin]
        );
    }
    Ok(())
}
