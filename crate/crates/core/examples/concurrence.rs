//! Nearest-neighbour coherence |ρ_01| for quantum and classical chains against
//! |J_0(τ) J_1(τ)|.
//!
//! `cargo run --example concurrence`

use dipole_eet::analytics::{bessel_j, concurrence};
use dipole_eet::scenarios::{run_chain, ChainScenario};

fn main() -> dipole_eet::Result<()> {
    let run = run_chain(&ChainScenario::default())?;
    let o = run.scenario.origin();
    let q = concurrence(&run.quantum, o, o + 1)?;
    let c = concurrence(&run.classical, o, o + 1)?;
    let mut peak = (0.0, 0.0);
    for (k, &tau) in run.quantum.times.iter().enumerate() {
        if q.values[k] > peak.1 {
            peak = (tau, q.values[k]);
        }
        if k % 50 == 0 {
            let exact = (bessel_j(0, tau)? * bessel_j(1, tau)?).abs();
            println!(
                "tau {tau:5.2}  quantum {:.6}  classical {:.6}  |J0 J1| {exact:.6}",
                q.values[k], c.values[k]
            );
        }
    }
    println!("quantum peak {:.4} at tau = {:.3}", peak.1, peak.0);
    Ok(())
}
