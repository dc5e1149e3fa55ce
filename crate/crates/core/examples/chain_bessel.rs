//! Quantum chain populations against the Bessel-function solution.
//!
//! `cargo run --example chain_bessel`

use dipole_eet::analytics::{bessel_j, chain_populations_analytic};
use dipole_eet::quantum::propagate_quantum;
use dipole_eet::scenarios::ChainScenario;

fn main() -> dipole_eet::Result<()> {
    let sc = ChainScenario::default();
    let model = sc.model()?;
    let origin = sc.origin();
    let taus = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let q = propagate_quantum(&model, &sc.initial_state(), &taus)?;

    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "tau", "P_0", "J_0^2", "P_2", "max|dP|"
    );
    for (row, &tau) in q.populations.iter().zip(&taus) {
        let exact = chain_populations_analytic(sc.n_sites, origin, tau)?;
        let dev = row
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{tau:5.1} {:12.8} {:12.8} {:12.8} {dev:12.3e}",
            row[origin],
            bessel_j(0, tau)?.powi(2),
            row[origin + 2]
        );
    }
    Ok(())
}
