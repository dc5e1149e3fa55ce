//! Classical and truncated-classical deviation from quantum dynamics over a
//! log grid of V/ε, run in parallel.
//!
//! `cargo run --release --example rca_sweep`

use dipole_eet::cli::{default_sweep_grid, sweep_is_monotone, sweep_point};
use dipole_eet::scenarios::ChainScenario;
use rayon::prelude::*;

fn main() -> dipole_eet::Result<()> {
    let base = ChainScenario::default();
    let rows = default_sweep_grid()
        .par_iter()
        .map(|&r| sweep_point(&base, r))
        .collect::<dipole_eet::Result<Vec<_>>>()?;
    println!(
        "{:>10} {:>10} {:>12} {:>12}",
        "V/eps", "status", "classical", "rca"
    );
    for row in &rows {
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |d| format!("{d:.3e}"));
        println!(
            "{:10.5} {:>10} {:>12} {:>12}",
            row.v_over_eps,
            row.status,
            fmt(row.max_pop_dev),
            fmt(row.rca_max_pop_dev)
        );
    }
    println!("monotone over stable points: {}", sweep_is_monotone(&rows));
    Ok(())
}
