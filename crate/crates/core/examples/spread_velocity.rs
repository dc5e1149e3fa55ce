//! Ballistic spreading: √⟨n²⟩ grows linearly in τ until the wave packet
//! reaches the chain ends.
//!
//! `cargo run --example spread_velocity`

use dipole_eet::analytics::{analytic_chain_trajectory, mean_square_displacement, spread_velocity};
use dipole_eet::scenarios::{run_chain, ChainScenario};

fn main() -> dipole_eet::Result<()> {
    let run = run_chain(&ChainScenario::default())?;
    let o = run.scenario.origin();
    let fit = spread_velocity(&run.quantum, o)?;
    println!(
        "19-site quantum: slope {:.8} over tau <= {:.3} ({} points, rms {:.1e})",
        fit.slope, fit.window_end, fit.points, fit.residual
    );
    let times: Vec<f64> = (0..=100).map(|k| 0.2 * k as f64).collect();
    let wide = analytic_chain_trajectory(201, 100, &times)?;
    let fit = spread_velocity(&wide, 100)?;
    println!(
        "201-site Bessel:  slope {:.8} over tau <= {:.3}",
        fit.slope, fit.window_end
    );
    let last = wide.populations.last().expect("non-empty");
    println!(
        "<n^2>/tau^2 at tau = 20: {:.8}",
        mean_square_displacement(last, 100) / 400.0
    );
    Ok(())
}
