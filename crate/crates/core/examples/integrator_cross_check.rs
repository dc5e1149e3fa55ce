//! Exact propagators against their time-stepping oracles: spectral vs RK4 for
//! the amplitudes, normal modes vs velocity Verlet for the oscillators.
//!
//! `cargo run --release --example integrator_cross_check`

use dipole_eet::classical::{
    default_verlet_step, propagate_classical, propagate_classical_ode, quantum_to_classical_init,
    verlet_energy_drift,
};
use dipole_eet::quantum::{propagate_quantum, propagate_quantum_ode};
use dipole_eet::rca::compare;
use dipole_eet::scenarios::ChainScenario;

fn main() -> dipole_eet::Result<()> {
    let sc = ChainScenario {
        n_sites: 9,
        v_over_eps: 1.0 / 10.0,
        ..ChainScenario::default()
    };
    let model = sc.model()?;
    let times: Vec<f64> = (0..=8).map(f64::from).collect();
    let c0 = sc.initial_state();
    let z0 = quantum_to_classical_init(&c0);

    let q = compare(
        &propagate_quantum(&model, &c0, &times)?,
        &propagate_quantum_ode(&model, &c0, &times, None)?,
    )?;
    let c = compare(
        &propagate_classical(&model, &z0, &times)?,
        &propagate_classical_ode(&model, &z0, &times, None)?,
    )?;
    println!("spectral vs RK4:      max |dP| {:.3e}", q.max_pop_dev);
    println!("normal modes vs Verlet: max |dP| {:.3e}", c.max_pop_dev);
    let dt = default_verlet_step(&model);
    println!(
        "Verlet energy drift over 1e5 steps at dt = {dt:.3e}: {:.3e}",
        verlet_energy_drift(&model, &z0, dt, 100_000)
    );
    Ok(())
}
