//! Sizes of the terms in the second-order amplitude equation and a finite
//! difference check that the four quantum terms are complete.
//!
//! `cargo run --example second_order_terms`

use dipole_eet::quantum::propagate_quantum;
use dipole_eet::rca::{second_order_fd_residual, second_order_residuals};
use dipole_eet::scenarios::ChainScenario;

fn main() -> dipole_eet::Result<()> {
    for ratio in [1.0 / 40.0, 1.0 / 6.0] {
        let sc = ChainScenario::with_ratio(ratio);
        let model = sc.model()?;
        let times = sc.times();
        let q = propagate_quantum(&model, &sc.initial_state(), &times)?;
        let t = second_order_residuals(&q, &model)?;
        let fd = second_order_fd_residual(&model, &sc.initial_state(), &times[..40])?;
        println!(
            "V/eps {ratio:.4}: leading {:.3e}, coupling {:.3e}, detuning {:.1e}, quadratic {:.3e} \
             (ratio {:.3e}); FD residual {:.2e}",
            t.leading,
            t.coupling,
            t.detuning,
            t.quadratic,
            t.quadratic_ratio(),
            fd.max_scaled
        );
    }
    Ok(())
}
