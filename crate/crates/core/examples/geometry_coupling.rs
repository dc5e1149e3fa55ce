//! Couplings from point-dipole geometry and their oscillator counterparts.
//!
//! `cargo run --example geometry_coupling`

use dipole_eet::hamiltonian::{build_coupling, oscillator_map};
use dipole_eet::model::AggregateSpec;
use dipole_eet::units::TimeBase;

fn main() -> dipole_eet::Result<()> {
    // a ring of four tangential dipoles, radius 8
    let n = 4;
    let (positions, orientations): (Vec<[f64; 3]>, Vec<[f64; 3]>) = (0..n)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            (
                [8.0 * phi.cos(), 8.0 * phi.sin(), 0.0],
                [-phi.sin(), phi.cos(), 0.0],
            )
        })
        .unzip();
    let spec = AggregateSpec::geometric(
        vec![12_000.0, 12_050.0, 12_000.0, 11_950.0],
        vec![300.0; n],
        orientations,
        positions,
    );
    let report = spec.validate();
    println!(
        "violations: {}, warnings: {}",
        report.violations.len(),
        report.warnings.len()
    );

    let v = build_coupling(&spec)?;
    println!("V (cm^-1):");
    for row in v.to_rows() {
        println!(
            "  {}",
            row.iter().map(|x| format!("{x:9.2}")).collect::<String>()
        );
    }
    let map = oscillator_map(&spec, &v, TimeBase::Femtoseconds)?;
    println!(
        "oscillator strengths: {:?}",
        map.strengths.as_ref().unwrap()
    );
    println!(
        "K/(m sqrt(w w)) - 2V residual: {:.2e}",
        map.identity_residual(&(&v.v * TimeBase::Femtoseconds.energy_scale()))
    );
    println!("aggregate hash: {}", spec.content_hash());
    Ok(())
}
