//! Amplitude dynamics i ċ = (Ω + V) c on the one-exciton manifold.
//!
//! [`propagate_quantum`] is exact (spectral); [`propagate_quantum_ode`] is a
//! fixed-step RK4 integrator kept as an independent check.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::eigen::{diagonalize, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::hamiltonian::SiteModel;
use crate::model::QuantumState;
use crate::trajectory::{check_times, DynamicsKind, Trajectory, TrajectoryMeta};

const NORM_TOL: f64 = 1e-9;
/// RK4 default step as a fraction of 1/ω_bound.
const RK4_STEP_FRACTION: f64 = 0.02;

/// Cached eigendecomposition of H for repeated exact propagation.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    pub decomposition: SpectralDecomposition,
}

impl SpectralPropagator {
    pub fn new(model: &SiteModel) -> Result<Self> {
        Ok(Self {
            decomposition: diagonalize(&model.hamiltonian())?,
        })
    }

    /// c(t) = Q e^{−iΛt} Qᵀ c0
    pub fn evolve(&self, c0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        if t == 0.0 {
            return c0.clone();
        }
        let q = &self.decomposition.eigenvectors;
        let mut modal = q.transpose().map(|x| Complex64::new(x, 0.0)) * c0;
        for (a, &e) in modal.iter_mut().zip(self.decomposition.eigenvalues.iter()) {
            *a *= Complex64::from_polar(1.0, -e * t);
        }
        q.map(|x| Complex64::new(x, 0.0)) * modal
    }
}

fn check_initial(model: &SiteModel, c0: &QuantumState, times: &[f64]) -> Result<()> {
    if c0.len() != model.n_sites() {
        return Err(Error::Dimension {
            expected: model.n_sites(),
            found: c0.len(),
        });
    }
    let norm = c0.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm.sqrt()));
    }
    check_times(times)
}

pub(crate) fn amplitude_trajectory(
    kind: DynamicsKind,
    model: &SiteModel,
    times: &[f64],
    amps: Vec<Vec<Complex64>>,
    integrator: String,
) -> Trajectory {
    let populations = amps
        .iter()
        .map(|row| row.iter().map(|c| c.norm_sqr()).collect())
        .collect();
    Trajectory {
        kind,
        time_unit: model.time_unit(),
        times: times.to_vec(),
        populations,
        amplitudes: Some(amps),
        raw_norm: None,
        tail_mass: None,
        meta: TrajectoryMeta {
            aggregate_hash: model.aggregate_hash.clone(),
            integrator,
            coupling_ratio: Some(model.coupling_ratio),
        },
    }
}

pub fn propagate_quantum(
    model: &SiteModel,
    c0: &QuantumState,
    times: &[f64],
) -> Result<Trajectory> {
    check_initial(model, c0, times)?;
    let prop = SpectralPropagator::new(model)?;
    let amps = times
        .iter()
        .map(|&t| {
            prop.evolve(&c0.amplitudes, t - c0.time)
                .iter()
                .copied()
                .collect()
        })
        .collect();
    Ok(amplitude_trajectory(
        DynamicsKind::Quantum,
        model,
        times,
        amps,
        "spectral".into(),
    ))
}

/// Upper bound on |eigenvalue| of H − ω̄ (Gershgorin).
fn shifted_frequency_bound(model: &SiteModel, mean: f64) -> f64 {
    let n = model.n_sites();
    (0..n)
        .map(|i| {
            let off: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| model.coupling[(i, j)].abs())
                .sum();
            (model.frequencies[i] - mean).abs() + off
        })
        .fold(0.0, f64::max)
}

pub fn default_rk4_step(model: &SiteModel) -> f64 {
    let mean = model.frequencies.mean();
    let bound = shifted_frequency_bound(model, mean);
    if bound == 0.0 {
        f64::INFINITY
    } else {
        RK4_STEP_FRACTION / bound
    }
}

/// Fixed-step RK4 on the amplitude equations, stepped in the frame rotating at
/// the mean site frequency. `dt_max = None` uses [`default_rk4_step`].
pub fn propagate_quantum_ode(
    model: &SiteModel,
    c0: &QuantumState,
    times: &[f64],
    dt_max: Option<f64>,
) -> Result<Trajectory> {
    let dt_max = dt_max.unwrap_or_else(|| default_rk4_step(model));
    if !(dt_max > 0.0) {
        return Err(Error::InvalidTimeStep(dt_max));
    }
    check_initial(model, c0, times)?;
    let mean = model.frequencies.mean();
    let h =
        model.hamiltonian() - nalgebra::DMatrix::identity(model.n_sites(), model.n_sites()) * mean;
    let hc = h.map(|x| Complex64::new(x, 0.0));
    let minus_i = Complex64::new(0.0, -1.0);
    let deriv = |c: &DVector<Complex64>| (&hc * c) * minus_i;

    let mut c = c0.amplitudes.clone();
    let mut t = c0.time;
    let mut amps = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span != 0.0 {
            let steps = (span.abs() / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                let k1 = deriv(&c);
                let k2 = deriv(&(&c + &k1 * Complex64::from(dt / 2.0)));
                let k3 = deriv(&(&c + &k2 * Complex64::from(dt / 2.0)));
                let k4 = deriv(&(&c + &k3 * Complex64::from(dt)));
                c += (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4)
                    * Complex64::from(dt / 6.0);
            }
            t = target;
        }
        let phase = Complex64::from_polar(1.0, -mean * (t - c0.time));
        amps.push(c.iter().map(|a| a * phase).collect());
    }
    let dt_label = if dt_max.is_finite() {
        format!("{dt_max:e}")
    } else {
        "inf".into()
    };
    Ok(amplitude_trajectory(
        DynamicsKind::Quantum,
        model,
        times,
        amps,
        format!("rk4 dt_max={dt_label}"),
    ))
}

/// ⟨c|H|c⟩ in the model's frequency units.
pub fn quantum_energy(model: &SiteModel, c: &[Complex64]) -> f64 {
    let v = DVector::from_column_slice(c);
    let h = model.hamiltonian().map(|x| Complex64::new(x, 0.0));
    (v.adjoint() * h * &v)[(0, 0)].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::CouplingMatrix;
    use crate::model::AggregateSpec;
    use crate::units::{TimeBase, TimeUnit};

    fn dimer_model(coupling: f64) -> SiteModel {
        let v = CouplingMatrix::nearest_neighbour(2, coupling);
        let spec = AggregateSpec::explicit(vec![1000.0, 1000.0], v.to_rows());
        SiteModel::new(&spec, &v, TimeBase::Femtoseconds).unwrap()
    }

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn uncoupled_site_stays_put() {
        let model = dimer_model(0.0);
        let c0 = QuantumState::localized(2, 0, TimeUnit::Femtoseconds);
        let traj = propagate_quantum(&model, &c0, &grid(500.0, 50)).unwrap();
        for row in &traj.populations {
            assert!((row[0] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn resonant_dimer_rabi() {
        let model = dimer_model(50.0);
        let v = model.coupling[(0, 1)];
        let c0 = QuantumState::localized(2, 0, TimeUnit::Femtoseconds);
        let times = grid(300.0, 200);
        let traj = propagate_quantum(&model, &c0, &times).unwrap();
        for (t, row) in times.iter().zip(&traj.populations) {
            assert!((row[1] - (v * t).sin().powi(2)).abs() < 1e-12);
        }
        traj.check_invariants().unwrap();
    }

    #[test]
    fn rk4_matches_spectral_and_free_phase() {
        let model = dimer_model(50.0);
        let c0 = QuantumState::localized(2, 0, TimeUnit::Femtoseconds);
        let times = grid(200.0, 41);
        let exact = propagate_quantum(&model, &c0, &times).unwrap();
        let ode = propagate_quantum_ode(&model, &c0, &times, None).unwrap();
        for (a, b) in exact.populations.iter().zip(&ode.populations) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-7);
            }
        }

        let free = dimer_model(0.0);
        let w = free.frequencies[0];
        let ode = propagate_quantum_ode(&free, &c0, &times, Some(0.05)).unwrap();
        for (t, row) in times.iter().zip(ode.amplitudes.unwrap()) {
            let want = Complex64::from_polar(1.0, -w * t);
            assert!((row[0] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn rk4_fourth_order() {
        let model = dimer_model(50.0);
        let c0 = QuantumState::localized(2, 0, TimeUnit::Femtoseconds);
        let times = [0.0, 100.0];
        let exact = propagate_quantum(&model, &c0, &times).unwrap();
        let err = |dt: f64| {
            let ode = propagate_quantum_ode(&model, &c0, &times, Some(dt)).unwrap();
            let (a, b) = (
                &exact.amplitudes.as_ref().unwrap()[1],
                &ode.amplitudes.unwrap()[1],
            );
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        };
        let v = model.coupling[(0, 1)];
        let e1 = err(0.2 / v);
        let e2 = err(0.1 / v);
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let model = dimer_model(10.0);
        let c0 = QuantumState::localized(2, 0, TimeUnit::Femtoseconds);
        assert!(matches!(
            propagate_quantum_ode(&model, &c0, &[0.0, 1.0], Some(0.0)),
            Err(Error::InvalidTimeStep(_))
        ));
        assert!(matches!(
            propagate_quantum(&model, &c0, &[1.0, 0.0]),
            Err(Error::UnsortedTimes)
        ));
        let mut bad = c0.clone();
        bad.amplitudes[1] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            propagate_quantum(&model, &bad, &[0.0]),
            Err(Error::NotNormalized(_))
        ));
    }
}
