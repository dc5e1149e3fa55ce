//! Classical dipole-oscillator dynamics in the dimensionless amplitudes
//! z̃_n = x̃_n + i p̃_n, with the full Re(z̃) coupling:
//!
//! ```text
//! i dz̃_n/dt = ω_n z̃_n + Σ_m 2V_nm Re z̃_m
//! ```
//!
//! Equivalently ẋ̃ = Ω p̃ and ṗ̃ = −(Ω + 2V) x̃. The exact path diagonalizes the
//! second-order system in mass-weighted coordinates y = Ω^{-1/2} x̃, where
//! ÿ = −(Ω² + 2Ω^{1/2}VΩ^{1/2}) y is symmetric.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::eigen::{diagonalize, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::hamiltonian::SiteModel;
use crate::model::{ClassicalState, QuantumState};
use crate::trajectory::{
    check_times, normalized_populations, DynamicsKind, Trajectory, TrajectoryMeta,
};

/// Default velocity-Verlet step as a fraction of the shortest mode period.
const VERLET_STEPS_PER_PERIOD: f64 = 40_000.0;

/// Normal modes of the coupled oscillators.
#[derive(Debug, Clone)]
pub struct OscillatorModes {
    sqrt_w: DVector<f64>,
    decomposition: SpectralDecomposition,
    /// √λ_k
    pub mode_frequencies: DVector<f64>,
}

impl OscillatorModes {
    /// Fails with [`Error::UnstableMode`] if any eigenvalue of Ω² + M_K is not positive.
    pub fn new(model: &SiteModel) -> Result<Self> {
        let decomposition = diagonalize(&model.oscillator_matrix())?;
        if let Some((index, &eigenvalue)) = decomposition
            .eigenvalues
            .iter()
            .enumerate()
            .find(|(_, &l)| !(l > 0.0))
        {
            return Err(Error::UnstableMode { index, eigenvalue });
        }
        Ok(Self {
            sqrt_w: model.frequencies.map(f64::sqrt),
            mode_frequencies: decomposition.eigenvalues.map(f64::sqrt),
            decomposition,
        })
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.decomposition.eigenvalues[0]
    }

    /// Exact (x̃, p̃) after time `t` from (x0, p0).
    pub fn evolve(
        &self,
        x0: &DVector<f64>,
        p0: &DVector<f64>,
        t: f64,
    ) -> (DVector<f64>, DVector<f64>) {
        if t == 0.0 {
            return (x0.clone(), p0.clone());
        }
        let u = &self.decomposition.eigenvectors;
        let y0 = x0.component_div(&self.sqrt_w);
        let ydot0 = p0.component_mul(&self.sqrt_w);
        let a = u.transpose() * y0;
        let b = u.transpose() * ydot0;
        let n = a.len();
        let mut q = DVector::zeros(n);
        let mut qdot = DVector::zeros(n);
        for k in 0..n {
            let w = self.mode_frequencies[k];
            let (s, c) = (w * t).sin_cos();
            q[k] = a[k] * c + b[k] * s / w;
            qdot[k] = -a[k] * w * s + b[k] * c;
        }
        let y = u * q;
        let ydot = u * qdot;
        (
            y.component_mul(&self.sqrt_w),
            ydot.component_div(&self.sqrt_w),
        )
    }

    /// Positive-frequency branch of the truncated second-order equation
    /// ĉ̈ = −(Ω² + 2ΩV) ĉ, i.e. ĉ(t) = exp(−i√A t) ĉ(0).
    pub fn evolve_rotating(&self, c0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        if t == 0.0 {
            return c0.clone();
        }
        let u = self
            .decomposition
            .eigenvectors
            .map(|x| Complex64::new(x, 0.0));
        let s = self.sqrt_w.map(|x| Complex64::new(x, 0.0));
        let mut modal = u.transpose() * c0.component_div(&s);
        for (a, &w) in modal.iter_mut().zip(self.mode_frequencies.iter()) {
            *a *= Complex64::from_polar(1.0, -w * t);
        }
        (u * modal).component_mul(&s)
    }
}

/// x̃_n = Re c_n, p̃_n = Im c_n.
pub fn quantum_to_classical_init(c0: &QuantumState) -> ClassicalState {
    ClassicalState::from_z(&c0.amplitudes, c0.time, c0.unit)
}

/// Quantum amplitudes read off the classical state, c_n = z̃_n.
pub fn classical_to_quantum(state: &ClassicalState) -> QuantumState {
    QuantumState {
        amplitudes: state.z(),
        time: state.time,
        unit: state.unit,
    }
}

/// E = Σ ω_n (x̃_n² + p̃_n²) + Σ_{n≠m} 2V_nm x̃_n x̃_m, conserved by the full
/// classical equations.
pub fn classical_energy(model: &SiteModel, x: &DVector<f64>, p: &DVector<f64>) -> f64 {
    let mut e = 0.0;
    for n in 0..x.len() {
        e += model.frequencies[n] * (x[n] * x[n] + p[n] * p[n]);
    }
    e + 2.0 * (x.transpose() * &model.coupling * x)[(0, 0)]
}

pub(crate) fn oscillator_trajectory(
    kind: DynamicsKind,
    model: &SiteModel,
    times: &[f64],
    amps: Vec<Vec<Complex64>>,
    integrator: String,
) -> Trajectory {
    let mut populations = Vec::with_capacity(amps.len());
    let mut raw_norm = Vec::with_capacity(amps.len());
    for row in &amps {
        let (p, total) = normalized_populations(row);
        populations.push(p);
        raw_norm.push(total);
    }
    Trajectory {
        kind,
        time_unit: model.time_unit(),
        times: times.to_vec(),
        populations,
        amplitudes: Some(amps),
        raw_norm: Some(raw_norm),
        tail_mass: None,
        meta: TrajectoryMeta {
            aggregate_hash: model.aggregate_hash.clone(),
            integrator,
            coupling_ratio: Some(model.coupling_ratio),
        },
    }
}

fn check_initial(model: &SiteModel, z0: &ClassicalState, times: &[f64]) -> Result<()> {
    if z0.len() != model.n_sites() {
        return Err(Error::Dimension {
            expected: model.n_sites(),
            found: z0.len(),
        });
    }
    if !z0.is_finite() {
        return Err(Error::Scenario(
            "initial classical state is not finite".into(),
        ));
    }
    check_times(times)
}

pub fn propagate_classical(
    model: &SiteModel,
    z0: &ClassicalState,
    times: &[f64],
) -> Result<Trajectory> {
    check_initial(model, z0, times)?;
    let modes = OscillatorModes::new(model)?;
    let amps = times
        .iter()
        .map(|&t| {
            let (x, p) = modes.evolve(&z0.x, &z0.p, t - z0.time);
            x.iter()
                .zip(p.iter())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect()
        })
        .collect();
    Ok(oscillator_trajectory(
        DynamicsKind::Classical,
        model,
        times,
        amps,
        "normal-mode".into(),
    ))
}

/// Step of 1/40000 of the shortest period, using a Gershgorin bound on the
/// mode frequencies so that no eigensolve is needed.
pub fn default_verlet_step(model: &SiteModel) -> f64 {
    let a = model.oscillator_matrix();
    let n = model.n_sites();
    let bound = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if bound == 0.0 {
        f64::INFINITY
    } else {
        2.0 * std::f64::consts::PI / bound.sqrt() / VERLET_STEPS_PER_PERIOD
    }
}

/// Velocity-Verlet (Störmer–Verlet) integration of ẋ̃ = Ω p̃, ṗ̃ = −(Ω + 2V) x̃.
pub fn propagate_classical_ode(
    model: &SiteModel,
    z0: &ClassicalState,
    times: &[f64],
    dt_max: Option<f64>,
) -> Result<Trajectory> {
    let dt_max = dt_max.unwrap_or_else(|| default_verlet_step(model));
    if !(dt_max > 0.0) {
        return Err(Error::InvalidTimeStep(dt_max));
    }
    check_initial(model, z0, times)?;
    let w = &model.frequencies;
    let stiffness = nalgebra::DMatrix::from_diagonal(w) + &model.coupling * 2.0;
    let force = |x: &DVector<f64>| -(&stiffness * x);

    let mut x = z0.x.clone();
    let mut p = z0.p.clone();
    let mut f = force(&x);
    let mut t = z0.time;
    let mut amps = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span != 0.0 {
            let steps = (span.abs() / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                p.axpy(0.5 * dt, &f, 1.0);
                x += w.component_mul(&p) * dt;
                f = force(&x);
                p.axpy(0.5 * dt, &f, 1.0);
            }
            t = target;
        }
        amps.push(
            x.iter()
                .zip(p.iter())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        );
    }
    let dt_label = if dt_max.is_finite() {
        format!("{dt_max:e}")
    } else {
        "inf".into()
    };
    Ok(oscillator_trajectory(
        DynamicsKind::Classical,
        model,
        times,
        amps,
        format!("velocity-verlet dt_max={dt_label}"),
    ))
}

/// Runs `steps` fixed Verlet steps and returns the largest relative deviation
/// of [`classical_energy`] from its initial value.
pub fn verlet_energy_drift(model: &SiteModel, z0: &ClassicalState, dt: f64, steps: usize) -> f64 {
    let w = &model.frequencies;
    let stiffness = nalgebra::DMatrix::from_diagonal(w) + &model.coupling * 2.0;
    let mut x = z0.x.clone();
    let mut p = z0.p.clone();
    let mut f = -(&stiffness * &x);
    let e0 = classical_energy(model, &x, &p);
    let mut worst = 0.0f64;
    for _ in 0..steps {
        p.axpy(0.5 * dt, &f, 1.0);
        x += w.component_mul(&p) * dt;
        f = -(&stiffness * &x);
        p.axpy(0.5 * dt, &f, 1.0);
        worst = worst.max(((classical_energy(model, &x, &p) - e0) / e0).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::CouplingMatrix;
    use crate::model::AggregateSpec;
    use crate::units::{TimeBase, TimeUnit};

    fn chain(n: usize, ratio: f64) -> SiteModel {
        let eps = 12000.0;
        let v = CouplingMatrix::nearest_neighbour(n, ratio * eps);
        let spec = AggregateSpec::explicit(vec![eps; n], v.to_rows());
        SiteModel::new(
            &spec,
            &v,
            TimeBase::Tau {
                coupling: ratio * eps,
            },
        )
        .unwrap()
    }

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn init_mapping() {
        let c0 = QuantumState::localized(3, 1, TimeUnit::Tau);
        let s = quantum_to_classical_init(&c0);
        assert_eq!(s.x.as_slice(), &[0.0, 1.0, 0.0]);
        assert_eq!(s.p.as_slice(), &[0.0, 0.0, 0.0]);

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = QuantumState::new(
            DVector::from_vec(vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)]),
            TimeUnit::Tau,
        );
        let s = quantum_to_classical_init(&c);
        assert_eq!(s.x.as_slice(), &[r, 0.0]);
        assert_eq!(s.p.as_slice(), &[0.0, r]);
        assert_eq!(classical_to_quantum(&s), c);
    }

    #[test]
    fn free_oscillator_rotates() {
        let model = chain(3, 0.025);
        let zero = SiteModel {
            coupling: model.coupling.map(|_| 0.0),
            ..model
        };
        let z0 = quantum_to_classical_init(&QuantumState::localized(3, 0, TimeUnit::Tau));
        let times = grid(5.0, 51);
        let traj = propagate_classical(&zero, &z0, &times).unwrap();
        let w = zero.frequencies[0];
        for (t, row) in times.iter().zip(traj.amplitudes.as_ref().unwrap()) {
            assert!((row[0].norm() - 1.0).abs() < 1e-13);
            assert!((row[0] - Complex64::from_polar(1.0, -w * t)).norm() < 1e-12);
        }
        let ode = propagate_classical_ode(&zero, &z0, &times, Some(1e-4)).unwrap();
        for (a, b) in ode.amplitudes.unwrap().iter().zip(traj.amplitudes.unwrap()) {
            assert!((a[0] - b[0]).norm() < 1e-4);
        }
    }

    #[test]
    fn exact_path_conserves_energy_and_scales_linearly() {
        let model = chain(7, 1.0 / 6.0);
        let mut z0 = quantum_to_classical_init(&QuantumState::localized(7, 3, TimeUnit::Tau));
        z0.p[2] = 0.3;
        let modes = OscillatorModes::new(&model).unwrap();
        let e0 = classical_energy(&model, &z0.x, &z0.p);
        for t in grid(10.0, 37) {
            let (x, p) = modes.evolve(&z0.x, &z0.p, t);
            assert!(((classical_energy(&model, &x, &p) - e0) / e0).abs() < 1e-9);
        }

        let times = grid(6.0, 25);
        let base = propagate_classical(&model, &z0, &times).unwrap();
        for alpha in [0.5, 2.0] {
            let scaled = ClassicalState {
                x: &z0.x * alpha,
                p: &z0.p * alpha,
                ..z0.clone()
            };
            let traj = propagate_classical(&model, &scaled, &times).unwrap();
            for (a, b) in traj.populations.iter().zip(&base.populations) {
                for (u, v) in a.iter().zip(b) {
                    assert!((u - v).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn normalized_populations_sum_to_one() {
        let model = chain(9, 0.1);
        let z0 = quantum_to_classical_init(&QuantumState::localized(9, 4, TimeUnit::Tau));
        let traj = propagate_classical(&model, &z0, &grid(8.0, 100)).unwrap();
        for row in &traj.populations {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        // the raw norm is not conserved
        assert!(traj.raw_norm_fluctuation().unwrap() > 1e-3);
    }

    #[test]
    fn instability_is_reported() {
        let model = chain(19, 0.3);
        let z0 = quantum_to_classical_init(&QuantumState::localized(19, 9, TimeUnit::Tau));
        match propagate_classical(&model, &z0, &[0.0, 1.0]) {
            Err(Error::UnstableMode { eigenvalue, .. }) => assert!(eigenvalue <= 0.0),
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn verlet_matches_exact() {
        let model = chain(5, 0.05);
        let z0 = quantum_to_classical_init(&QuantumState::localized(5, 2, TimeUnit::Tau));
        let times = grid(3.0, 13);
        let exact = propagate_classical(&model, &z0, &times).unwrap();
        let ode = propagate_classical_ode(&model, &z0, &times, None).unwrap();
        for (a, b) in exact.populations.iter().zip(&ode.populations) {
            for (u, v) in a.iter().zip(b) {
                assert!((u - v).abs() < 1e-6, "{u} vs {v}");
            }
        }
        assert!(propagate_classical_ode(&model, &z0, &times, Some(-1.0)).is_err());
    }

    #[test]
    fn verlet_energy_bounded_at_default_step() {
        let model = chain(5, 0.05);
        let z0 = quantum_to_classical_init(&QuantumState::localized(5, 2, TimeUnit::Tau));
        let drift = verlet_energy_drift(&model, &z0, default_verlet_step(&model), 100_000);
        assert!(drift < 1e-8, "drift {drift}");
    }
}
