//! Truncated ("realistic coupling") second-order dynamics, the term-by-term
//! breakdown of the exact second-order equations, and trajectory comparison.
//!
//! Differentiating the amplitude equation once more gives, per site,
//!
//! ```text
//! c̈_n = −ω_n² c_n − ω_n Σ_m 2V_nm c_m − Σ_m (ω_m − ω_n) V_nm c_m − Σ_{m,m'} V_nm V_mm' c_m'
//! ```
//!
//! while the classical oscillators obey
//!
//! ```text
//! z̈_n = −ω_n² z_n − ω_n Σ_m 2V_nm z_m − i Σ_m (ω_m − ω_n) 2V_nm p_m
//! ```
//!
//! Dropping the detuning and quadratic terms leaves the same equation for both.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{oscillator_trajectory, OscillatorModes};
use crate::error::{Error, Result};
use crate::hamiltonian::SiteModel;
use crate::model::QuantumState;
use crate::quantum::SpectralPropagator;
use crate::trajectory::{check_times, DynamicsKind, Trajectory};

/// Exact solution of ĉ̈ = −(Ω² + 2ΩV) ĉ on the positive-frequency branch,
/// reported as normalized populations.
pub fn propagate_rca(model: &SiteModel, c0: &QuantumState, times: &[f64]) -> Result<Trajectory> {
    if c0.len() != model.n_sites() {
        return Err(Error::Dimension {
            expected: model.n_sites(),
            found: c0.len(),
        });
    }
    check_times(times)?;
    let modes = OscillatorModes::new(model)?;
    let amps = times
        .iter()
        .map(|&t| {
            modes
                .evolve_rotating(&c0.amplitudes, t - c0.time)
                .iter()
                .copied()
                .collect()
        })
        .collect();
    Ok(oscillator_trajectory(
        DynamicsKind::Rca,
        model,
        times,
        amps,
        "normal-mode rotating branch".into(),
    ))
}

/// Right-hand-side terms of the two second-order equations at one instant.
#[derive(Debug, Clone)]
pub struct SecondOrderRhs {
    pub leading: DVector<Complex64>,
    pub coupling: DVector<Complex64>,
    pub detuning: DVector<Complex64>,
    pub quadratic: DVector<Complex64>,
    /// −i Σ_m (ω_m − ω_n) 2V_nm Im(a_m), the classical counterpart of `detuning`.
    pub classical_detuning: DVector<Complex64>,
}

impl SecondOrderRhs {
    pub fn new(model: &SiteModel, a: &DVector<Complex64>) -> Self {
        let w = &model.frequencies;
        let v = model.coupling.map(|x| Complex64::new(x, 0.0));
        let n = model.n_sites();
        let va = &v * a;
        let leading = DVector::from_fn(n, |i, _| -a[i] * w[i] * w[i]);
        let coupling = DVector::from_fn(n, |i, _| -va[i] * (2.0 * w[i]));
        let detuning = DVector::from_fn(n, |i, _| {
            -(0..n)
                .map(|m| a[m] * ((w[m] - w[i]) * model.coupling[(i, m)]))
                .sum::<Complex64>()
        });
        let quadratic = -(&v * &va);
        let classical_detuning = DVector::from_fn(n, |i, _| {
            let s: f64 = (0..n)
                .map(|m| (w[m] - w[i]) * 2.0 * model.coupling[(i, m)] * a[m].im)
                .sum();
            Complex64::new(0.0, -s)
        });
        Self {
            leading,
            coupling,
            detuning,
            quadratic,
            classical_detuning,
        }
    }

    /// Sum of the four quantum terms, i.e. c̈ for an exact amplitude vector.
    pub fn quantum_total(&self) -> DVector<Complex64> {
        &self.leading + &self.coupling + &self.detuning + &self.quadratic
    }
}

/// Time-averaged Euclidean magnitudes of each second-order term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderTerms {
    pub leading: f64,
    pub coupling: f64,
    pub detuning: f64,
    pub quadratic: f64,
    pub classical_detuning: f64,
}

impl SecondOrderTerms {
    pub fn quadratic_ratio(&self) -> f64 {
        self.quadratic / self.leading
    }

    pub fn detuning_ratio(&self) -> f64 {
        self.detuning / self.leading
    }
}

pub fn second_order_residuals(traj: &Trajectory, model: &SiteModel) -> Result<SecondOrderTerms> {
    let amps = traj.amplitudes.as_ref().ok_or(Error::MissingAmplitudes)?;
    if traj.n_sites() != model.n_sites() {
        return Err(Error::Dimension {
            expected: model.n_sites(),
            found: traj.n_sites(),
        });
    }
    let mut acc = [0.0; 5];
    for row in amps {
        let a = DVector::from_column_slice(row);
        let rhs = SecondOrderRhs::new(model, &a);
        for (slot, term) in acc.iter_mut().zip([
            &rhs.leading,
            &rhs.coupling,
            &rhs.detuning,
            &rhs.quadratic,
            &rhs.classical_detuning,
        ]) {
            *slot += term.norm();
        }
    }
    let k = amps.len().max(1) as f64;
    Ok(SecondOrderTerms {
        leading: acc[0] / k,
        coupling: acc[1] / k,
        detuning: acc[2] / k,
        quadratic: acc[3] / k,
        classical_detuning: acc[4] / k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteDifferenceResidual {
    /// max_{t,n} |c̈_n(FD) − rhs_n| / ω_n²
    pub max_scaled: f64,
    /// max_{t,n} |c̈_n(FD) − rhs_n| in the model's units.
    pub max_raw: f64,
    pub step: f64,
}

/// Checks the four-term second-order equation against a 5-point central
/// difference of the exact amplitudes, at step 1e-3 of the fastest period.
/// The scaled residual divides each row by ω_n², i.e. measures time in units
/// of 1/ω_n.
pub fn second_order_fd_residual(
    model: &SiteModel,
    c0: &QuantumState,
    times: &[f64],
) -> Result<FiniteDifferenceResidual> {
    let prop = SpectralPropagator::new(model)?;
    let fastest = prop.decomposition.eigenvalues.amax();
    let h = 1e-3 * 2.0 * std::f64::consts::PI / fastest;
    let mut max_scaled = 0.0f64;
    let mut max_raw = 0.0f64;
    for &t in times {
        let at = |dt: f64| prop.evolve(&c0.amplitudes, t + dt - c0.time);
        let c = at(0.0);
        let fd = (at(-2.0 * h) * Complex64::from(-1.0)
            + at(-h) * Complex64::from(16.0)
            + &c * Complex64::from(-30.0)
            + at(h) * Complex64::from(16.0)
            + at(2.0 * h) * Complex64::from(-1.0))
            / Complex64::from(12.0 * h * h);
        let rhs = SecondOrderRhs::new(model, &c).quantum_total();
        for n in 0..model.n_sites() {
            let r = (fd[n] - rhs[n]).norm();
            max_raw = max_raw.max(r);
            max_scaled = max_scaled.max(r / model.frequencies[n].powi(2));
        }
    }
    Ok(FiniteDifferenceResidual {
        max_scaled,
        max_raw,
        step: h,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub max_pop_dev: f64,
    pub mean_pop_dev: f64,
    /// Largest difference in normalized |a_i a_j|, i ≠ j; absent when either
    /// trajectory lacks amplitudes.
    pub max_coherence_dev: Option<f64>,
    pub per_site_dev: Vec<f64>,
    pub coupling_ratio: Option<f64>,
}

fn coherences(row: &[Complex64]) -> Vec<f64> {
    let total: f64 = row.iter().map(|a| a.norm_sqr()).sum();
    let mut out = Vec::with_capacity(row.len() * row.len() / 2);
    for i in 0..row.len() {
        for j in i + 1..row.len() {
            out.push(row[i].norm() * row[j].norm() / total);
        }
    }
    out
}

pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<DeviationReport> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    if a.n_sites() != b.n_sites() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} sites",
            a.n_sites(),
            b.n_sites()
        )));
    }
    if a.time_unit != b.time_unit {
        return Err(Error::GridMismatch("different time units".into()));
    }
    for (ta, tb) in a.times.iter().zip(&b.times) {
        if (ta - tb).abs() > 1e-9 * ta.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("time {ta} vs {tb}")));
        }
    }
    let n = a.n_sites();
    let mut per_site = vec![0.0f64; n];
    let mut total = 0.0;
    for (ra, rb) in a.populations.iter().zip(&b.populations) {
        for k in 0..n {
            let d = (ra[k] - rb[k]).abs();
            per_site[k] = per_site[k].max(d);
            total += d;
        }
    }
    let count = (a.len() * n).max(1) as f64;
    let max_coherence_dev = match (&a.amplitudes, &b.amplitudes) {
        (Some(aa), Some(bb)) => Some(
            aa.iter()
                .zip(bb)
                .flat_map(|(x, y)| {
                    coherences(x)
                        .into_iter()
                        .zip(coherences(y))
                        .map(|(u, v)| (u - v).abs())
                        .collect::<Vec<_>>()
                })
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    let coupling_ratio = match (a.meta.coupling_ratio, b.meta.coupling_ratio) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    };
    Ok(DeviationReport {
        max_pop_dev: per_site.iter().copied().fold(0.0, f64::max),
        mean_pop_dev: total / count,
        max_coherence_dev,
        per_site_dev: per_site,
        coupling_ratio,
    })
}
