//! Analytic oracles and observables for the nearest-neighbour chain: Bessel
//! functions of integer order, the infinite-chain solution, spreading
//! velocity and the one-exciton coherence |ρ_ij| = |c_i* c_j|.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trajectory::{DynamicsKind, Trajectory, TrajectoryMeta};
use crate::units::TimeUnit;

pub const BESSEL_MAX_ORDER: i32 = 200;
pub const BESSEL_MAX_ARG: f64 = 500.0;
const MILLER_AGREEMENT: f64 = 1e-13;
const RESCALE_ABOVE: f64 = 1e250;

/// Window bound on boundary/tail mass for velocity fits.
pub const VELOCITY_TAIL_LIMIT: f64 = 1e-10;

fn check_range(order: i32, x: f64) -> Result<()> {
    if order.abs() > BESSEL_MAX_ORDER || !(0.0..=BESSEL_MAX_ARG).contains(&x) {
        return Err(Error::BesselRange { order, x });
    }
    Ok(())
}

/// One Miller pass from `start` down to 0, normalized by J_0 + 2ΣJ_{2k} = 1.
fn miller_pass(x: f64, n_max: usize, start: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    let mut next = 0.0; // j_{k+1}
    let mut cur = 1e-30; // j_k
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if k <= n_max {
            out[k] = cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    out.iter().map(|v| v / norm).collect()
}

/// J_0(x) … J_{n_max}(x) by Miller's downward recurrence. The start order
/// begins at max(n_max, ⌈x⌉) + 40 and doubles until two passes agree.
pub fn bessel_j_sequence(n_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    let mut start = n_max.max(x.ceil() as usize) + 40;
    start += start % 2;
    let mut prev = miller_pass(x, n_max, start);
    loop {
        start *= 2;
        let cur = miller_pass(x, n_max, start);
        let agree = prev
            .iter()
            .zip(&cur)
            .all(|(a, b)| (a - b).abs() <= MILLER_AGREEMENT);
        if agree {
            return cur;
        }
        prev = cur;
    }
}

/// Bessel function of the first kind of integer order; J_{−n} = (−1)ⁿ J_n.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    check_range(order, x)?;
    let n = order.unsigned_abs() as usize;
    let j = bessel_j_sequence(n, x)[n];
    Ok(if order < 0 && n % 2 == 1 { -j } else { j })
}

fn chain_bessel(n_sites: usize, origin: usize, tau: f64) -> Result<(Vec<f64>, f64)> {
    if origin >= n_sites {
        return Err(Error::Scenario(format!(
            "origin {origin} outside chain of {n_sites} sites"
        )));
    }
    let reach = origin.max(n_sites - 1 - origin);
    check_range(reach as i32, tau)?;
    if !(tau >= 0.0) {
        return Err(Error::BesselRange { order: 0, x: tau });
    }
    // Extend well past the grid so the tail mass is summed, not differenced.
    let extra = reach + 60 + tau.ceil() as usize;
    let seq = bessel_j_sequence(extra, tau);
    let left = origin;
    let right = n_sites - 1 - origin;
    let tail: f64 = (left + 1..=extra).map(|k| seq[k] * seq[k]).sum::<f64>()
        + (right + 1..=extra).map(|k| seq[k] * seq[k]).sum::<f64>();
    Ok((seq, tail))
}

/// P_k(τ) = J²_{k−origin}(τ) on a chain of `n_sites`, starting at `origin`.
pub fn chain_populations_analytic(n_sites: usize, origin: usize, tau: f64) -> Result<Vec<f64>> {
    let (seq, _) = chain_bessel(n_sites, origin, tau)?;
    Ok((0..n_sites)
        .map(|k| {
            let j = seq[k.abs_diff(origin)];
            j * j
        })
        .collect())
}

/// c_k(τ) = e^{−i(k−origin)π/2} J_{k−origin}(τ), the solution of
/// i dc_n/dτ = ½(c_{n−1} + c_{n+1}) with c_n(0) = δ_{n,origin}.
pub fn chain_amplitudes_analytic(
    n_sites: usize,
    origin: usize,
    tau: f64,
) -> Result<Vec<Complex64>> {
    let (seq, _) = chain_bessel(n_sites, origin, tau)?;
    Ok((0..n_sites)
        .map(|k| {
            let d = k as i64 - origin as i64;
            let mut j = seq[d.unsigned_abs() as usize];
            if d < 0 && d % 2 != 0 {
                j = -j;
            }
            let phase = Complex64::new(0.0, -1.0).powi(d.rem_euclid(4) as i32);
            phase * j
        })
        .collect())
}

/// Infinite-chain solution sampled on a finite grid; `tail_mass` carries the
/// probability beyond the grid.
pub fn analytic_chain_trajectory(
    n_sites: usize,
    origin: usize,
    times: &[f64],
) -> Result<Trajectory> {
    let mut populations = Vec::with_capacity(times.len());
    let mut amplitudes = Vec::with_capacity(times.len());
    let mut tails = Vec::with_capacity(times.len());
    for &tau in times {
        let (_, tail) = chain_bessel(n_sites, origin, tau)?;
        let amps = chain_amplitudes_analytic(n_sites, origin, tau)?;
        populations.push(amps.iter().map(|a| a.norm_sqr()).collect());
        amplitudes.push(amps);
        tails.push(tail);
    }
    Ok(Trajectory {
        kind: DynamicsKind::Analytic,
        time_unit: TimeUnit::Tau,
        times: times.to_vec(),
        populations,
        amplitudes: Some(amplitudes),
        raw_norm: None,
        tail_mass: Some(tails),
        meta: TrajectoryMeta {
            aggregate_hash: format!("bessel-chain-{n_sites}-{origin}"),
            integrator: "bessel".into(),
            coupling_ratio: None,
        },
    })
}

/// ⟨(n − origin)²⟩ for one population row.
pub fn mean_square_displacement(populations: &[f64], origin: usize) -> f64 {
    populations
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let d = k as f64 - origin as f64;
            d * d * p
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocityFit {
    /// Least-squares slope of √⟨n²⟩ against τ through the origin.
    pub slope: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    /// Last τ in the fitted window.
    pub window_end: f64,
    pub points: usize,
}

/// Fits √⟨n²⟩ = v·τ over the leading window where the mass at (or beyond) the
/// chain ends stays below [`VELOCITY_TAIL_LIMIT`].
pub fn spread_velocity(traj: &Trajectory, origin: usize) -> Result<VelocityFit> {
    if traj.time_unit != TimeUnit::Tau {
        return Err(Error::WrongTimeUnit);
    }
    let n = traj.n_sites();
    let mut pts = Vec::new();
    for (k, (&tau, row)) in traj.times.iter().zip(&traj.populations).enumerate() {
        let boundary = match &traj.tail_mass {
            Some(tail) => tail[k],
            None => row[0] + if n > 1 { row[n - 1] } else { 0.0 },
        };
        if boundary >= VELOCITY_TAIL_LIMIT {
            break;
        }
        if tau > 0.0 {
            pts.push((tau, mean_square_displacement(row, origin).sqrt()));
        }
    }
    if pts.len() < 5 {
        return Err(Error::TooShort(pts.len()));
    }
    let num: f64 = pts.iter().map(|(t, r)| t * r).sum();
    let den: f64 = pts.iter().map(|(t, _)| t * t).sum();
    let slope = num / den;
    let residual = (pts
        .iter()
        .map(|(t, r)| (r - slope * t).powi(2))
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    Ok(VelocityFit {
        slope,
        residual,
        window_end: pts.last().expect("non-empty").0,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Concurrence {
    pub i: usize,
    pub j: usize,
    /// i == j, in which case the series is the population of site i.
    pub diagonal: bool,
    pub values: Vec<f64>,
}

/// |ρ_ij(t)| = |a_i a_j| / Σ|a|², with a the trajectory amplitudes.
pub fn concurrence(traj: &Trajectory, i: usize, j: usize) -> Result<Concurrence> {
    let amps = traj.amplitudes.as_ref().ok_or(Error::MissingAmplitudes)?;
    let n = traj.n_sites();
    if i >= n || j >= n {
        return Err(Error::Dimension {
            expected: n,
            found: i.max(j) + 1,
        });
    }
    let values = amps
        .iter()
        .map(|row| {
            let total: f64 = row.iter().map(|a| a.norm_sqr()).sum();
            row[i].norm() * row[j].norm() / total
        })
        .collect();
    Ok(Concurrence {
        i,
        j,
        diagonal: i == j,
        values,
    })
}
