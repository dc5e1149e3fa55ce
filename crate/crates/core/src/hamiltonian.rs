//! Site-basis couplings: point-dipole geometry, the oscillator-strength map
//! and the propagation-ready [`SiteModel`].

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{AggregateSpec, CouplingMode};
use crate::units::{TimeBase, TimeUnit};

/// Point-dipole interaction kernel (1 − 3R̂R̂ᵀ)/R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleTensor(pub Matrix3<f64>);

impl DipoleTensor {
    /// ε̂_a · T · ε̂_b
    pub fn contract(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        a.dot(&(self.0 * b))
    }
}

pub fn dipole_tensor(r_m: [f64; 3], r_n: [f64; 3]) -> Result<DipoleTensor> {
    let sep = Vector3::from(r_n) - Vector3::from(r_m);
    let r = sep.norm();
    if r == 0.0 {
        return Err(Error::CoincidentPositions(0, 1));
    }
    let u = sep / r;
    Ok(DipoleTensor(
        (Matrix3::identity() - 3.0 * u * u.transpose()) / (r * r * r),
    ))
}

/// Symmetric site coupling V_nm in cm⁻¹ with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub v: DMatrix<f64>,
}

impl CouplingMatrix {
    pub fn n_sites(&self) -> usize {
        self.v.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.v.amax()
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            v: DMatrix::zeros(n, n),
        }
    }

    /// Uniform nearest-neighbour chain coupling.
    pub fn nearest_neighbour(n: usize, coupling: f64) -> Self {
        Self {
            v: DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { coupling } else { 0.0 }),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.v
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

pub fn build_coupling(spec: &AggregateSpec) -> Result<CouplingMatrix> {
    spec.ensure_valid()?;
    let n = spec.n_sites();
    match spec.coupling_mode() {
        Some(CouplingMode::Explicit) => {
            let rows = spec.explicit_coupling.as_ref().expect("explicit mode");
            Ok(CouplingMatrix {
                v: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
            })
        }
        Some(CouplingMode::Geometry) => {
            let mags = spec.dipole_magnitudes.as_ref().expect("geometry mode");
            let dirs: Vec<Vector3<f64>> = spec
                .dipole_orientations
                .as_ref()
                .expect("geometry mode")
                .iter()
                .map(|d| Vector3::from(*d))
                .collect();
            let pos = spec.positions.as_ref().expect("geometry mode");
            let mut v = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in a + 1..n {
                    let t = dipole_tensor(pos[a], pos[b])
                        .map_err(|_| Error::CoincidentPositions(a, b))?;
                    let val = mags[a] * t.contract(&dirs[a], &dirs[b]) * mags[b];
                    v[(a, b)] = val;
                    v[(b, a)] = val;
                }
            }
            Ok(CouplingMatrix { v })
        }
        None => unreachable!("validated spec has a coupling source"),
    }
}

/// Classical counterparts of the quantum couplings, in reduced units where
/// the oscillator mass, electron charge and ħ are 1 and frequencies are those
/// of the chosen [`TimeBase`].
#[derive(Debug, Clone)]
pub struct OscillatorMap {
    /// Oscillator strengths f_n = 2 m ω_n μ_n², when dipole magnitudes are known.
    pub strengths: Option<Vec<f64>>,
    /// K_nm = 2 m V_nm √(ω_n ω_m).
    pub k: DMatrix<f64>,
    pub frequencies: DVector<f64>,
    pub mass: f64,
}

impl OscillatorMap {
    /// max over pairs of |K_nm / (m√(ω_nω_m)) − 2V_nm|.
    pub fn identity_residual(&self, coupling: &DMatrix<f64>) -> f64 {
        let n = self.frequencies.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let lhs = self.k[(a, b)]
                    / (self.mass * (self.frequencies[a] * self.frequencies[b]).sqrt());
                worst = worst.max((lhs - 2.0 * coupling[(a, b)]).abs());
            }
        }
        worst
    }
}

pub fn oscillator_map(
    spec: &AggregateSpec,
    coupling: &CouplingMatrix,
    base: TimeBase,
) -> Result<OscillatorMap> {
    let model = SiteModel::new(spec, coupling, base)?;
    let mass = 1.0;
    let w = &model.frequencies;
    let strengths = spec.dipole_magnitudes.as_ref().map(|mags| {
        mags.iter()
            .zip(w.iter())
            .map(|(mu, omega)| 2.0 * mass * omega * mu * mu)
            .collect::<Vec<_>>()
    });
    let n = model.n_sites();
    let dark = |i: usize| strengths.as_ref().is_some_and(|f| f[i] == 0.0);
    let k = DMatrix::from_fn(n, n, |a, b| {
        if a == b || dark(a) || dark(b) {
            0.0
        } else {
            2.0 * mass * model.coupling[(a, b)] * (w[a] * w[b]).sqrt()
        }
    });
    Ok(OscillatorMap {
        strengths,
        k,
        frequencies: w.clone(),
        mass,
    })
}

/// Site frequencies and couplings in rad per time unit, ready for propagation.
#[derive(Debug, Clone)]
pub struct SiteModel {
    pub frequencies: DVector<f64>,
    pub coupling: DMatrix<f64>,
    pub base: TimeBase,
    pub aggregate_hash: String,
    /// max |V_nm| / min ε_n
    pub coupling_ratio: f64,
}

impl SiteModel {
    pub fn new(spec: &AggregateSpec, coupling: &CouplingMatrix, base: TimeBase) -> Result<Self> {
        spec.ensure_valid()?;
        let n = spec.n_sites();
        if coupling.n_sites() != n {
            return Err(Error::Dimension {
                expected: n,
                found: coupling.n_sites(),
            });
        }
        let scale = base.energy_scale();
        let e_min = spec
            .site_energies
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            frequencies: DVector::from_iterator(n, spec.site_energies.iter().map(|e| e * scale)),
            coupling: &coupling.v * scale,
            base,
            aggregate_hash: spec.content_hash(),
            coupling_ratio: coupling.max_abs() / e_min,
        })
    }

    /// Builds the coupling from the aggregate first.
    pub fn from_spec(spec: &AggregateSpec, base: TimeBase) -> Result<Self> {
        let v = build_coupling(spec)?;
        Self::new(spec, &v, base)
    }

    pub fn n_sites(&self) -> usize {
        self.frequencies.len()
    }

    pub fn time_unit(&self) -> TimeUnit {
        self.base.unit()
    }

    /// diag(ω) + V
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.frequencies) + &self.coupling
    }

    /// Ω² + 2Ω^{1/2} V Ω^{1/2}: the oscillator equations in mass-weighted
    /// coordinates y_n = x̃_n / √ω_n.
    pub fn oscillator_matrix(&self) -> DMatrix<f64> {
        let w = &self.frequencies;
        let n = self.n_sites();
        DMatrix::from_fn(n, n, |a, b| {
            let c = 2.0 * (w[a] * w[b]).sqrt() * self.coupling[(a, b)];
            if a == b {
                w[a] * w[a] + c
            } else {
                c
            }
        })
    }
}
