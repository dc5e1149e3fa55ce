//! Aggregate description and the state types shared by all propagators.

use std::fmt;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::units::TimeUnit;

pub const SPEC_SCHEMA_VERSION: u32 = 1;

const ORIENTATION_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

/// A molecular aggregate in the one-exciton picture.
///
/// Couplings come either from point-dipole geometry (magnitudes, orientations
/// and positions) or from an explicit site-basis matrix in cm⁻¹. If both are
/// given the explicit matrix wins and validation emits a warning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateSpec {
    /// Transition energies ε_n in cm⁻¹.
    pub site_energies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole_magnitudes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole_orientations: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit_coupling: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    Geometry,
    Explicit,
}

#[derive(Serialize, Deserialize)]
struct SpecDocument {
    schema: u32,
    #[serde(flatten)]
    spec: AggregateSpec,
}

impl AggregateSpec {
    pub fn explicit(site_energies: Vec<f64>, coupling: Vec<Vec<f64>>) -> Self {
        Self {
            site_energies,
            dipole_magnitudes: None,
            dipole_orientations: None,
            positions: None,
            explicit_coupling: Some(coupling),
        }
    }

    pub fn geometric(
        site_energies: Vec<f64>,
        magnitudes: Vec<f64>,
        orientations: Vec<[f64; 3]>,
        positions: Vec<[f64; 3]>,
    ) -> Self {
        Self {
            site_energies,
            dipole_magnitudes: Some(magnitudes),
            dipole_orientations: Some(orientations),
            positions: Some(positions),
            explicit_coupling: None,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.site_energies.len()
    }

    pub fn has_geometry(&self) -> bool {
        self.dipole_magnitudes.is_some()
            && self.dipole_orientations.is_some()
            && self.positions.is_some()
    }

    pub fn coupling_mode(&self) -> Option<CouplingMode> {
        if self.explicit_coupling.is_some() {
            Some(CouplingMode::Explicit)
        } else if self.has_geometry() {
            Some(CouplingMode::Geometry)
        } else {
            None
        }
    }

    /// Returns every violated invariant; an empty violation list means the
    /// spec can be propagated.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.n_sites();
        if n == 0 {
            report.violations.push(Violation::Empty);
            return report;
        }
        for (site, &e) in self.site_energies.iter().enumerate() {
            if !e.is_finite() || e <= 0.0 {
                report
                    .violations
                    .push(Violation::NonPositiveEnergy { site, value: e });
            }
        }

        let mut check_len = |field: &'static str, found: usize| {
            if found != n {
                report.violations.push(Violation::LengthMismatch {
                    field,
                    expected: n,
                    found,
                });
                false
            } else {
                true
            }
        };
        let mags_ok = self
            .dipole_magnitudes
            .as_ref()
            .is_none_or(|m| check_len("dipole_magnitudes", m.len()));
        let orient_ok = self
            .dipole_orientations
            .as_ref()
            .is_none_or(|o| check_len("dipole_orientations", o.len()));
        let pos_ok = self
            .positions
            .as_ref()
            .is_none_or(|p| check_len("positions", p.len()));

        if let (Some(mags), true) = (&self.dipole_magnitudes, mags_ok) {
            for (site, &m) in mags.iter().enumerate() {
                if !m.is_finite() || m < 0.0 {
                    report
                        .violations
                        .push(Violation::InvalidDipoleMagnitude { site, value: m });
                }
            }
        }
        if let (Some(orients), true) = (&self.dipole_orientations, orient_ok) {
            for (site, o) in orients.iter().enumerate() {
                let norm = (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt();
                if !norm.is_finite() || (norm - 1.0).abs() > ORIENTATION_TOL {
                    report
                        .violations
                        .push(Violation::NonUnitOrientation { site, norm });
                }
            }
        }

        match &self.explicit_coupling {
            Some(v) => {
                if self.has_geometry() {
                    report.warnings.push(
                        "both geometry and explicit_coupling given; explicit coupling is used"
                            .to_string(),
                    );
                }
                check_explicit(v, n, &mut report);
            }
            None if self.has_geometry() => {
                if let (Some(pos), true) = (&self.positions, pos_ok) {
                    for a in 0..n {
                        if pos[a].iter().any(|x| !x.is_finite()) {
                            report.violations.push(Violation::NonFinite {
                                field: "positions",
                                row: a,
                                col: None,
                            });
                        }
                        for b in a + 1..n {
                            if pos[a] == pos[b] {
                                report
                                    .violations
                                    .push(Violation::CoincidentPositions { a, b });
                            }
                        }
                    }
                }
            }
            None => report.violations.push(Violation::NoCouplingSource),
        }
        report
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(report))
        }
    }

    /// Short content hash used to tag trajectories.
    pub fn content_hash(&self) -> String {
        // serde_json writes struct fields in declaration order, so this is stable.
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..8])
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = SpecDocument {
            schema: SPEC_SCHEMA_VERSION,
            spec: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema").and_then(|s| s.as_u64()) {
            Some(v) if v == SPEC_SCHEMA_VERSION as u64 => {}
            other => {
                return Err(Error::Scenario(format!(
                    "unsupported aggregate schema {other:?}, expected {SPEC_SCHEMA_VERSION}"
                )))
            }
        }
        let doc: SpecDocument = serde_json::from_value(value)?;
        Ok(doc.spec)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

fn check_explicit(v: &[Vec<f64>], n: usize, report: &mut ValidationReport) {
    if v.len() != n || v.iter().any(|row| row.len() != n) {
        report.violations.push(Violation::LengthMismatch {
            field: "explicit_coupling",
            expected: n,
            found: v.len(),
        });
        return;
    }
    for i in 0..n {
        for j in 0..n {
            if !v[i][j].is_finite() {
                report.violations.push(Violation::NonFinite {
                    field: "explicit_coupling",
                    row: i,
                    col: Some(j),
                });
            }
        }
        if v[i][i] != 0.0 {
            report.violations.push(Violation::NonZeroDiagonal {
                site: i,
                value: v[i][i],
            });
        }
        for j in i + 1..n {
            let diff = (v[i][j] - v[j][i]).abs();
            if diff > SYMMETRY_TOL {
                report
                    .violations
                    .push(Violation::AsymmetricCoupling { i, j, diff });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    NonPositiveEnergy {
        site: usize,
        value: f64,
    },
    InvalidDipoleMagnitude {
        site: usize,
        value: f64,
    },
    NonUnitOrientation {
        site: usize,
        norm: f64,
    },
    CoincidentPositions {
        a: usize,
        b: usize,
    },
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    NonFinite {
        field: &'static str,
        row: usize,
        col: Option<usize>,
    },
    NonZeroDiagonal {
        site: usize,
        value: f64,
    },
    AsymmetricCoupling {
        i: usize,
        j: usize,
        diff: f64,
    },
    NoCouplingSource,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "aggregate has no sites"),
            Violation::NonPositiveEnergy { site, value } => {
                write!(f, "site {site}: transition energy {value} is not positive")
            }
            Violation::InvalidDipoleMagnitude { site, value } => {
                write!(f, "site {site}: dipole magnitude {value} is invalid")
            }
            Violation::NonUnitOrientation { site, norm } => {
                write!(f, "site {site}: orientation has norm {norm}, expected 1")
            }
            Violation::CoincidentPositions { a, b } => {
                write!(f, "sites {a} and {b} share a position")
            }
            Violation::LengthMismatch {
                field,
                expected,
                found,
            } => write!(f, "{field}: expected {expected} entries, found {found}"),
            Violation::NonFinite { field, row, col } => match col {
                Some(c) => write!(f, "{field}[{row}][{c}] is not finite"),
                None => write!(f, "{field}[{row}] is not finite"),
            },
            Violation::NonZeroDiagonal { site, value } => {
                write!(f, "explicit_coupling[{site}][{site}] = {value}, expected 0")
            }
            Violation::AsymmetricCoupling { i, j, diff } => {
                write!(
                    f,
                    "explicit_coupling not symmetric at ({i}, {j}): |diff| = {diff:e}"
                )
            }
            Violation::NoCouplingSource => {
                write!(
                    f,
                    "neither explicit_coupling nor complete dipole geometry given"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&msgs.join("; "))
    }
}

/// Complex amplitudes c_n on the one-exciton manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub amplitudes: DVector<Complex64>,
    pub time: f64,
    pub unit: TimeUnit,
}

impl QuantumState {
    pub fn new(amplitudes: DVector<Complex64>, unit: TimeUnit) -> Self {
        Self {
            amplitudes,
            time: 0.0,
            unit,
        }
    }

    /// Excitation fully on `site` (0-based).
    pub fn localized(n_sites: usize, site: usize, unit: TimeUnit) -> Self {
        let mut c = DVector::zeros(n_sites);
        c[site] = Complex64::new(1.0, 0.0);
        Self::new(c, unit)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Dimensionless oscillator coordinates; z̃_n = x̃_n + i p̃_n.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    pub x: DVector<f64>,
    pub p: DVector<f64>,
    pub time: f64,
    pub unit: TimeUnit,
}

impl ClassicalState {
    pub fn from_z(z: &DVector<Complex64>, time: f64, unit: TimeUnit) -> Self {
        Self {
            x: z.map(|c| c.re),
            p: z.map(|c| c.im),
            time,
            unit,
        }
    }

    pub fn z(&self) -> DVector<Complex64> {
        self.x.zip_map(&self.p, Complex64::new)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.p.iter()).all(|v| v.is_finite())
    }
}
