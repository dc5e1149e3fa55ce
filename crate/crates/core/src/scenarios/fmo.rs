//! Seven-site FMO complex in femtoseconds, from a whitespace-separated 7×7
//! site-basis matrix in cm⁻¹ with '#' comment lines.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{time_grid, Reports};
use crate::classical::{propagate_classical, quantum_to_classical_init};
use crate::error::{Error, Result};
use crate::hamiltonian::SiteModel;
use crate::model::{AggregateSpec, QuantumState};
use crate::quantum::propagate_quantum;
use crate::rca::{compare, propagate_rca};
use crate::trajectory::Trajectory;
use crate::units::{TimeBase, TimeUnit};

pub const FMO_SITES: usize = 7;
/// Contents of `data/fmo_7site.txt`.
pub const BUNDLED_FMO_TEXT: &str = include_str!("../../data/fmo_7site.txt");
pub const BUNDLED_FMO_NAME: &str = "<bundled fmo_7site.txt>";
/// 1-based monomers shown in the reference figure.
pub const PLOTTED_MONOMERS: [usize; 3] = [1, 2, 3];

const SYMMETRY_TOL: f64 = 1e-9;
const SITE_ENERGY_RANGE: (f64, f64) = (5e3, 5e4);
const BREAKDOWN_COUPLING_RATIO: f64 = 0.1;
const BREAKDOWN_ENERGY_SPREAD: f64 = 0.1;

/// Parses a 7×7 matrix into an explicit-coupling aggregate.
pub fn parse_fmo(text: &str, source: impl AsRef<Path>) -> Result<AggregateSpec> {
    let source = source.as_ref();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: source.to_path_buf(),
        line,
        msg,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let r = rows.len() + 1;
        let mut row = Vec::with_capacity(FMO_SITES);
        for (c, tok) in line.split_whitespace().enumerate() {
            let x: f64 = tok.parse().map_err(|_| {
                parse_err(
                    idx + 1,
                    format!("cannot parse '{tok}' at row {r}, column {}", c + 1),
                )
            })?;
            if !x.is_finite() {
                return Err(parse_err(
                    idx + 1,
                    format!("non-finite entry '{tok}' at row {r}, column {}", c + 1),
                ));
            }
            row.push(x);
        }
        if row.len() != FMO_SITES {
            return Err(Error::Dimension {
                expected: FMO_SITES,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.len() != FMO_SITES {
        return Err(Error::Dimension {
            expected: FMO_SITES,
            found: rows.len(),
        });
    }
    let mut asym = 0.0f64;
    for i in 0..FMO_SITES {
        for j in 0..FMO_SITES {
            asym = asym.max((rows[i][j] - rows[j][i]).abs());
        }
    }
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let energies: Vec<f64> = (0..FMO_SITES).map(|i| rows[i][i]).collect();
    for (i, &e) in energies.iter().enumerate() {
        if !(SITE_ENERGY_RANGE.0..=SITE_ENERGY_RANGE.1).contains(&e) {
            return Err(Error::Scenario(format!(
                "monomer {} energy {e} cm^-1 outside [{}, {}]",
                i + 1,
                SITE_ENERGY_RANGE.0,
                SITE_ENERGY_RANGE.1
            )));
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let spec = AggregateSpec::explicit(energies, rows);
    spec.ensure_valid()?;
    Ok(spec)
}

pub fn load_fmo(path: impl AsRef<Path>) -> Result<AggregateSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fmo(&text, path)
}

pub fn bundled_fmo() -> AggregateSpec {
    parse_fmo(BUNDLED_FMO_TEXT, BUNDLED_FMO_NAME).expect("bundled FMO matrix is valid")
}

/// Adds `shift` to every site energy; the result must stay positive.
pub fn shift_energies(spec: &AggregateSpec, shift: f64) -> Result<AggregateSpec> {
    let mut out = spec.clone();
    for e in &mut out.site_energies {
        *e += shift;
        if !(*e > 0.0) {
            return Err(Error::NegativeEnergy(*e));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FmoScenario {
    /// `None` uses the bundled matrix.
    pub hamiltonian_file: Option<PathBuf>,
    /// 1-based monomer.
    pub initial_site: usize,
    pub t_max_fs: f64,
    pub samples: usize,
    /// cm⁻¹, added to every site energy.
    pub energy_shift: f64,
}

impl Default for FmoScenario {
    fn default() -> Self {
        Self {
            hamiltonian_file: None,
            initial_site: 1,
            t_max_fs: 1000.0,
            samples: 1000,
            energy_shift: 0.0,
        }
    }
}

impl FmoScenario {
    pub fn validate(&self) -> Result<()> {
        if !(1..=FMO_SITES).contains(&self.initial_site) {
            return Err(Error::Scenario(format!(
                "initial monomer must be in 1..={FMO_SITES}, got {}",
                self.initial_site
            )));
        }
        if !(self.t_max_fs >= 0.0 && self.t_max_fs.is_finite()) {
            return Err(Error::Scenario(format!(
                "t_max must be non-negative, got {}",
                self.t_max_fs
            )));
        }
        if self.samples == 0 || (self.samples == 1 && self.t_max_fs > 0.0) {
            return Err(Error::Scenario(
                "at least two samples required for t_max > 0".into(),
            ));
        }
        if !self.energy_shift.is_finite() {
            return Err(Error::Scenario("energy shift must be finite".into()));
        }
        Ok(())
    }

    /// The unshifted aggregate from the configured or bundled matrix.
    pub fn base_spec(&self) -> Result<AggregateSpec> {
        match &self.hamiltonian_file {
            Some(p) => load_fmo(p),
            None => Ok(bundled_fmo()),
        }
    }

    pub fn spec(&self) -> Result<AggregateSpec> {
        shift_energies(&self.base_spec()?, self.energy_shift)
    }

    pub fn times(&self) -> Vec<f64> {
        time_grid(self.t_max_fs, self.samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomerPeak {
    /// 1-based.
    pub monomer: usize,
    pub plotted: bool,
    pub quantum: f64,
    pub classical: f64,
    pub rca: f64,
}

/// Heuristic flag for when the truncated dynamics should not be trusted:
/// couplings or energy disorder no longer small against the site energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcaBreakdown {
    /// max |V| / min ε
    pub coupling_ratio: f64,
    /// (max ε − min ε) / mean ε
    pub energy_spread: f64,
    pub flagged: bool,
}

impl RcaBreakdown {
    pub fn assess(spec: &AggregateSpec, coupling_ratio: f64) -> Self {
        let e = &spec.site_energies;
        let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        let energy_spread = (max - min) / mean;
        Self {
            coupling_ratio,
            energy_spread,
            flagged: coupling_ratio > BREAKDOWN_COUPLING_RATIO
                || energy_spread > BREAKDOWN_ENERGY_SPREAD,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FmoRun {
    pub scenario: FmoScenario,
    /// After the energy shift.
    pub spec: AggregateSpec,
    pub quantum: Trajectory,
    pub classical: Trajectory,
    pub rca: Trajectory,
    pub reports: Reports,
    pub peaks: Vec<MonomerPeak>,
    pub breakdown: RcaBreakdown,
}

impl FmoRun {
    pub fn trajectories(&self) -> [&Trajectory; 3] {
        [&self.quantum, &self.classical, &self.rca]
    }

    pub fn peak(&self, monomer: usize) -> &MonomerPeak {
        &self.peaks[monomer - 1]
    }
}

fn series_max(t: &Trajectory, site: usize) -> f64 {
    t.site_series(site).into_iter().fold(0.0, f64::max)
}

pub fn run_fmo(sc: &FmoScenario) -> Result<FmoRun> {
    sc.validate()?;
    let spec = sc.spec()?;
    let model = SiteModel::from_spec(&spec, TimeBase::Femtoseconds)?;
    let times = sc.times();
    let c0 = QuantumState::localized(FMO_SITES, sc.initial_site - 1, TimeUnit::Femtoseconds);
    let quantum = propagate_quantum(&model, &c0, &times)?;
    let classical = propagate_classical(&model, &quantum_to_classical_init(&c0), &times)?;
    let rca = propagate_rca(&model, &c0, &times)?;

    let mut reports = Reports::new();
    for (name, a, b) in [
        ("classical_vs_quantum", &classical, &quantum),
        ("rca_vs_quantum", &rca, &quantum),
        ("rca_vs_classical", &rca, &classical),
    ] {
        reports.insert(name.to_string(), compare(a, b)?);
    }
    let peaks = (0..FMO_SITES)
        .map(|s| MonomerPeak {
            monomer: s + 1,
            plotted: PLOTTED_MONOMERS.contains(&(s + 1)),
            quantum: series_max(&quantum, s),
            classical: series_max(&classical, s),
            rca: series_max(&rca, s),
        })
        .collect();
    let breakdown = RcaBreakdown::assess(&spec, model.coupling_ratio);
    Ok(FmoRun {
        scenario: sc.clone(),
        spec,
        quantum,
        classical,
        rca,
        reports,
        peaks,
        breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingMode;

    fn matrix_text(edit: impl Fn(&mut Vec<Vec<String>>)) -> String {
        let mut rows: Vec<Vec<String>> = BUNDLED_FMO_TEXT
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(String::from).collect())
            .collect();
        edit(&mut rows);
        rows.iter()
            .map(|r| r.join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn bundled_matrix_magnitudes() {
        let spec = bundled_fmo();
        assert_eq!(spec.n_sites(), 7);
        assert_eq!(spec.coupling_mode(), Some(CouplingMode::Explicit));
        for &e in &spec.site_energies {
            assert!((12_000.0..13_000.0).contains(&e));
        }
        let v = spec.explicit_coupling.as_ref().unwrap();
        let vmax = v.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!((50.0..500.0).contains(&vmax));
        assert_eq!(v[0][1], -87.7);
        assert_eq!(v[0][0], 0.0);
    }

    #[test]
    fn loader_reads_files_like_the_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.txt");
        std::fs::write(&p, BUNDLED_FMO_TEXT).unwrap();
        assert_eq!(load_fmo(&p).unwrap(), bundled_fmo());
        assert!(matches!(
            load_fmo(dir.path().join("missing.txt")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn wrong_dimension_rejected() {
        let six = matrix_text(|rows| {
            rows.truncate(6);
            for r in rows.iter_mut() {
                r.truncate(6);
            }
        });
        assert!(matches!(
            parse_fmo(&six, "six"),
            Err(Error::Dimension {
                expected: 7,
                found: 6
            })
        ));
        let short = matrix_text(|rows| rows.truncate(6));
        assert!(matches!(
            parse_fmo(&short, "short"),
            Err(Error::Dimension {
                expected: 7,
                found: 6
            })
        ));
    }

    #[test]
    fn nan_entry_names_row_and_column() {
        let text = matrix_text(|rows| rows[2][4] = "NaN".into());
        match parse_fmo(&text, "nan.txt") {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("row 3, column 5"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let text = matrix_text(|rows| rows[0][1] = "abc".into());
        assert!(matches!(parse_fmo(&text, "x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn asymmetry_and_energy_range_rejected() {
        let text = matrix_text(|rows| rows[0][1] = "-87.8".into());
        assert!(matches!(parse_fmo(&text, "x"), Err(Error::NotSymmetric(_))));
        let text = matrix_text(|rows| rows[3][3] = "320".into());
        assert!(matches!(parse_fmo(&text, "x"), Err(Error::Scenario(_))));
    }

    #[test]
    fn shift_is_global_phase_for_quantum_only() {
        let short = FmoScenario {
            t_max_fs: 500.0,
            samples: 251,
            ..FmoScenario::default()
        };
        let a = run_fmo(&short).unwrap();
        let b = run_fmo(&FmoScenario {
            energy_shift: -12_000.0,
            ..short.clone()
        })
        .unwrap();
        assert!(compare(&a.quantum, &b.quantum).unwrap().max_pop_dev < 1e-10);
        assert!(compare(&a.classical, &b.classical).unwrap().max_pop_dev > 1e-2);
        assert!(!a.breakdown.flagged);
        assert!(b.breakdown.flagged);
    }

    #[test]
    fn realistic_run_properties() {
        let run = run_fmo(&FmoScenario::default()).unwrap();
        assert!(run.reports["classical_vs_quantum"].max_pop_dev < 1e-2);
        assert!(run.peak(2).quantum > 5.0 * run.peak(3).quantum);
        assert_eq!(run.peaks.iter().filter(|p| p.plotted).count(), 3);
        for t in run.trajectories() {
            t.check_invariants().unwrap();
        }
    }

    #[test]
    fn rejects_bad_scenarios() {
        for sc in [
            FmoScenario {
                initial_site: 0,
                ..FmoScenario::default()
            },
            FmoScenario {
                initial_site: 8,
                ..FmoScenario::default()
            },
            FmoScenario {
                samples: 0,
                ..FmoScenario::default()
            },
        ] {
            assert!(matches!(run_fmo(&sc), Err(Error::Scenario(_))));
        }
        let sc = FmoScenario {
            energy_shift: -13_000.0,
            ..FmoScenario::default()
        };
        assert!(matches!(run_fmo(&sc), Err(Error::NegativeEnergy(_))));
    }
}
