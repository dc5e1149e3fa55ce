//! Time series of site populations produced by every propagator.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::TimeUnit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsKind {
    Quantum,
    Classical,
    Rca,
    Analytic,
}

impl DynamicsKind {
    pub fn name(self) -> &'static str {
        match self {
            DynamicsKind::Quantum => "quantum",
            DynamicsKind::Classical => "classical",
            DynamicsKind::Rca => "rca",
            DynamicsKind::Analytic => "analytic",
        }
    }
}

impl fmt::Display for DynamicsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub aggregate_hash: String,
    /// e.g. "spectral", "rk4 dt=0.001".
    pub integrator: String,
    /// max |V_nm| / min ε_n of the propagated aggregate.
    pub coupling_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: DynamicsKind,
    pub time_unit: TimeUnit,
    pub times: Vec<f64>,
    /// One row per time, one column per site.
    pub populations: Vec<Vec<f64>>,
    /// Raw complex amplitudes (c_n or z̃_n), unnormalized.
    pub amplitudes: Option<Vec<Vec<Complex64>>>,
    /// Σ|z̃_n|² per time for the oscillator dynamics.
    pub raw_norm: Option<Vec<f64>>,
    /// Probability outside the finite site grid (analytic infinite chain only).
    pub tail_mass: Option<Vec<f64>>,
    pub meta: TrajectoryMeta,
}

/// Populations |a_n|² / Σ|a_m|².
pub fn normalized_populations(amps: &[Complex64]) -> (Vec<f64>, f64) {
    let raw: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = raw.iter().sum();
    (raw.iter().map(|p| p / total).collect(), total)
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::UnsortedTimes);
    }
    Ok(())
}

impl Trajectory {
    pub fn n_sites(&self) -> usize {
        self.populations.first().map_or(0, |r| r.len())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.populations.iter().map(|row| row[site]).collect()
    }

    /// Populations divided by the initial Σ|z̃|² instead of the instantaneous one.
    pub fn populations_initial_norm(&self) -> Option<Vec<Vec<f64>>> {
        let amps = self.amplitudes.as_ref()?;
        let n0: f64 = amps.first()?.iter().map(|a| a.norm_sqr()).sum();
        Some(
            amps.iter()
                .map(|row| row.iter().map(|a| a.norm_sqr() / n0).collect())
                .collect(),
        )
    }

    /// Largest excursion of Σ|z̃|² from its initial value.
    pub fn raw_norm_fluctuation(&self) -> Option<f64> {
        let norms = self.raw_norm.as_ref()?;
        let n0 = *norms.first()?;
        Some(norms.iter().map(|n| (n - n0).abs()).fold(0.0, f64::max))
    }

    /// Checks the time-ordering and population invariants. Analytic rows are
    /// allowed to miss the mass that lies beyond the site grid.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.populations.len() != self.times.len() {
            return Err("populations and times differ in length".into());
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err("times are not monotone".into());
        }
        for (k, row) in self.populations.iter().enumerate() {
            let tail = self.tail_mass.as_ref().map_or(0.0, |t| t[k]);
            let sum: f64 = row.iter().sum::<f64>() + tail;
            if (sum - 1.0).abs() > 1e-9 {
                return Err(format!("row {k} sums to {sum}"));
            }
            if row.iter().any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p)) {
                return Err(format!("row {k} has population outside [0, 1]"));
            }
        }
        Ok(())
    }

    /// Wide CSV: time column then one column per site, 1-based names.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![self.time_unit.column_name().to_string()];
        header.extend((1..=self.n_sites()).map(|s| format!("site_{s}")));
        w.write_record(&header)?;
        for (t, row) in self.times.iter().zip(&self.populations) {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|p| p.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Time grid and populations read back from a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTable {
    pub time_unit: TimeUnit,
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
}

pub fn read_population_csv(path: impl AsRef<Path>) -> Result<PopulationTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_population_csv_from(file, path)
}

pub fn read_population_csv_from<R: std::io::Read>(
    input: R,
    path: &Path,
) -> Result<PopulationTable> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let time_unit = match headers.get(0) {
        Some("tau") => TimeUnit::Tau,
        Some("t_fs") => TimeUnit::Femtoseconds,
        other => {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                msg: format!("unknown time column {other:?}"),
            })
        }
    };
    let mut times = Vec::new();
    let mut populations = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                path: path.into(),
                line: k + 2,
                msg: format!("{s:?}: {e}"),
            })
        };
        times.push(parse(&rec[0])?);
        populations.push(rec.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?);
    }
    Ok(PopulationTable {
        time_unit,
        times,
        populations,
    })
}
