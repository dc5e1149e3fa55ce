//! `dipole-eet` command line: `chain`, `fmo` and `sweep`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
//! Data files carry no timestamps; run metadata goes to `run.json`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rca::{DeviationReport, SecondOrderTerms};
use crate::scenarios::fmo::{MonomerPeak, RcaBreakdown};
use crate::scenarios::{run_chain, run_fmo, ChainScenario, FmoScenario, Reports};
use crate::trajectory::Trajectory;

pub const OUT_DIR_ENV: &str = "DIPOLE_EET_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dipole-eet",
    version,
    about = "Quantum vs classical excitation transfer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Homogeneous nearest-neighbour chain, centre start, time in τ = 2Vt.
    Chain(ChainArgs),
    /// Seven-site FMO complex, time in fs.
    Fmo(FmoArgs),
    /// Classical-vs-quantum deviation over a grid of V/ε.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output directory [default: $DIPOLE_EET_OUT_DIR or ./out]
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArg {
    fn dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long, default_value_t = 19)]
    sites: usize,
    /// Ratio V/ε, decimal or fraction such as 1/40.
    #[arg(long, default_value = "1/40", value_parser = parse_ratio)]
    v_over_eps: f64,
    /// Site energy ε in cm⁻¹.
    #[arg(long, default_value_t = 12_000.0)]
    site_energy: f64,
    /// 0-based start site [default: centre]
    #[arg(long)]
    origin: Option<usize>,
    #[arg(long, default_value_t = 8.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct FmoArgs {
    /// 7×7 site Hamiltonian in cm⁻¹ [default: bundled matrix]
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    /// 1-based initially excited monomer.
    #[arg(long, default_value_t = 1)]
    init: usize,
    /// Duration in fs.
    #[arg(long, default_value_t = 1000.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Constant added to every site energy, cm⁻¹.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated V/ε values [default: 10 log-spaced points from 1/160 to 1/2]
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 19)]
    sites: usize,
    #[arg(long, default_value_t = 8.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[command(flatten)]
    out: OutArg,
}

/// Accepts `0.025` or `1/40`.
pub fn parse_ratio(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("invalid ratio '{s}'"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("invalid ratio '{s}'"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("invalid ratio '{s}'"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("invalid ratio '{s}'"))
    }
}

pub fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let grid = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_ratio)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

/// `n` log-spaced points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn default_sweep_grid() -> Vec<f64> {
    log_grid(1.0 / 160.0, 0.5, 10)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReportFile {
    pub scenario: ChainScenario,
    pub aggregate_hash: String,
    pub reports: Reports,
    pub second_order: SecondOrderTerms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmoReportFile {
    pub scenario: FmoScenario,
    pub aggregate_hash: String,
    pub site_energies: Vec<f64>,
    pub reports: Reports,
    pub peaks: Vec<MonomerPeak>,
    pub rca_breakdown: RcaBreakdown,
}

/// One `sweep.csv` row; deviation fields are empty for unstable points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub v_over_eps: f64,
    pub status: String,
    pub max_pop_dev: Option<f64>,
    pub mean_pop_dev: Option<f64>,
    pub max_coherence_dev: Option<f64>,
    pub rca_max_pop_dev: Option<f64>,
    pub coupling_ratio: Option<f64>,
}

impl SweepRow {
    fn stable(v_over_eps: f64, cq: &DeviationReport, rq: &DeviationReport) -> Self {
        Self {
            v_over_eps,
            status: "ok".into(),
            max_pop_dev: Some(cq.max_pop_dev),
            mean_pop_dev: Some(cq.mean_pop_dev),
            max_coherence_dev: cq.max_coherence_dev,
            rca_max_pop_dev: Some(rq.max_pop_dev),
            coupling_ratio: cq.coupling_ratio,
        }
    }

    fn unstable(v_over_eps: f64) -> Self {
        Self {
            v_over_eps,
            status: "unstable".into(),
            max_pop_dev: None,
            mean_pop_dev: None,
            max_coherence_dev: None,
            rca_max_pop_dev: None,
            coupling_ratio: None,
        }
    }
}

/// Whether max_pop_dev strictly increases with V/ε over the stable rows.
pub fn sweep_is_monotone(rows: &[SweepRow]) -> bool {
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.max_pop_dev.map(|d| (r.v_over_eps, d)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).all(|w| w[1].1 > w[0].1)
}

#[derive(Serialize)]
struct RunSidecar<'a> {
    command: &'a str,
    args: Vec<String>,
    version: &'a str,
    files: Vec<String>,
    unix_time: u64,
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(&target, e))?;
    tmp.persist(&target)
        .map_err(|e| Error::io(&target, e.error))?;
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_bytes(t: &Trajectory) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf)?;
    Ok(buf)
}

struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir, name, bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn finish(self, command: &str, args: &[OsString]) -> Result<()> {
        let unix_time = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let sidecar = RunSidecar {
            command,
            args: args
                .iter()
                .map(|a| a.to_string_lossy().into_owned())
                .collect(),
            version: env!("CARGO_PKG_VERSION"),
            files: self.files.clone(),
            unix_time,
        };
        write_atomic(&self.dir, "run.json", &json_bytes(&sidecar)?)
    }
}

fn summarize_report(out: &mut dyn Write, name: &str, r: &DeviationReport) -> std::io::Result<()> {
    write!(
        out,
        "  {name:<22} max {:.3e}  mean {:.3e}",
        r.max_pop_dev, r.mean_pop_dev
    )?;
    if let Some(c) = r.max_coherence_dev {
        write!(out, "  coherence {c:.3e}")?;
    }
    writeln!(out)
}

fn cmd_chain(a: &ChainArgs, argv: &[OsString], out: &mut dyn Write) -> Result<()> {
    let sc = ChainScenario {
        n_sites: a.sites,
        v_over_eps: a.v_over_eps,
        site_energy: a.site_energy,
        origin: a.origin,
        tau_max: a.tau_max,
        samples: a.samples,
    };
    let run = run_chain(&sc)?;
    let mut o = Output::new(a.out.dir())?;
    for t in run.trajectories() {
        o.write(&format!("{}.csv", t.kind), &csv_bytes(t)?)?;
    }
    let report = ChainReportFile {
        scenario: sc.clone(),
        aggregate_hash: run.quantum.meta.aggregate_hash.clone(),
        reports: run.reports.clone(),
        second_order: run.second_order,
    };
    o.write("report.json", &json_bytes(&report)?)?;
    let dir = o.dir.clone();
    o.finish("chain", argv)?;

    let w = |e| Error::io("<stdout>", e);
    writeln!(
        out,
        "chain: {} sites, V/eps = {}, origin {}, tau in [0, {}] ({} samples)",
        sc.n_sites,
        sc.v_over_eps,
        sc.origin(),
        sc.tau_max,
        sc.samples
    )
    .map_err(w)?;
    for (name, r) in &run.reports {
        summarize_report(out, name, r).map_err(w)?;
    }
    writeln!(
        out,
        "  quadratic/leading second-order term ratio {:.3e}",
        run.second_order.quadratic_ratio()
    )
    .map_err(w)?;
    writeln!(out, "wrote {}", dir.display()).map_err(w)?;
    Ok(())
}

fn cmd_fmo(a: &FmoArgs, argv: &[OsString], out: &mut dyn Write) -> Result<()> {
    let sc = FmoScenario {
        hamiltonian_file: a.hamiltonian.clone(),
        initial_site: a.init,
        t_max_fs: a.t_max,
        samples: a.samples,
        energy_shift: a.shift,
    };
    let run = run_fmo(&sc)?;
    let mut o = Output::new(a.out.dir())?;
    for t in run.trajectories() {
        o.write(&format!("{}.csv", t.kind), &csv_bytes(t)?)?;
    }
    let report = FmoReportFile {
        scenario: sc.clone(),
        aggregate_hash: run.spec.content_hash(),
        site_energies: run.spec.site_energies.clone(),
        reports: run.reports.clone(),
        peaks: run.peaks.clone(),
        rca_breakdown: run.breakdown,
    };
    o.write("report.json", &json_bytes(&report)?)?;
    let dir = o.dir.clone();
    o.finish("fmo", argv)?;

    let w = |e| Error::io("<stdout>", e);
    writeln!(
        out,
        "fmo: start monomer {}, shift {} cm^-1, t in [0, {}] fs ({} samples)",
        sc.initial_site, sc.energy_shift, sc.t_max_fs, sc.samples
    )
    .map_err(w)?;
    for (name, r) in &run.reports {
        summarize_report(out, name, r).map_err(w)?;
    }
    writeln!(out, "  peak populations (* = plotted monomer):").map_err(w)?;
    for p in &run.peaks {
        writeln!(
            out,
            "  {} monomer {}  quantum {:.4}  classical {:.4}  rca {:.4}",
            if p.plotted { '*' } else { ' ' },
            p.monomer,
            p.quantum,
            p.classical,
            p.rca
        )
        .map_err(w)?;
    }
    let b = &run.breakdown;
    writeln!(
        out,
        "  RCA breakdown: {} (coupling ratio {:.3e}, energy spread {:.3e})",
        if b.flagged { "YES" } else { "no" },
        b.coupling_ratio,
        b.energy_spread
    )
    .map_err(w)?;
    writeln!(out, "wrote {}", dir.display()).map_err(w)?;
    Ok(())
}

/// One sweep point; instability becomes a row rather than an error.
pub fn sweep_point(base: &ChainScenario, v_over_eps: f64) -> Result<SweepRow> {
    let sc = ChainScenario {
        v_over_eps,
        ..base.clone()
    };
    match run_chain(&sc) {
        Ok(run) => Ok(SweepRow::stable(
            v_over_eps,
            &run.reports["classical_vs_quantum"],
            &run.reports["rca_vs_quantum"],
        )),
        Err(Error::UnstableMode { .. }) => Ok(SweepRow::unstable(v_over_eps)),
        Err(e) => Err(e),
    }
}

fn cmd_sweep(a: &SweepArgs, argv: &[OsString], out: &mut dyn Write) -> Result<()> {
    let grid = match &a.grid {
        Some(s) => parse_grid(s).map_err(|m| Error::Scenario(format!("--grid: {m}")))?,
        None => default_sweep_grid(),
    };
    let base = ChainScenario {
        n_sites: a.sites,
        tau_max: a.tau_max,
        samples: a.samples,
        ..ChainScenario::default()
    };
    for &r in &grid {
        ChainScenario {
            v_over_eps: r,
            ..base.clone()
        }
        .validate()?;
    }
    let rows = grid
        .par_iter()
        .map(|&r| sweep_point(&base, r))
        .collect::<Result<Vec<_>>>()?;

    let mut o = Output::new(a.out.dir())?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("sweep.csv", e.into_error()))?;
    o.write("sweep.csv", &bytes)?;
    let dir = o.dir.clone();
    o.finish("sweep", argv)?;

    let io = |e| Error::io("<stdout>", e);
    writeln!(
        out,
        "sweep: {} points, {} sites, tau in [0, {}]",
        rows.len(),
        base.n_sites,
        base.tau_max
    )
    .map_err(io)?;
    for row in &rows {
        match row.max_pop_dev {
            Some(d) => writeln!(out, "  V/eps {:<12.6} max_pop_dev {d:.3e}", row.v_over_eps),
            None => writeln!(
                out,
                "  V/eps {:<12.6} unstable classical mode",
                row.v_over_eps
            ),
        }
        .map_err(io)?;
    }
    writeln!(
        out,
        "  monotone increasing over stable points: {}",
        if sweep_is_monotone(&rows) {
            "yes"
        } else {
            "NO"
        }
    )
    .map_err(io)?;
    writeln!(out, "wrote {}", dir.display()).map_err(io)?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command. Errors go
/// to stderr; the return value is the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = e.print();
                    EXIT_USAGE
                }
            };
        }
    };
    let rest = argv.get(1..).unwrap_or(&[]);
    let result = match &cli.command {
        Command::Chain(a) => cmd_chain(a, rest, out),
        Command::Fmo(a) => cmd_fmo(a, rest, out),
        Command::Sweep(a) => cmd_sweep(a, rest, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}
