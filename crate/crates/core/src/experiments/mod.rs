//! Command-line experiments: each command validates its parameters, computes
//! a table, checks named invariants and writes CSV, JSON and SVG files.

mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::{Error, Result};

pub use commands::{
    counterexamples, dimension_demo, ratio_scan, rhombus_sweep, run_command, table_mu1, weyl, DEFAULT_SECTOR_ANGLES,
};
pub use config::{expand_config, parse_config_text};
pub use report::{render_svg, Cell, Metadata, Plot, Report, Series, Verdict};

pub const THREADS_ENV: &str = "SPECLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PairShape {
    /// Inner polygon is the hull of random points of the outer one.
    Hull,
    /// Inner polygon is a thin strip along a random chord.
    Strip,
    /// Even pairs hull, odd pairs strip.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Subcommand)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Grid of every closed-form bound plus the constants invariant suite.
    Constants {
        #[arg(long = "k_max", alias = "k-max", default_value_t = 3)]
        k_max: usize,
        #[arg(long = "d_max", alias = "d-max", default_value_t = 10)]
        d_max: usize,
    },
    /// First nonzero Neumann eigenvalue of the diameter-2 comparison domains.
    TableMu1 {
        #[arg(long, default_value_t = 2)]
        refinements: usize,
        /// Boundary chords per curved arc.
        #[arg(long = "n_arc", alias = "n-arc", default_value_t = 64)]
        n_arc: usize,
        /// Vertices of the polygon standing in for the disk.
        #[arg(long = "disk_vertices", alias = "disk-vertices", default_value_t = 256)]
        disk_vertices: usize,
        /// Sector openings in radians.
        #[arg(long = "sector_angles", alias = "sector-angles", value_delimiter = ',', default_value = DEFAULT_SECTOR_ANGLES)]
        sector_angles: Vec<f64>,
        /// Rhombus half-angles (degrees) for the trend toward j₀₁².
        #[arg(long = "theta_list", alias = "theta-list", value_delimiter = ',', default_value = "20,10,5")]
        theta_list: Vec<f64>,
    },
    /// Neumann μ₁ of thin rhombi and the antisymmetric mode of their halves.
    RhombusSweep {
        /// Half-angles in degrees.
        #[arg(long = "theta_list", alias = "theta-list", value_delimiter = ',', default_value = "45,20,10,5")]
        theta_list: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        refinements: usize,
    },
    /// μ₁(Ω₁)/μ₁(Ω₂) over random nested convex polygons.
    RatioScan {
        #[arg(long = "n_pairs", alias = "n-pairs", default_value_t = 200)]
        n_pairs: usize,
        #[arg(long, default_value_t = 1)]
        refinements: usize,
        #[arg(long = "n_outer", alias = "n-outer", default_value_t = 12)]
        n_outer: usize,
        #[arg(long = "n_inner", alias = "n-inner", default_value_t = 6)]
        n_inner: usize,
        #[arg(long, value_enum, default_value_t = PairShape::Mixed)]
        shape: PairShape,
        /// Use the outer polygon as the inner one too (ratio 1 check).
        #[arg(long, default_value_t = false, num_args = 0..=1, default_missing_value = "true")]
        identical: bool,
    },
    /// Rectangle eigenvalue ratios against the Weyl limit.
    Weyl {
        #[arg(long = "k_list", alias = "k-list", value_delimiter = ',', default_value = "1000,10000,100000")]
        k_list: Vec<u64>,
        /// Inner rectangle, `AxB`.
        #[arg(long, default_value = "1x1")]
        rect1: String,
        /// Outer rectangle, `AxB`.
        #[arg(long, default_value = "2x1.3")]
        rect2: String,
    },
    /// Ratio preservation under products with a short interval.
    DimensionDemo {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long = "ell_list", alias = "ell-list", value_delimiter = ',', default_value = "0.1,0.5,0.9,1.5,3,10,1000")]
        ell_list: Vec<f64>,
        /// Inner box sides, `AxBx…`.
        #[arg(long, default_value = "1")]
        inner: String,
        /// Outer box sides.
        #[arg(long, default_value = "2")]
        outer: String,
    },
    /// The two closed-form monotonicity counterexamples.
    Counterexamples,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants { .. } => "constants",
            Command::TableMu1 { .. } => "table-mu1",
            Command::RhombusSweep { .. } => "rhombus-sweep",
            Command::RatioScan { .. } => "ratio-scan",
            Command::Weyl { .. } => "weyl",
            Command::DimensionDemo { .. } => "dimension-demo",
            Command::Counterexamples => "counterexamples",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "speclab", version, about = "Neumann eigenvalue monotonicity experiments", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// File of `key=value` lines; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub out: PathBuf,
}

fn parse_box(s: &str) -> Result<Vec<f64>> {
    let sides: Vec<f64> = s
        .split(['x', 'X'])
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad box side '{t}' in '{s}'"))))
        .collect::<Result<_>>()?;
    if sides.is_empty() || sides.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Config(format!("box '{s}' needs positive finite sides")));
    }
    Ok(sides)
}

pub(crate) fn boxes(inner: &str, outer: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = (parse_box(inner)?, parse_box(outer)?);
    if a.len() != b.len() {
        return Err(Error::Config(format!("'{inner}' and '{outer}' differ in dimension")));
    }
    if a.iter().zip(&b).any(|(x, y)| x > y) {
        return Err(Error::Config(format!("'{inner}' is not contained in '{outer}' componentwise")));
    }
    Ok((a, b))
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

impl ExperimentConfig {
    /// Every parameter is checked here, before any computation starts.
    pub fn validate(command: Command, seed: u64, out: Option<PathBuf>) -> Result<Self> {
        let out = out.ok_or_else(|| Error::Config("--out <dir> is required".into()))?;
        match &command {
            Command::Constants { k_max, d_max } => {
                check((1..=1000).contains(k_max), || format!("k_max {k_max} outside [1, 1000]"))?;
                check((2..=crate::constants::MAX_DIMENSION).contains(d_max), || format!("d_max {d_max} outside [2, 120]"))?;
            }
            Command::TableMu1 { refinements, n_arc, disk_vertices, sector_angles, theta_list } => {
                check(*refinements <= 4, || format!("refinements {refinements} above 4"))?;
                check(*n_arc >= 8, || format!("n_arc {n_arc} below 8"))?;
                check(*disk_vertices >= 8 && disk_vertices % 2 == 0, || {
                    format!("disk_vertices {disk_vertices} must be even and >= 8")
                })?;
                check(!sector_angles.is_empty(), || "sector_angles is empty".into())?;
                for a in sector_angles {
                    // Below π/3 the diameter is the radius, not the chord.
                    check(*a > std::f64::consts::FRAC_PI_3 && *a < std::f64::consts::PI, || {
                        format!("sector angle {a} outside (π/3, π)")
                    })?;
                }
                check_thetas(theta_list)?;
            }
            Command::RhombusSweep { theta_list, refinements } => {
                check(*refinements <= 4, || format!("refinements {refinements} above 4"))?;
                check_thetas(theta_list)?;
            }
            Command::RatioScan { n_pairs, refinements, n_outer, n_inner, .. } => {
                check((1..=1000).contains(n_pairs), || format!("n_pairs {n_pairs} outside [1, 1000]"))?;
                check(*refinements <= 3, || format!("refinements {refinements} above 3"))?;
                check((3..=1000).contains(n_outer), || format!("n_outer {n_outer} outside [3, 1000]"))?;
                check((3..=1000).contains(n_inner), || format!("n_inner {n_inner} outside [3, 1000]"))?;
            }
            Command::Weyl { k_list, rect1, rect2 } => {
                check(!k_list.is_empty(), || "k_list is empty".into())?;
                for k in k_list {
                    check((1..=crate::analytic_spectra::MAX_RECTANGLE_INDEX).contains(k), || {
                        format!("k {k} outside [1, 10^7]")
                    })?;
                }
                let (a, b) = boxes(rect1, rect2)?;
                check(a.len() == 2, || format!("'{rect1}' is not a rectangle"))?;
                check(b.len() == 2, || format!("'{rect2}' is not a rectangle"))?;
            }
            Command::DimensionDemo { k, ell_list, inner, outer } => {
                check((1..=1000).contains(k), || format!("k {k} outside [1, 1000]"))?;
                check(!ell_list.is_empty(), || "ell_list is empty".into())?;
                for l in ell_list {
                    check(l.is_finite() && *l > 0.0, || format!("ell {l} must be positive"))?;
                }
                let (a, _) = boxes(inner, outer)?;
                check(a.len() <= 3, || "boxes of dimension above 3 are not supported here".into())?;
            }
            Command::Counterexamples => {}
        }
        Ok(Self { command, seed, out })
    }
}

fn check_thetas(list: &[f64]) -> Result<()> {
    check(!list.is_empty(), || "theta_list is empty".into())?;
    for t in list {
        check(*t > 2.0 && *t <= 45.0, || format!("theta {t} deg outside (2, 45]"))?;
    }
    Ok(())
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV}='{s}' is not a positive integer"))),
        },
    }
}

/// Runs a validated experiment, honouring SPECLAB_THREADS, and returns the
/// report with its metadata.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Report, Metadata)> {
    let threads = thread_count()?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?
    };
    let start = Instant::now();
    let report = pool.install(|| run_command(&cfg.command, cfg.seed))?;
    let meta = Metadata {
        tool: "speclab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.command.name().into(),
        params: serde_json::to_value(&cfg.command).expect("command serializes"),
        seed: cfg.seed,
        threads: pool.current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((report, meta))
}

/// Entry point for the binary. Exit code 0 iff every verdict passes, 1 when
/// some verdict fails, 2 on usage or runtime errors.
pub fn cli_main<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let args: Vec<OsString> = args.into_iter().collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("speclab: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = ExperimentConfig::validate(cli.command, cli.seed, cli.out).and_then(|cfg| {
        let (report, meta) = execute(&cfg)?;
        report.write(&cfg.out, &meta)?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            for v in &report.verdicts {
                println!("{} {} (measured {}, bound {})", if v.pass { "PASS" } else { "FAIL" }, v.name, v.measured, v.bound);
            }
            i32::from(!report.all_pass())
        }
        Err(e) => {
            eprintln!("speclab: {e}");
            2
        }
    }
}
