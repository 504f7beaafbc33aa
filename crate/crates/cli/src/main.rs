use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use ghspace::constructions::{glue, l2_product};
use ghspace::family::{sine_curve, Family, FamilyConfig, DEFAULT_PARAM_GRID};
use ghspace::gh::{gh_report, hausdorff, EXACT_CAP};
use ghspace::metric::{FiniteMetricSpace, Radius};
use ghspace::pointed::{check_rough_isometry, pgh_upper, PointedSpace, RoughViolation};
use ghspace::random::{random_rough_isometry, random_space, trial_rng};
use ghspace::spider::{build_spider, SpiderParams};
use ghspace::suites::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "ghspace", version, about = "Gromov–Hausdorff distances and spider families on finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a metric space as JSON.
    Gen {
        #[command(subcommand)]
        what: Gen,
        #[command(flatten)]
        out: Output,
    },
    /// Compute distances between spaces.
    Dist {
        #[command(subcommand)]
        what: Dist,
    },
    /// Run a randomized property suite and print its report.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest random space; defaults to the suite's own limit.
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Sweep the family over a parameter grid and write one CSV row per point.
    Sweep {
        /// Family configuration; the built-in two-anchor family when omitted.
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PARAM_GRID)]
        grid: usize,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Gen {
    /// A discretized spider with its point layout.
    Spider {
        /// Leg coordinates a_1,...,a_N.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// A sample of the n-th closed topologist's sine curve.
    Sine {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 128)]
        samples: usize,
    },
    /// The l2 product of two spaces.
    Product { x: PathBuf, y: PathBuf },
    /// Two spaces glued at one point each.
    Glue {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        px: String,
        #[arg(long)]
        py: String,
    },
    /// A random planar cloud or graph metric of 1 to `max-size` points.
    Random {
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A random certified rough isometry, usable with `dist pgh-bound`.
    Rough {
        #[arg(long, default_value_t = 10)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A family configuration to edit and pass to `sweep`.
    Config {
        /// Three anchors instead of two.
        #[arg(long)]
        three: bool,
    },
}

#[derive(Subcommand)]
enum Dist {
    /// GH bounds, exact when both spaces are small enough.
    Gh {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = EXACT_CAP)]
        cap: usize,
    },
    /// Hausdorff distance between two labeled subsets of one space.
    Hausdorff {
        z: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<String>,
    },
    /// Upper bound on the pointed GH distance from a rough isometry.
    PghBound {
        #[arg(long)]
        cert: PathBuf,
    },
}

/// A claimed rough isometry; any stored verdict is ignored and recomputed.
#[derive(Deserialize)]
struct CertFile {
    source: PointedSpace,
    target: PointedSpace,
    cert: CertClaim,
}

#[derive(Deserialize)]
struct CertClaim {
    map: Vec<Option<usize>>,
    radius: Radius,
    eps: f64,
}

#[derive(Serialize)]
struct BoundReport {
    bound: f64,
    distortion: f64,
    radius: Radius,
    eps: f64,
}

#[derive(Serialize)]
struct SweepSummary {
    k: usize,
    rows: usize,
    min_fingerprint_sep: f64,
    max_edge_bound: f64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Reads a bare space or a wrapper holding one under `space`, such as a spider.
fn read_space(path: &Path) -> Result<FiniteMetricSpace> {
    let mut value: serde_json::Value = read_json(path)?;
    if let Some(inner) = value.get_mut("space") {
        value = inner.take();
    }
    serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    emit(&serde_json::to_string_pretty(value)?, out)
}

fn print_compact<T: Serialize>(value: &T) -> Result<()> {
    emit(&serde_json::to_string(value)?, None)
}

fn generate(what: Gen, out: Option<&Path>) -> Result<()> {
    match what {
        Gen::Spider { a, grid, scale } => {
            let params = SpiderParams::new(a)?;
            emit_json(&build_spider(&params, grid, scale)?, out)
        }
        Gen::Sine { n, samples } => emit_json(&sine_curve(n, samples)?, out),
        Gen::Product { x, y } => {
            let (x, y) = (read_space(&x)?, read_space(&y)?);
            emit_json(&l2_product(&x, &y)?, out)
        }
        Gen::Glue { x, y, px, py } => {
            let (x, y) = (read_space(&x)?, read_space(&y)?);
            emit_json(&glue(&x, &y, &px, &py)?, out)
        }
        Gen::Random { max_size, seed } => emit_json(&random_space(&mut trial_rng(seed, 0), max_size)?, out),
        Gen::Rough { max_size, seed } => emit_json(&random_rough_isometry(&mut trial_rng(seed, 0), max_size)?, out),
        Gen::Config { three } => {
            emit_json(&if three { FamilyConfig::three_anchors() } else { FamilyConfig::default() }, out)
        }
    }
}

fn distance(what: Dist) -> Result<()> {
    match what {
        Dist::Gh { x, y, cap } => {
            let (x, y) = (read_space(&x)?, read_space(&y)?);
            print_compact(&gh_report(&x, &y, cap)?)
        }
        Dist::Hausdorff { z, a, b } => {
            let z = read_space(&z)?;
            let index = |labels: &[String]| labels.iter().map(|l| z.index_of(l)).collect::<ghspace::Result<Vec<_>>>();
            let value = hausdorff(&index(&a)?, &index(&b)?, &z)?;
            print_compact(&serde_json::json!({ "hausdorff": value }))
        }
        Dist::PghBound { cert } => {
            let file: CertFile = read_json(&cert)?;
            let c = &file.cert;
            let source = PointedSpace::new(file.source.space, file.source.base)?;
            let target = PointedSpace::new(file.target.space, file.target.base)?;
            let checked = check_rough_isometry(&c.map, &source, &target, c.radius, c.eps)?;
            if !checked.verdict {
                let failed: Vec<String> = checked.violations.iter().map(describe).collect();
                bail!("map is not a rough isometry: {}", failed.join("; "));
            }
            let report =
                BoundReport { bound: pgh_upper(&checked)?, distortion: checked.distortion, radius: c.radius, eps: c.eps };
            print_compact(&report)
        }
    }
}

fn describe(v: &RoughViolation) -> String {
    serde_json::to_string(v).unwrap_or_else(|_| format!("{v:?}"))
}

fn sweep(config: Option<PathBuf>, grid: usize, out: Option<PathBuf>) -> Result<()> {
    let config = match config {
        Some(p) => read_json(&p)?,
        None => FamilyConfig::default(),
    };
    let family = Family::new(config)?;
    let report = family.sweep(grid)?;
    let summary = SweepSummary {
        k: report.k,
        rows: report.rows.len(),
        min_fingerprint_sep: report.min_fingerprint_sep,
        max_edge_bound: report.max_edge_bound,
    };
    match out {
        Some(p) => {
            emit(&report.to_csv(), Some(&p))?;
            emit_json(&summary, None)
        }
        None => {
            eprintln!("{}", serde_json::to_string(&summary)?);
            emit(&report.to_csv(), None)
        }
    }
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Gen { what, out } => generate(what, out.out.as_deref())?,
        Command::Dist { what } => distance(what)?,
        Command::Verify { suite, trials, seed, max_size } => {
            let report = run_suite(suite, trials, seed, max_size.unwrap_or_else(|| suite.default_max_size()));
            emit_json(&report, None)?;
            if !report.ok() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Sweep { config, grid, out } => sweep(config, grid, out)?,
    }
    Ok(ExitCode::SUCCESS)
}
