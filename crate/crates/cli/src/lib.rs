//! Command implementations behind the `modeforest` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use modeforest::experiments::{experiment, CriterionReport, SuiteConfig, EXPERIMENTS};
use modeforest::report::{ForestReport, QueryModes, TreeReport};
use modeforest::synthetic::{catalog_density, CATALOG};
use modeforest::{
    build_forest, kde_self_evaluate, modal_regression_batch, recommended_bandwidth, tau_schedule,
    verify, ClusterTree, DensityModel, KernelShape, PointSet,
};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

impl From<modeforest::Error> for CliError {
    fn from(e: modeforest::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "modeforest",
    version,
    about = "Quick Shift mode seeking, cluster trees and modal regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Quick Shift forest and report modes and cluster assignments.
    Quickshift(QuickshiftArgs),
    /// Build the level-set cluster tree.
    Tree(TreeArgs),
    /// Estimate conditional modes of the last column given the others.
    Modalreg(ModalregArgs),
    /// Run the statistical acceptance experiments.
    Bench(BenchArgs),
    /// Draw a CSV sample from a catalog density.
    Sample(SampleArgs),
    /// List catalog densities.
    Catalog,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Comma-separated numeric data, one point per row.
    pub input: PathBuf,
    /// Treat the first row as a header.
    #[arg(long)]
    pub header: bool,
    /// Kernel bandwidth [default: n^(-1/(4+d))].
    #[arg(long = "h")]
    pub bandwidth: Option<f64>,
    /// Kernel profile.
    #[arg(long, default_value = "gaussian")]
    pub kernel: String,
    /// Write JSON here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuickshiftArgs {
    #[command(flatten)]
    pub common: InputArgs,
    /// Maximum edge length, or "inf" [default: max(n^(-1/(4+d)), (ln(n)^2/n)^(1/d))].
    #[arg(long)]
    pub tau: Option<String>,
    /// Single-column CSV of densities to use instead of the KDE.
    #[arg(long)]
    pub density_file: Option<PathBuf>,
    /// Cross-check the result against brute-force references.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[command(flatten)]
    pub common: InputArgs,
    /// Linking radius, or "inf" [default: as for quickshift].
    #[arg(long)]
    pub tau: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModalregArgs {
    #[command(flatten)]
    pub common: InputArgs,
    /// CSV of query points, one per row, one column fewer than the data.
    #[arg(long)]
    pub query_file: PathBuf,
    /// Maximum edge length along the response [default: as for quickshift in one dimension].
    #[arg(long)]
    pub tau: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// "all", "determinism", or one experiment name.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    #[arg(long, default_value_t = 1)]
    pub base_seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Catalog density name.
    pub name: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one command and returns what it would print.
pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Quickshift(a) => cmd_quickshift(&a),
        Command::Tree(a) => cmd_tree(&a),
        Command::Modalreg(a) => cmd_modalreg(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Catalog => Ok(catalog_listing()),
    }
}

/// Writes `text` to `out`, or returns it for standard output.
pub fn deliver(text: String, out: Option<&Path>) -> CliResult<String> {
    match out {
        Some(path) => {
            fs::write(path, text)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string(value).map_err(|e| CliError::Invariant(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parses a CSV file of finite numbers with a fixed column count.
pub fn read_points(path: &Path, header: bool) -> CliResult<PointSet> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_points(&text, header).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_points(text: &str, header: bool) -> Result<PointSet, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.position() {
            Some(p) => format!("line {}: {e}", p.line()),
            None => e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(record.len());
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| format!("line {line}: cannot parse {field:?} as a number"))?;
            if !v.is_finite() {
                return Err(format!("line {line}: non-finite value {field:?}"));
            }
            row.push(v);
        }
        if row.is_empty() {
            return Err(format!("line {line}: empty row"));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    PointSet::from_rows(&rows).map_err(|e| e.to_string())
}

fn parse_radius(value: Option<&str>, default: impl FnOnce() -> CliResult<f64>) -> CliResult<f64> {
    let tau = match value {
        None => default()?,
        Some(s) if s.eq_ignore_ascii_case("inf") => f64::INFINITY,
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Input(format!("cannot parse tau {s:?}")))?,
    };
    if tau > 0.0 {
        Ok(tau)
    } else {
        Err(CliError::Input(format!("tau must be positive, got {tau}")))
    }
}

fn model_for(args: &InputArgs, n: usize, dim: usize) -> CliResult<DensityModel> {
    let shape: KernelShape = args.kernel.parse()?;
    let h = match args.bandwidth {
        Some(h) => h,
        None => recommended_bandwidth(n, dim, 1.0)?,
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(CliError::Input(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    Ok(DensityModel::new(shape, h, dim)?)
}

pub fn cmd_quickshift(args: &QuickshiftArgs) -> CliResult<String> {
    let x = read_points(&args.common.input, args.common.header)?;
    let report = quickshift_report(&x, args)?;
    deliver(to_json(&report)?, args.common.out.as_deref())
}

/// The forest report for `x`; shared with the determinism check.
pub fn quickshift_report(x: &PointSet, args: &QuickshiftArgs) -> CliResult<ForestReport> {
    let (n, d) = (x.len(), x.dim());
    let tau = parse_radius(args.tau.as_deref(), || Ok(tau_schedule(n, d, 1.0)?))?;
    let (density, h, kernel, model) = match &args.density_file {
        Some(path) => {
            let column = read_points(path, false)?;
            if column.dim() != 1 || column.len() != n {
                return Err(CliError::Input(format!(
                    "density file must hold one value per sample ({n}), found {} rows of {} columns",
                    column.len(),
                    column.dim()
                )));
            }
            (column.as_slice().to_vec(), None, None, None)
        }
        None => {
            let model = model_for(&args.common, n, d)?;
            let density = kde_self_evaluate(&model, x)?;
            (
                density,
                Some(model.bandwidth()),
                Some(model.kernel().shape().name().to_string()),
                Some(model),
            )
        }
    };
    let forest = build_forest(x, &density, tau)?;
    if args.verify {
        let mut problems = verify::check_forest(&forest, x);
        if let Some(model) = &model {
            let reference = verify::naive_kde(model, x, x)?;
            if let Some(i) = (0..n).find(|&i| (reference[i] - density[i]).abs() > 1e-12) {
                problems.push(format!("KDE at sample {i} disagrees with the direct sum"));
            }
        }
        if !problems.is_empty() {
            return Err(CliError::Invariant(problems.join("; ")));
        }
    }
    Ok(ForestReport::new(&forest, d, h, kernel))
}

pub fn cmd_tree(args: &TreeArgs) -> CliResult<String> {
    let x = read_points(&args.common.input, args.common.header)?;
    let (n, d) = (x.len(), x.dim());
    let tau = parse_radius(args.tau.as_deref(), || Ok(tau_schedule(n, d, 1.0)?))?;
    let model = model_for(&args.common, n, d)?;
    let density = kde_self_evaluate(&model, &x)?;
    let forest = build_forest(&x, &density, tau)?;
    let tree = ClusterTree::from_forest(&forest, &x)?;
    deliver(
        to_json(&TreeReport::new(&tree))?,
        args.common.out.as_deref(),
    )
}

pub fn cmd_modalreg(args: &ModalregArgs) -> CliResult<String> {
    let data = read_points(&args.common.input, args.common.header)?;
    let queries = read_points(&args.query_file, args.common.header)?;
    let (n, d) = (data.len(), data.dim());
    if queries.dim() + 1 != d {
        return Err(CliError::Input(format!(
            "queries have {} columns but the data has {d} (expected {})",
            queries.dim(),
            d.saturating_sub(1)
        )));
    }
    let tau = parse_radius(args.tau.as_deref(), || Ok(tau_schedule(n, 1, 1.0)?))?;
    let model = model_for(&args.common, n, d)?;
    let rows: Vec<Vec<f64>> = queries.rows().map(<[f64]>::to_vec).collect();
    let results = modal_regression_batch(&data, &model, tau, &rows)?;
    let out: Vec<QueryModes> = results.iter().map(QueryModes::from).collect();
    deliver(to_json(&out)?, args.common.out.as_deref())
}

pub fn cmd_sample(args: &SampleArgs) -> CliResult<String> {
    let density = catalog_density(&args.name)
        .ok_or_else(|| CliError::Input(format!("unknown catalog density {:?}", args.name)))?;
    if args.n == 0 {
        return Err(CliError::Input("n must be at least 1".into()));
    }
    let x = density.sample(args.n, args.seed);
    let mut text = String::new();
    for row in x.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    deliver(text, args.out.as_deref())
}

fn catalog_listing() -> String {
    let mut text = String::new();
    for entry in CATALOG {
        text.push_str(&format!("{}\t{}\n", entry.name, entry.description));
    }
    text
}

pub const DETERMINISM_SUITE: &str = "determinism";

pub fn cmd_bench(args: &BenchArgs) -> CliResult<String> {
    if args.seeds == 0 {
        return Err(CliError::Input("--seeds must be at least 1".into()));
    }
    let config = SuiteConfig {
        seeds: args.seeds,
        base_seed: args.base_seed,
    };
    let selected: Vec<&str> = match args.suite.as_str() {
        "all" => EXPERIMENTS
            .iter()
            .map(|e| e.name)
            .chain([DETERMINISM_SUITE])
            .collect(),
        DETERMINISM_SUITE => vec![DETERMINISM_SUITE],
        name if experiment(name).is_some() => vec![name],
        other => return Err(CliError::Input(format!("unknown suite {other:?}"))),
    };
    let mut reports = Vec::new();
    for name in selected {
        let report = match experiment(name) {
            Some(e) => e.run(&config)?,
            None => determinism_check()?,
        };
        eprintln!(
            "[{}] {} {}: {}",
            if report.passed { "PASS" } else { "FAIL" },
            report.id,
            report.name,
            report.summary
        );
        reports.push(report);
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let doc = json!({ "seeds": args.seeds, "base_seed": args.base_seed, "all_passed": all_passed, "criteria": reports });
    deliver(to_json(&doc)?, args.out.as_deref())
}

/// Runs the quickshift command on a fixed catalog sample twice with one
/// thread and once with four, comparing the JSON bytes.
pub fn determinism_check() -> CliResult<CriterionReport> {
    let start = std::time::Instant::now();
    let x = catalog_density("two-gaussian-10sep")
        .expect("catalog entry exists")
        .sample(400, 7);
    let args = QuickshiftArgs {
        common: InputArgs {
            input: PathBuf::new(),
            header: false,
            bandwidth: None,
            kernel: "gaussian".into(),
            out: None,
        },
        tau: Some("1".into()),
        density_file: None,
        verify: false,
    };
    let render = |threads: usize| -> CliResult<String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Invariant(e.to_string()))?;
        pool.install(|| to_json(&quickshift_report(&x, &args)?))
    };
    let first = render(1)?;
    let second = render(1)?;
    let parallel = render(4)?;
    let passed = first == second && first == parallel;
    let summary = format!(
        "repeat run identical: {}; 1 vs 4 threads identical: {}",
        first == second,
        first == parallel
    );
    Ok(CriterionReport {
        id: 9,
        name: DETERMINISM_SUITE,
        passed,
        summary,
        metrics: json!({ "bytes": first.len() }),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Applies `MODEFOREST_THREADS` to the global thread pool (unset or 0 leaves
/// the default).
pub fn configure_threads(value: Option<&str>) -> CliResult<()> {
    let Some(raw) = value else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("MODEFOREST_THREADS must be a count, got {raw:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Invariant(e.to_string()))?;
    }
    Ok(())
}

pub fn write_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_header_csv() {
        let x = parse_points("1,2\n3,4\n", false).unwrap();
        assert_eq!((x.len(), x.dim()), (2, 2));
        let x = parse_points("a,b\n1,2\n", true).unwrap();
        assert_eq!(x.len(), 1);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_points("1,2\n3,x\n", false).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_points("1,2\n3\n", false).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_points("1\nNaN\n", false).unwrap_err();
        assert!(err.contains("non-finite"), "{err}");
        assert_eq!(parse_points("", false).unwrap_err(), "no data rows");
    }

    #[test]
    fn radius_parsing() {
        assert_eq!(
            parse_radius(Some("inf"), || Ok(1.0)).unwrap(),
            f64::INFINITY
        );
        assert_eq!(parse_radius(None, || Ok(0.5)).unwrap(), 0.5);
        assert!(parse_radius(Some("0"), || Ok(1.0)).is_err());
        assert!(parse_radius(Some("-1"), || Ok(1.0)).is_err());
    }
}
