//! The `pfr` command line: divergences, bound sweeps, the entropy figure,
//! sampling and the verification suite.

mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use svg::{LineChart, Series};

use crate::bounds::{
    alpha_grid, csv_cell, gaussian_alpha_grid, laplace_alpha_grid, sweep_with, BoundOptions, BoundSet, SWEEP_HEADER,
};
use crate::codes::renyi_entropy;
use crate::distributions::{renyi_divergence, renyi_divergence_numeric, DistributionPair, Order, ScalarDistribution};
use crate::error::{Error, Result};
use crate::numerics::{MinimizeSpec, QuadratureSpec};
use crate::oracle::{run_suite, CheckKind, SuiteConfig};
use crate::pfr::{index_pmf, sample_batch, EnvelopeOptions, IndexPmf, PfrConfig, SamplerMethod, TailEnvelope};

/// Tail mass above which the entropy column is reported as a lower bracket.
pub const TAIL_TOO_HEAVY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Svg,
    Both,
}

/// `lo,hi,points`: `points` equally spaced orders on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl AlphaRange {
    pub fn grid(&self) -> Result<Vec<f64>> {
        alpha_grid(self.lo, self.hi, self.points)
    }
}

impl FromStr for AlphaRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Parse(format!("alpha range {s:?}: expected lo,hi,points"));
        let [lo, hi, points] = parts.as_slice() else {
            return Err(bad());
        };
        let range = AlphaRange {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            points: points.parse().map_err(|_| bad())?,
        };
        range.grid().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(range)
    }
}

/// Settings shared by all subcommands; loadable from JSON with `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p: Option<String>,
    pub q: Option<String>,
    pub alpha_range: Option<AlphaRange>,
    pub n_max: usize,
    pub seed: u64,
    pub epsilon_search: MinimizeSpec,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub quadrature: QuadratureSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p: None,
            q: None,
            alpha_range: None,
            n_max: 1000,
            seed: 0,
            epsilon_search: MinimizeSpec::default(),
            output_path: None,
            format: OutputFormat::Csv,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn pair(&self) -> Result<DistributionPair> {
        let p = self.p.as_deref().ok_or_else(|| Error::Parse("missing P".into()))?;
        let q = self.q.as_deref().ok_or_else(|| Error::Parse("missing Q".into()))?;
        DistributionPair::new(p.parse()?, q.parse()?)
    }

    /// The configured grid, or the default grid for the pair's family.
    fn alphas(&self, pair: &DistributionPair) -> Result<Vec<f64>> {
        match (&self.alpha_range, pair.p()) {
            (Some(r), _) => r.grid(),
            (None, ScalarDistribution::Laplace { .. }) => Ok(laplace_alpha_grid()),
            (None, _) => Ok(gaussian_alpha_grid()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pfr",
    version,
    about = "Exact sampling with the Poisson functional representation and Campbell-cost bounds"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Root seed of all random streams [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent (CSV only).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    /// Order grid as lo,hi,points.
    #[arg(long, global = true, value_parser = parse_from_str::<AlphaRange>)]
    pub alpha_range: Option<AlphaRange>,
    /// JSON file with RunConfig fields; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Target law P, e.g. normal:0,1, laplace:0,1 or finite:0.9,0.1.
    #[arg(value_parser = parse_from_str::<ScalarDistribution>)]
    pub p: Option<ScalarDistribution>,
    /// Proposal law Q.
    #[arg(value_parser = parse_from_str::<ScalarDistribution>)]
    pub q: Option<ScalarDistribution>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Renyi divergence D_alpha(P||Q) in bits.
    Divergence {
        #[command(flatten)]
        pair: PairArgs,
        /// Orders, comma separated or repeated [default: 0.5,1,2].
        #[arg(long = "order", value_delimiter = ',')]
        orders: Vec<f64>,
        /// Add a quadrature cross-check column.
        #[arg(long)]
        numeric: bool,
    },
    /// Lower and upper bounds over a grid of orders.
    Sweep {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// The sweep plus H_alpha(K) + 1 from the truncated index pmf.
    EntropyFigure {
        #[command(flatten)]
        pair: PairArgs,
        /// Truncation point of the index pmf [default: 1000].
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Draws (K, U_K) pairs as k,u_k,termination rows.
    Sample {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(short = 'n', long = "count", default_value_t = 1)]
        count: u64,
        #[arg(long, default_value = "exact", value_parser = parse_from_str::<SamplerMethod>)]
        method: SamplerMethod,
        /// Tolerance of the approximate stopping rule of the PFR simulation.
        #[arg(long, default_value_t = 1e-8)]
        delta: f64,
    },
    /// Runs the verification suite; exits 1 if any check fails.
    Verify {
        /// Restrict to these checks (comma separated).
        #[arg(long, value_delimiter = ',', value_parser = parse_from_str::<CheckKind>)]
        only: Vec<CheckKind>,
        /// Exact-sampler draws per pair [default: 1000000].
        #[arg(long)]
        samples: Option<u64>,
        /// Negative control: corrupt the first upper bound's constant.
        #[arg(long)]
        corrupt_c1: bool,
    },
}

fn parse_from_str<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Process exit code for an error: 3 for I/O, 2 for bad input, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 3,
        Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::Domain(_)
        | Error::AbsoluteContinuity(_)
        | Error::UnsupportedKind(_)
        | Error::OrderOutOfRange(..)
        | Error::EpsilonOutOfRange { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if exit_code(&e) == 2 {
                let _ = writeln!(stderr, "\nFor usage, run `pfr --help`.");
            }
            exit_code(&e)
        }
    }
}

fn resolve(global: &GlobalArgs, pair: Option<&PairArgs>) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(o) = &global.out {
        cfg.output_path = Some(o.clone());
    }
    if let Some(f) = global.format {
        cfg.format = f;
    }
    if let Some(t) = global.quad_tol {
        cfg.quadrature = QuadratureSpec::with_tolerances(t, t);
    }
    if let Some(r) = global.alpha_range {
        cfg.alpha_range = Some(r);
    }
    if let Some(pair) = pair {
        if let Some(p) = &pair.p {
            cfg.p = Some(p.to_string());
        }
        if let Some(q) = &pair.q {
            cfg.q = Some(q.to_string());
        }
    }
    cfg.quadrature.validate()?;
    cfg.epsilon_search.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Divergence { pair, orders, numeric } => {
            let cfg = resolve(&cli.global, Some(pair))?;
            let text = divergence_table(&cfg, orders, *numeric)?;
            emit_text(&cfg, &text, stdout)?;
        }
        Command::Sweep { pair } => {
            let cfg = resolve(&cli.global, Some(pair))?;
            let pair = cfg.pair()?;
            let rows = sweep_with(
                &pair,
                &cfg.alphas(&pair)?,
                &cfg.epsilon_search,
                &BoundOptions::default(),
            )?;
            let chart = bounds_chart(&cfg, &rows, None);
            emit(&cfg, &sweep_text(&rows, None), &chart, stdout)?;
        }
        Command::EntropyFigure { pair, n_max } => {
            let mut cfg = resolve(&cli.global, Some(pair))?;
            if let Some(n) = n_max {
                cfg.n_max = *n;
            }
            let pair = cfg.pair()?;
            let rows = sweep_with(
                &pair,
                &cfg.alphas(&pair)?,
                &cfg.epsilon_search,
                &BoundOptions::default(),
            )?;
            let column = entropy_column(&pair, &cfg, &rows, stderr)?;
            let chart = bounds_chart(&cfg, &rows, Some(&column));
            emit(&cfg, &sweep_text(&rows, Some(&column)), &chart, stdout)?;
        }
        Command::Sample {
            pair,
            count,
            method,
            delta,
        } => {
            let cfg = resolve(&cli.global, Some(pair))?;
            let pair = cfg.pair()?;
            let pfr = PfrConfig::with_delta(*delta);
            let draws = sample_batch(&pair, *count, cfg.seed, *method, &pfr, &cfg.quadrature);
            let mut text = String::from("k,u_k,termination\n");
            for d in draws {
                match d {
                    Ok(o) => text.push_str(&format!("{},{},{}\n", o.index, o.accepted, o.termination)),
                    Err(e) => text.push_str(&format!(",,error:{}\n", e.to_string().replace(',', ";"))),
                }
            }
            emit_text(&cfg, &text, stdout)?;
        }
        Command::Verify {
            only,
            samples,
            corrupt_c1,
        } => {
            let cfg = resolve(&cli.global, None)?;
            let mut suite = SuiteConfig {
                seed: cfg.seed,
                only: only.clone(),
                corrupt_c1: *corrupt_c1,
                ..SuiteConfig::default()
            };
            if let Some(n) = samples {
                suite.n_samples = *n;
                suite.n_pfr = suite.n_pfr.min(*n);
            }
            let lines = run_suite(&suite)?;
            let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
            emit_text(&cfg, &text, stdout)?;
            if lines.iter().any(|l| !l.passed) {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn divergence_table(cfg: &RunConfig, orders: &[f64], numeric: bool) -> Result<String> {
    let pair = cfg.pair()?;
    let orders = if orders.is_empty() {
        vec![0.5, 1.0, 2.0]
    } else {
        orders.to_vec()
    };
    let mut text = String::from(if numeric {
        "order,divergence_bits,numeric_bits\n"
    } else {
        "order,divergence_bits\n"
    });
    for order in orders {
        let d = renyi_divergence(&pair, order)?;
        let mut row = format!("{},{}", csv_cell(Some(order)), csv_cell(Some(d)));
        if numeric {
            let n = if d.is_infinite() {
                Some(f64::INFINITY)
            } else {
                match renyi_divergence_numeric(&pair, order, &cfg.quadrature) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        log::warn!("quadrature cross-check at order {order} failed: {e}");
                        None
                    }
                }
            };
            row.push(',');
            row.push_str(&csv_cell(n));
        }
        text.push_str(&row);
        text.push('\n');
    }
    Ok(text)
}

/// `H_alpha(K) + 1` per row and whether each value is an upper bracket.
#[derive(Debug, Clone)]
struct EntropyColumn {
    values: Vec<f64>,
    upper: bool,
}

fn entropy_pmf(pair: &DistributionPair, cfg: &RunConfig, stderr: &mut dyn Write) -> Result<(IndexPmf, bool)> {
    let pmf = index_pmf(pair, cfg.n_max, &cfg.quadrature)?;
    if pmf.tail_mass() == 0.0 {
        return Ok((pmf, true));
    }
    if pmf.tail_mass() > TAIL_TOO_HEAVY {
        let _ = writeln!(
            stderr,
            "warning: TailTooHeavy: P(K > {}) = {:.4}; h_alpha_plus1 is a lower bracket only",
            cfg.n_max,
            pmf.tail_mass()
        );
        return Ok((pmf, false));
    }
    if pair.is_finite() {
        let _ = writeln!(
            stderr,
            "warning: no tail envelope for finite pairs; h_alpha_plus1 is a lower bracket (tail {:.2e})",
            pmf.tail_mass()
        );
        return Ok((pmf, false));
    }
    match TailEnvelope::build(pair, cfg.n_max, &EnvelopeOptions::default()) {
        Ok(env) => Ok((pmf.with_envelope(env), true)),
        Err(e) => {
            let _ = writeln!(
                stderr,
                "warning: tail envelope failed ({e}); h_alpha_plus1 is a lower bracket"
            );
            Ok((pmf, false))
        }
    }
}

fn entropy_column(
    pair: &DistributionPair,
    cfg: &RunConfig,
    rows: &[BoundSet],
    stderr: &mut dyn Write,
) -> Result<EntropyColumn> {
    let (pmf, upper) = entropy_pmf(pair, cfg, stderr)?;
    let values = rows
        .iter()
        .map(|r| {
            let b = renyi_entropy(&pmf, Order::sub_unit(r.alpha)?)?;
            Ok(if upper { b.upper } else { b.lower } + 1.0)
        })
        .collect::<Result<_>>()?;
    Ok(EntropyColumn { values, upper })
}

fn sweep_text(rows: &[BoundSet], column: Option<&EntropyColumn>) -> String {
    let mut text = String::from(SWEEP_HEADER);
    if column.is_some() {
        text.push_str(",h_alpha_plus1,h_bracket");
    }
    text.push('\n');
    for (i, r) in rows.iter().enumerate() {
        text.push_str(&crate::bounds::sweep_row(r));
        if let Some(c) = column {
            text.push_str(&format!(
                ",{},{}",
                csv_cell(Some(c.values[i])),
                if c.upper { "upper" } else { "lower" }
            ));
        }
        text.push('\n');
    }
    text
}

fn bounds_chart(cfg: &RunConfig, rows: &[BoundSet], column: Option<&EntropyColumn>) -> LineChart {
    let series = |name: &str, f: &dyn Fn(&BoundSet) -> Option<f64>| Series {
        name: name.into(),
        points: rows.iter().map(|r| (r.alpha, f(r))).collect(),
    };
    let mut all = vec![
        series("LB1", &|r| Some(r.lb1)),
        series("LB2", &|r| Some(r.lb2)),
        series("UB1", &|r| Some(r.ub1)),
        series("UB2", &|r| r.ub2),
    ];
    if let Some(c) = column {
        all.push(Series {
            name: if c.upper {
                "H_alpha(K) + 1".into()
            } else {
                "H_alpha(K) + 1 (lower)".into()
            },
            points: rows.iter().zip(&c.values).map(|(r, v)| (r.alpha, Some(*v))).collect(),
        });
    }
    LineChart {
        title: format!(
            "P = {}, Q = {}",
            cfg.p.as_deref().unwrap_or("?"),
            cfg.q.as_deref().unwrap_or("?")
        ),
        x_label: "alpha".into(),
        y_label: "bits".into(),
        series: all,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(Error::from)
}

fn emit_text(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.output_path {
        Some(path) => write_file(path, text),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn emit(cfg: &RunConfig, csv: &str, chart: &LineChart, stdout: &mut dyn Write) -> Result<()> {
    match (cfg.format, &cfg.output_path) {
        (OutputFormat::Csv, _) => emit_text(cfg, csv, stdout),
        (OutputFormat::Svg, _) => emit_text(cfg, &chart.render(), stdout),
        (OutputFormat::Both, Some(path)) => {
            write_file(&path.with_extension("csv"), csv)?;
            write_file(&path.with_extension("svg"), &chart.render())
        }
        (OutputFormat::Both, None) => Err(Error::InvalidParameter("--format both requires --out".into())),
    }
}
