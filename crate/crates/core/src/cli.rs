//! Command-line front end: `estimate`, `simulate`, `oracle`, `verify-bounds`.
//!
//! Every command writes one JSON report (schema `supnorm-adapt/1`) that embeds
//! the resolved configuration, the seed and the crate version. Series meant
//! for plotting can also be written as CSV.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration or degenerate-grid
//! error, 3 malformed input data.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::estimator::Sample;
use crate::lepski::{
    select, select_with_cdf_constraint, ConstrainedSelection, Selection, SelectorKind, SelectorVariant,
};
use crate::rademacher::DEFAULT_M_DRAWS;
use crate::risk_lab::bounds::{bound_evaluators, empirical_violation_rate, BoundInputs, DEFAULT_T_LADDER};
use crate::risk_lab::experiments::{
    asymptotic_constant_check, check_ladder, clt_check, ecdf_gap_ladder, kolmogorov_reference, rate_campaign,
    BRIDGE_GRID, KOLMOGOROV_DRAWS,
};
use crate::risk_lab::oracles::{local_holder_w, oracle_jh, oracle_jsharp, oracle_jstar};
use crate::risk_lab::{bias_bound, variance_proxy, LevelRule, TestDensity};
use crate::rng::StreamKey;
use crate::spline_kernel::{ProjectionKernel, SplineOrder};

pub const SCHEMA: &str = "supnorm-adapt/1";

pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Parser)]
#[command(
    name = "supnorm-adapt",
    version,
    about = "Adaptive sup-norm density estimation with spline projections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a resolution level for a sample and write the estimate.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo campaign: rate regression, CLT check or asymptotic constants.
    Simulate(SimulateArgs),
    /// Oracle levels, bias and deviation tables over the grid for a test density.
    Oracle(OracleArgs),
    /// Evaluate the concentration bounds and their empirical violation rates.
    VerifyBounds(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    BarEps,
    Bar,
    TildeEps,
    Tilde,
    Route,
}

impl From<VariantArg> for SelectorKind {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::BarEps => SelectorKind::BarEps,
            VariantArg::Bar => SelectorKind::Bar,
            VariantArg::TildeEps => SelectorKind::TildeEps,
            VariantArg::Tilde => SelectorKind::Tilde,
            VariantArg::Route => SelectorKind::Route,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    Rate,
    Clt,
    Constants,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Master seed; every random quantity derives from it.
    #[arg(long)]
    pub seed: u64,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Optional CSV of the plot-ready series.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectorArgs {
    /// B-spline order r (1 = Haar).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub order: u32,
    #[arg(long, value_enum, default_value_t = VariantArg::BarEps)]
    pub variant: VariantArg,
    /// Rademacher draws averaged by the `bar` and `tilde` variants.
    #[arg(long, default_value_t = DEFAULT_M_DRAWS)]
    pub m_draws: usize,
    /// Require candidates within 1/(√n ln n) of the empirical CDF.
    #[arg(long)]
    pub cdf_constraint: bool,
    /// Draw fresh Rademacher signs for every candidate level.
    #[arg(long)]
    pub refresh_draws: bool,
}

impl SelectorArgs {
    fn variant(&self) -> SelectorVariant {
        SelectorVariant {
            kind: self.variant.into(),
            m_draws: self.m_draws,
            cdf_constraint: self.cdf_constraint,
            refresh_draws: self.refresh_draws,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    /// Text file with one observation per line; `#` starts a comment.
    #[arg(long)]
    pub input: PathBuf,
    /// Output points per cell of the selected level.
    #[arg(long, default_value_t = 4)]
    pub points_per_cell: usize,
    #[command(flatten)]
    pub selector: SelectorArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Campaign::Rate)]
    pub campaign: Campaign,
    /// `triangular`, `raised-cosine` or `cusp:<t>`.
    #[arg(long, default_value = "triangular")]
    pub density: String,
    /// Comma-separated increasing sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [4096usize, 8192, 16384, 32768, 65536, 131072])]
    pub n_ladder: Vec<usize>,
    /// Sample size of the CLT check.
    #[arg(long, default_value_t = 16384)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[command(flatten)]
    pub selector: SelectorArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, default_value = "triangular")]
    pub density: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub order: u32,
    #[arg(long, default_value_t = 16384)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "triangular")]
    pub density: String,
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    /// Haar level of the cell-indicator class.
    #[arg(long, default_value_t = 3)]
    pub level: u32,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    /// Comma-separated deviation levels t.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_T_LADDER)]
    pub t_ladder: Vec<f64>,
    /// Uniform-entropy constant A of the class.
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub vc_a: f64,
    /// Uniform-entropy exponent v of the class.
    #[arg(long, default_value_t = 2.0)]
    pub vc_v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Input(m) => write!(f, "malformed input: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptySample | Error::NonFinite(_) => CliError::Input(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parse observations: one number per line, blank lines and `#` comments ignored.
pub fn parse_sample(text: &str) -> CliResult<Sample> {
    let mut xs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let x: f64 = body
            .parse()
            .map_err(|_| CliError::Input(format!("line {}: {body:?} is not a number", i + 1)))?;
        xs.push(x);
    }
    Ok(Sample::new(xs)?)
}

pub fn read_sample(path: &Path) -> CliResult<Sample> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_sample(&text)
}

fn order(r: u32) -> CliResult<SplineOrder> {
    Ok(SplineOrder::new(r)?)
}

fn density(name: &str) -> CliResult<TestDensity> {
    Ok(TestDensity::parse(name)?)
}

fn check_reps(reps: usize) -> CliResult<()> {
    if reps < 2 {
        return Err(CliError::Config(format!("--reps must be at least 2, got {reps}")));
    }
    Ok(())
}

fn report(command: &str, config: &impl Serialize, seed: u64, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "version": version(),
        "command": command,
        "seed": seed,
        "config": config,
        "result": result,
    })
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// A plot-ready table: header plus rows of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn write_csv<W: Write>(series: &Series, w: W) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    out.write_record(&series.header).map_err(io)?;
    for row in &series.rows {
        out.serialize(row).map_err(io)?;
    }
    out.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn read_csv(text: &str) -> CliResult<Series> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::Input(e.to_string());
    let header = rdr.headers().map_err(bad)?.iter().map(String::from).collect();
    let rows = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<Vec<f64>>, _>>()
        .map_err(bad)?;
    Ok(Series { header, rows })
}

fn emit(common: &Common, doc: &Value, series: Option<Series>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("json");
    text.push('\n');
    match &common.output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(series)) = (&common.csv, series) {
        let f = fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        write_csv(&series, f)?;
    }
    Ok(())
}

fn selection_value(sel: &Selection, points_per_cell: usize) -> (Value, Series) {
    let p = &sel.estimate.density;
    let h = (-(p.level() as f64)).exp2();
    let m = points_per_cell.max(1);
    let mut rows = Vec::new();
    for k in p.k_min()..=p.k_max() + 1 {
        for i in 0..m {
            if k == p.k_max() + 1 && i > 0 {
                break;
            }
            let x = (k as f64 + i as f64 / m as f64) * h;
            rows.push(vec![x, p.eval(x), sel.cdf.eval(x)]);
        }
    }
    let grid: Vec<Value> = rows
        .iter()
        .map(|r| json!({"x": r[0], "density": r[1], "cdf": r[2]}))
        .collect();
    let value = json!({
        "j_hat": sel.trace.j_hat,
        "fallback": sel.trace.fallback,
        "empirical_cdf_sentinel": false,
        "plug_in_sup": sel.trace.plug_in_sup,
        "total_mass": sel.cdf.total_mass,
        "trace": to_value(&sel.trace),
        "estimate": grid,
    });
    (
        value,
        Series {
            header: vec!["x".into(), "density".into(), "cdf".into()],
            rows,
        },
    )
}

pub fn cmd_estimate(args: &EstimateArgs) -> CliResult<()> {
    let kernel = ProjectionKernel::new(order(args.selector.order)?)?;
    let sample = read_sample(&args.input)?;
    let key = StreamKey::root(args.common.seed);
    let variant = args.selector.variant();
    let (value, series) = if variant.cdf_constraint {
        match select_with_cdf_constraint(&sample, &kernel, variant, &key)? {
            ConstrainedSelection::Estimate(sel) => selection_value(&sel, args.points_per_cell),
            ConstrainedSelection::EmpiricalCdf(trace) => (
                json!({
                    "j_hat": Value::Null,
                    "fallback": trace.fallback,
                    "empirical_cdf_sentinel": true,
                    "plug_in_sup": trace.plug_in_sup,
                    "trace": to_value(&trace),
                }),
                Series {
                    header: vec!["x".into(), "ecdf".into()],
                    rows: sample.xs().iter().map(|&x| vec![x, sample.ecdf(x)]).collect(),
                },
            ),
        }
    } else {
        selection_value(&select(&sample, &kernel, variant, &key)?, args.points_per_cell)
    };
    let mut value = value;
    value["n"] = json!(sample.len());
    emit(
        &args.common,
        &report("estimate", args, args.common.seed, value),
        Some(series),
    )
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    check_reps(args.reps)?;
    let d = density(&args.density)?;
    let kernel = ProjectionKernel::new(order(args.selector.order)?)?;
    let key = StreamKey::root(args.common.seed);
    let variant = args.selector.variant();
    let (value, series) = match args.campaign {
        Campaign::Rate => {
            check_ladder(&args.n_ladder)?;
            let adaptive = rate_campaign(
                &d,
                &kernel,
                LevelRule::Select { variant },
                &args.n_ladder,
                args.reps,
                &key,
            )?;
            let control = rate_campaign(&d, &kernel, LevelRule::GridMin, &args.n_ladder, args.reps, &key)?;
            let rows = adaptive
                .risks
                .iter()
                .zip(&control.risks)
                .map(|(a, c)| vec![a.n as f64, a.mean, a.std_err, c.mean, c.std_err])
                .collect();
            let summary = |c: &crate::risk_lab::experiments::RateCampaign| {
                json!({
                    "slope": c.regression.slope,
                    "intercept": c.regression.intercept,
                    "half_width": c.regression.half_width,
                    "risks": c.risks.iter().map(|r| json!({
                        "n": r.n, "mean": r.mean, "std_err": r.std_err, "reps": r.reps,
                        "median_level": r.median_level(),
                    })).collect::<Vec<_>>(),
                })
            };
            (
                json!({
                    "slope": adaptive.regression.slope,
                    "control_slope": control.regression.slope,
                    "slope_gap": control.regression.slope - adaptive.regression.slope,
                    "adaptive": summary(&adaptive),
                    "control": summary(&control),
                }),
                Series {
                    header: ["n", "risk", "risk_se", "control_risk", "control_se"]
                        .map(String::from)
                        .to_vec(),
                    rows,
                },
            )
        }
        Campaign::Clt => {
            let reference = kolmogorov_reference(KOLMOGOROV_DRAWS, BRIDGE_GRID, &key);
            let clt = clt_check(&d, &kernel, variant, args.n, args.reps, &key, &reference)?;
            check_ladder(&args.n_ladder)?;
            let gaps = ecdf_gap_ladder(&d, &kernel, variant, &args.n_ladder, args.reps, &key)?;
            let rows = gaps.iter().map(|&(n, g)| vec![n as f64, g]).collect();
            (
                json!({ "clt": to_value(&clt), "ecdf_gap_medians": gaps.iter().map(|&(n, g)| json!({"n": n, "median": g})).collect::<Vec<_>>() }),
                Series {
                    header: vec!["n".into(), "median_ecdf_gap".into()],
                    rows,
                },
            )
        }
        Campaign::Constants => {
            let rep = asymptotic_constant_check(&d, variant, &args.n_ladder, args.reps, &key)?;
            let rows = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n as f64,
                        r.deviation_ratio,
                        r.normalized_deviation_se,
                        r.adaptive_constant,
                        r.adaptive_constant_se,
                    ]
                })
                .collect();
            (
                to_value(&rep),
                Series {
                    header: [
                        "n",
                        "deviation_ratio",
                        "deviation_se",
                        "adaptive_constant",
                        "adaptive_se",
                    ]
                    .map(String::from)
                    .to_vec(),
                    rows,
                },
            )
        }
    };
    emit(
        &args.common,
        &report("simulate", args, args.common.seed, value),
        Some(series),
    )
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<()> {
    check_reps(args.reps)?;
    let d = density(&args.density)?;
    let kernel = ProjectionKernel::new(order(args.order)?)?;
    let key = StreamKey::root(args.common.seed);
    let jstar = oracle_jstar(&d, &kernel, args.n)?;
    let sharp = oracle_jsharp(&d, &kernel, args.n, args.reps, &key)?;
    let jh = oracle_jh(&d, &kernel, args.n, args.reps, &key)?;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for (b, r) in sharp.rows.iter().zip(&jh.rows) {
        let w = kernel.order().is_haar().then(|| local_holder_w(b.l, &d));
        let sigma = variance_proxy(b.l, args.n);
        rows.push(vec![
            b.l as f64,
            bias_bound(b.l, &d, &kernel),
            b.deviation.mean,
            b.deviation.std_err.unwrap_or(0.0),
            r.mean,
            r.std_err,
            sigma,
            w.unwrap_or(f64::NAN),
        ]);
        table.push(json!({
            "l": b.l, "bias_bound": b.bias, "deviation": b.deviation.mean,
            "deviation_se": b.deviation.std_err, "risk": r.mean, "risk_se": r.std_err,
            "variance_proxy": sigma, "w": w,
        }));
    }
    let value = json!({
        "j_star": to_value(&jstar),
        "j_sharp": sharp.j,
        "j_h": jh.j,
        "levels": table,
    });
    let series = Series {
        header: [
            "l",
            "bias_bound",
            "deviation",
            "deviation_se",
            "risk",
            "risk_se",
            "variance_proxy",
            "w",
        ]
        .map(String::from)
        .to_vec(),
        rows,
    };
    emit(
        &args.common,
        &report("oracle", args, args.common.seed, value),
        Some(series),
    )
}

pub fn cmd_verify_bounds(args: &VerifyArgs) -> CliResult<()> {
    check_reps(args.reps)?;
    if args.t_ladder.is_empty() {
        return Err(CliError::Config("--t-ladder is empty".into()));
    }
    let d = density(&args.density)?;
    let key = StreamKey::root(args.common.seed);
    let exp = empirical_violation_rate(&d, args.level, args.n, args.reps, &args.t_ladder, &key)?;
    let inputs = BoundInputs {
        n: args.n,
        sigma2: exp.sigma2,
        esup: exp.symmetrization.centered.mean,
        rademacher_esup: exp.symmetrization.rademacher.mean,
        a: args.vc_a,
        v: args.vc_v,
        lambda: args.lambda,
    };
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &t in &args.t_ladder {
        let b = bound_evaluators(&inputs, t)?;
        let names: Vec<&str> = b.keys().copied().collect();
        rows.push(std::iter::once(t).chain(names.iter().map(|k| b[k].value)).collect());
        table.push(json!({ "t": t, "bounds": to_value(&b) }));
    }
    let header = std::iter::once("t".to_string())
        .chain(bound_evaluators(&inputs, 0.0)?.keys().map(|k| k.to_string()))
        .collect();
    let value = json!({
        "inputs": to_value(&inputs),
        "bounds": table,
        "violation": to_value(&exp),
    });
    emit(
        &args.common,
        &report("verify-bounds", args, args.common.seed, value),
        Some(Series { header, rows }),
    )
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::VerifyBounds(a) => cmd_verify_bounds(a),
    }
}

fn threads(cli: &Cli) -> usize {
    match &cli.command {
        Command::Estimate(a) => a.common.threads,
        Command::Simulate(a) => a.common.threads,
        Command::Oracle(a) => a.common.threads,
        Command::VerifyBounds(a) => a.common.threads,
    }
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads(&cli)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let s = parse_sample("# header\n0.5\n\n 1.5 # trailing\n-2\n").unwrap();
        assert_eq!(s.xs(), &[-2.0, 0.5, 1.5]);
    }

    #[test]
    fn malformed_lines_are_input_errors() {
        assert_eq!(parse_sample("0.1\nabc\n").unwrap_err().exit_code(), 3);
        assert_eq!(parse_sample("# nothing\n").unwrap_err().exit_code(), 3);
        assert_eq!(parse_sample("inf\n").unwrap_err().exit_code(), 3);
    }

    #[test]
    fn csv_round_trip() {
        let s = Series {
            header: vec!["x".into(), "y".into()],
            rows: vec![vec![0.1, 1e-300], vec![-3.0, 2.0 / 3.0]],
        };
        let mut a = Vec::new();
        write_csv(&s, &mut a).unwrap();
        let back = read_csv(std::str::from_utf8(&a).unwrap()).unwrap();
        assert_eq!(back, s);
        let mut b = Vec::new();
        write_csv(&back, &mut b).unwrap();
        assert_eq!(a, b);
    }
}
