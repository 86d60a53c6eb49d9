//! Command-line front end. `main` is a thin wrapper around [`run`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::eval::{recovery_metrics, scaling_study, ScalingStudyConfig};
use crate::glp::{auto_alpha, auto_rho, glp_learn, GlpConfig};
use crate::graph::{param_count, ProductKind};
use crate::io;
use crate::pgl::{bpgl_learn, bpgl_learn_parallel_cartesian, PglConfig};
use crate::predict::{
    holdout_rmse, rmse_db_reduction, scm, CovarianceSurrogate, SlabSpec, SurrogateKind,
};
use crate::synth::{
    generate, product_ground_truth, sample_gmrf, GeneratorSpec, GraphFamily, WeightLaw,
};
use crate::tensor::SignalSet;

#[derive(Parser, Debug)]
#[command(
    name = "pglearn",
    version,
    about = "Learn graphs and product graphs from smooth signals"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Base RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for artifacts and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Flat key = value config file; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Generate a synthetic graph and write its adjacency CSV.
    Generate(GenerateArgs),
    /// Sample GMRF signals from a graph or a synthetic product graph.
    Sample(SampleArgs),
    /// Learn an arbitrary graph from signals (GLP).
    Learn(LearnArgs),
    /// Learn factor graphs of a product graph (B-PGL).
    LearnProduct(LearnProductArgs),
    /// Compare a learned adjacency against a reference.
    Eval(EvalArgs),
    /// Median per-factor error across an M0 grid.
    ScalingStudy(ScalingArgs),
    /// LMMSE missing-value prediction with a covariance surrogate.
    Predict(PredictArgs),
    /// Wall-clock comparison of the unstructured and product learners.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    /// Graph family: erdos-renyi | gaussian-sparse | preferential-attachment
    /// | random-regular | grid.
    #[arg(long, default_value = "erdos-renyi")]
    pub family: String,
    /// Node count.
    #[arg(long)]
    pub nodes: usize,
    /// Edge probability (erdos-renyi, gaussian-sparse).
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Edges per step (preferential-attachment) or node degree
    /// (random-regular).
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    /// Grid rows (grid family; columns = nodes / rows).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Weight law: unit | uniform:LO:HI | gaussian.
    #[arg(long, default_value = "uniform:0.5:1.5")]
    pub weights: String,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    /// Adjacency CSV to sample from; omit to generate a product ground
    /// truth instead.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Product kind when generating ground truth.
    #[arg(long, default_value = "cartesian")]
    pub kind: String,
    /// Factor sizes, comma separated (ground-truth mode).
    #[arg(long)]
    pub dims: Option<String>,
    /// Edge probability of the generated ER factors.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Number of observations.
    #[arg(long, default_value_t = 1000)]
    pub m0: usize,
    /// Additive noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
}

#[derive(Args, Debug, Clone)]
pub struct LearnArgs {
    /// Signals: PGTN tensor file or CSV with one observation per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Smoothness weight, or `auto` for sqrt(log n / M0) [default: auto].
    #[arg(long)]
    pub alpha: Option<String>,
    /// ADMM penalty, or `auto` for 0.75 / log M0 [default: auto].
    #[arg(long)]
    pub rho: Option<String>,
    /// Maximum ADMM iterations [default: 20000].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Residual tolerance, primal and dual [default: 1e-6].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write a per-iteration residual log.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug, Clone)]
pub struct LearnProductArgs {
    /// Signals: PGTN tensor file or CSV with one observation per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Product kind: kronecker | cartesian | strong.
    #[arg(long)]
    pub kind: String,
    /// Factor sizes, comma separated, e.g. 4,4.
    #[arg(long)]
    pub dims: String,
    /// Per-factor smoothness weight, or `auto` for
    /// sqrt(n_k log n_k / (n M0)) [default: auto].
    #[arg(long)]
    pub alpha: Option<String>,
    /// ADMM penalty, or `auto` [default: auto].
    #[arg(long)]
    pub rho: Option<String>,
    /// Maximum outer sweeps [default: 50].
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    /// Maximum inner ADMM iterations [default: 20000].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Residual tolerance, primal and dual [default: 1e-6].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Solve Cartesian factors concurrently in a single pass.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Learned adjacency CSV.
    #[arg(long)]
    pub estimate: PathBuf,
    /// Reference adjacency CSV.
    #[arg(long)]
    pub truth: PathBuf,
    /// Edge threshold; defaults to 1e-4 of the largest estimated weight.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ScalingArgs {
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub dims: String,
    /// Comma-separated observation counts, e.g. 10,100,1000.
    #[arg(long, default_value = "10,100,1000")]
    pub m_grid: String,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
    /// Also learn the full graph unstructured and report per-factor
    /// extracted errors.
    #[arg(long)]
    pub baseline: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PredictArgs {
    /// Test signals (PGTN; the last mode indexes observations).
    #[arg(long)]
    pub input: PathBuf,
    /// Tensor mode whose slab is withheld (0-based).
    #[arg(long)]
    pub miss_mode: usize,
    /// Index withheld along that mode.
    #[arg(long)]
    pub miss_index: usize,
    /// Surrogate: `scm`, `graph:PATH` (adjacency CSV, used as W + I), or
    /// `cov:PATH` (explicit covariance CSV).
    #[arg(long)]
    pub surrogate: String,
    /// Training signals for the SCM baseline column.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Ridge added to the observed block; defaults to 1e-6 tr/|obs|.
    #[arg(long)]
    pub ridge: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Factor sizes, comma separated.
    #[arg(long, default_value = "8,8")]
    pub dims: String,
    #[arg(long, default_value = "cartesian")]
    pub kind: String,
    #[arg(long, default_value_t = 200)]
    pub m0: usize,
    /// Timed repetitions after one discarded warmup.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
}

/// Entry point used by the binary: parses, runs, maps errors to exit codes
/// (0 success, 2 usage, 1 runtime).
pub fn main_with_exit_code() -> i32 {
    // clap exits with 2 on parse errors by itself
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(Error::InvalidConfig(msg)) | Err(Error::DimensionMismatch(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

struct RunContext {
    out: PathBuf,
    seed: u64,
    argv: Vec<String>,
    started: chrono::DateTime<chrono::Utc>,
    input_digests: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl RunContext {
    fn new(global: &GlobalArgs) -> Self {
        Self {
            out: global.out.clone(),
            seed: global.seed,
            argv: std::env::args().collect(),
            started: chrono::Utc::now(),
            input_digests: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    fn digest_input(&mut self, path: &Path) -> Result<()> {
        self.input_digests
            .insert(path.display().to_string(), io::sha256_hex(path)?);
        Ok(())
    }

    fn out_path(&mut self, name: &str) -> PathBuf {
        let p = self.out.join(name);
        self.outputs.push(p.display().to_string());
        p
    }

    fn finish(&self, command: &str, config: serde_json::Value, termination: &str) -> Result<()> {
        let manifest = io::Manifest {
            artifact: "pglearn".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            argv: self.argv.clone(),
            config,
            seed: self.seed,
            input_digests: self.input_digests.clone(),
            outputs: self.outputs.clone(),
            started_at: self.started.to_rfc3339(),
            finished_at: chrono::Utc::now().to_rfc3339(),
            termination: termination.into(),
        };
        manifest.write(&self.out.join("manifest.json"))
    }
}

/// Applies `--config FILE` values as defaults under the explicit flags.
fn config_overlay(global: &GlobalArgs) -> Result<BTreeMap<String, String>> {
    match &global.config {
        Some(path) => io::read_config_file(path),
        None => Ok(BTreeMap::new()),
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let dims: Vec<usize> = s
        .split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("bad dimension '{d}'")))
        })
        .collect::<Result<_>>()?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidConfig(format!("bad dims '{s}'")));
    }
    Ok(dims)
}

fn parse_m_grid(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("bad observation count '{d}'")))
        })
        .collect()
}

/// `auto` or a positive number.
fn resolve_auto(value: &str, auto: f64, what: &str) -> Result<f64> {
    if value.eq_ignore_ascii_case("auto") {
        Ok(auto)
    } else {
        value
            .parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0)
            .ok_or_else(|| Error::InvalidConfig(format!("{what} must be positive or 'auto'")))
    }
}

fn parse_weights(s: &str) -> Result<WeightLaw> {
    let lower = s.to_ascii_lowercase();
    if lower == "unit" {
        return Ok(WeightLaw::Unit);
    }
    if lower == "gaussian" {
        return Ok(WeightLaw::GaussianAbs {
            mean: 1.0,
            sd: 0.25,
        });
    }
    if let Some(rest) = lower.strip_prefix("uniform:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() == 2 {
            let lo = parts[0].parse::<f64>().ok();
            let hi = parts[1].parse::<f64>().ok();
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if 0.0 <= lo && lo < hi {
                    return Ok(WeightLaw::Uniform { lo, hi });
                }
            }
        }
    }
    Err(Error::InvalidConfig(format!(
        "bad weight law '{s}' (unit | uniform:LO:HI | gaussian)"
    )))
}

fn read_signals(path: &Path) -> Result<SignalSet> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => io::read_signals_csv(path),
        _ => io::read_signal_set(path),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let overlay = config_overlay(&cli.global)?;
    let mut ctx = RunContext::new(&cli.global);
    if let Some(cfg) = &cli.global.config {
        ctx.digest_input(cfg)?;
    }
    match &cli.command {
        Command::Generate(args) => run_generate(&mut ctx, args, &overlay),
        Command::Sample(args) => run_sample(&mut ctx, args, &overlay),
        Command::Learn(args) => run_learn(&mut ctx, args, &overlay),
        Command::LearnProduct(args) => run_learn_product(&mut ctx, args, &overlay),
        Command::Eval(args) => run_eval(&mut ctx, args),
        Command::ScalingStudy(args) => run_scaling(&mut ctx, args),
        Command::Predict(args) => run_predict(&mut ctx, args),
        Command::Bench(args) => run_bench(&mut ctx, args),
    }
}

/// Precedence: explicit flag, then config file, then the default.
fn setting<'a>(
    flag: Option<&'a str>,
    overlay: &'a BTreeMap<String, String>,
    key: &str,
    default: &'a str,
) -> &'a str {
    flag.or_else(|| overlay.get(key).map(String::as_str))
        .unwrap_or(default)
}

fn setting_parsed<T: std::str::FromStr>(
    flag: Option<T>,
    overlay: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match overlay.get(key) {
        Some(s) => s
            .parse::<T>()
            .map_err(|_| Error::InvalidConfig(format!("bad value for '{key}' in config file"))),
        None => Ok(default),
    }
}

fn run_generate(
    ctx: &mut RunContext,
    args: &GenerateArgs,
    _overlay: &BTreeMap<String, String>,
) -> Result<()> {
    let family = match args.family.as_str() {
        "erdos-renyi" => GraphFamily::ErdosRenyi { p: args.p },
        "gaussian-sparse" => GraphFamily::GaussianSparse { p: args.p },
        "preferential-attachment" => GraphFamily::PreferentialAttachment {
            edges_per_step: args.degree,
        },
        "random-regular" => GraphFamily::RandomRegular {
            degree: args.degree,
        },
        "grid" => {
            let rows = args
                .rows
                .ok_or_else(|| Error::InvalidConfig("grid needs --rows".into()))?;
            if rows == 0 || !args.nodes.is_multiple_of(rows) {
                return Err(Error::InvalidConfig(format!(
                    "--rows {rows} does not divide --nodes {}",
                    args.nodes
                )));
            }
            GraphFamily::Grid {
                rows,
                cols: args.nodes / rows,
            }
        }
        other => {
            return Err(Error::InvalidConfig(format!("unknown family '{other}'")));
        }
    };
    let spec = GeneratorSpec {
        family,
        n: args.nodes,
        weights: parse_weights(&args.weights)?,
        seed: ctx.seed,
    };
    let w = generate(&spec)?;
    io::write_adjacency_csv(&ctx.out_path("graph.csv"), &w)?;
    io::write_edge_list_tsv(&ctx.out_path("graph.tsv"), &w)?;
    ctx.finish(
        "generate",
        serde_json::to_value(&spec).expect("spec serializes"),
        "ok",
    )
}

fn run_sample(
    ctx: &mut RunContext,
    args: &SampleArgs,
    _overlay: &BTreeMap<String, String>,
) -> Result<()> {
    let config;
    let signals = match &args.graph {
        Some(path) => {
            ctx.digest_input(path)?;
            let w = io::read_adjacency_csv(path)?;
            let n = w.node_count();
            let l = w.trace_normalized(n as f64)?.laplacian();
            config = json!({
                "graph": path.display().to_string(),
                "m0": args.m0,
                "noise_sd": args.noise_sd,
            });
            sample_gmrf(&l, args.m0, ctx.seed, args.noise_sd)?
        }
        None => {
            let dims =
                parse_dims(args.dims.as_deref().ok_or_else(|| {
                    Error::InvalidConfig("sample needs --graph or --dims".into())
                })?)?;
            let kind: ProductKind = args.kind.parse()?;
            let specs: Vec<GeneratorSpec> = dims
                .iter()
                .map(|&n| GeneratorSpec::erdos_renyi(n, args.p, 0))
                .collect();
            let (truth, signals) =
                product_ground_truth(kind, &specs, args.m0, ctx.seed, args.noise_sd)?;
            for (k, f) in truth.factors().iter().enumerate() {
                io::write_adjacency_csv(&ctx.out_path(&format!("factor_{k}.csv")), f)?;
            }
            config = json!({
                "kind": kind.name(),
                "dims": dims,
                "p": args.p,
                "m0": args.m0,
                "noise_sd": args.noise_sd,
            });
            signals
        }
    };
    io::write_signal_set(&ctx.out_path("signals.pgtn"), &signals)?;
    ctx.finish("sample", config, "ok")
}

fn run_learn(
    ctx: &mut RunContext,
    args: &LearnArgs,
    overlay: &BTreeMap<String, String>,
) -> Result<()> {
    ctx.digest_input(&args.input)?;
    let signals = read_signals(&args.input)?;
    let n = signals.signal_len();
    let m0 = signals.len();
    let alpha = resolve_auto(
        setting(args.alpha.as_deref(), overlay, "alpha", "auto"),
        auto_alpha(n, m0),
        "alpha",
    )?;
    let rho = resolve_auto(
        setting(args.rho.as_deref(), overlay, "rho", "auto"),
        auto_rho(m0),
        "rho",
    )?;
    let max_iter = setting_parsed(args.max_iter, overlay, "max_iter", 20_000)?;
    let tol = setting_parsed(args.tol, overlay, "tol", 1e-6)?;
    let cfg = GlpConfig {
        alpha,
        rho,
        max_iter,
        eps_feas: tol,
        eps_dual: tol,
        trace_residuals: args.trace,
    };
    let out = glp_learn(&signals, &cfg)?;
    io::write_adjacency_csv(&ctx.out_path("W.csv"), &out.adjacency)?;
    io::write_edge_list_tsv(&ctx.out_path("W.tsv"), &out.adjacency)?;
    if args.trace {
        let mut csv = String::from("iteration,primal_residual,dual_residual\n");
        for (t, p, d) in &out.report.residual_history {
            csv.push_str(&format!("{t},{p},{d}\n"));
        }
        io::atomic_write(&ctx.out_path("residuals.csv"), csv.as_bytes())?;
    }
    let termination = if out.degenerate_objective {
        format!("{} (objective degenerate)", out.report.termination)
    } else {
        out.report.termination.to_string()
    };
    ctx.finish(
        "learn",
        json!({
            "n": n,
            "m0": m0,
            "alpha": alpha,
            "rho": rho,
            "max_iter": max_iter,
            "tol": tol,
            "iterations": out.report.iterations,
        }),
        &termination,
    )
}

fn run_learn_product(
    ctx: &mut RunContext,
    args: &LearnProductArgs,
    overlay: &BTreeMap<String, String>,
) -> Result<()> {
    ctx.digest_input(&args.input)?;
    let signals = read_signals(&args.input)?;
    let dims = parse_dims(&args.dims)?;
    let n: usize = dims.iter().product();
    if n != signals.signal_len() {
        return Err(Error::DimensionMismatch(format!(
            "dims product mismatch: --dims {} gives {} but signals have length {}",
            args.dims,
            n,
            signals.signal_len()
        )));
    }
    let kind: ProductKind = args.kind.parse()?;
    let m0 = signals.len();
    let mut cfg = PglConfig::auto(kind, &dims, m0);
    cfg.max_sweeps = setting_parsed(args.max_sweeps, overlay, "max_sweeps", 50)?;
    let max_iter = setting_parsed(args.max_iter, overlay, "max_iter", 20_000)?;
    let tol = setting_parsed(args.tol, overlay, "tol", 1e-6)?;
    let rho = resolve_auto(
        setting(args.rho.as_deref(), overlay, "rho", "auto"),
        auto_rho(m0),
        "rho",
    )?;
    let alpha_setting = setting(args.alpha.as_deref(), overlay, "alpha", "auto").to_string();
    for (k, inner) in cfg.inner.iter_mut().enumerate() {
        inner.rho = rho;
        inner.max_iter = max_iter;
        inner.eps_feas = tol;
        inner.eps_dual = tol;
        let auto = inner.alpha;
        inner.alpha = resolve_auto(&alpha_setting, auto, &format!("alpha (factor {k})"))?;
    }
    let est = if args.parallel {
        bpgl_learn_parallel_cartesian(&signals, &cfg)?
    } else {
        bpgl_learn(&signals, &cfg)?
    };
    for (k, f) in est.factors.iter().enumerate() {
        io::write_adjacency_csv(&ctx.out_path(&format!("W_{k}.csv")), f)?;
    }
    // assembled product adjacency, for LMMSE surrogates and inspection
    if let Ok(product) = crate::product::product_adjacency(&est.factor_set(), None) {
        io::write_adjacency_csv(&ctx.out_path("W_product.csv"), &product)?;
    }
    let mut hist = String::from("update,objective\n");
    for (i, v) in est.objective_history.iter().enumerate() {
        hist.push_str(&format!("{i},{v}\n"));
    }
    io::atomic_write(&ctx.out_path("objective.csv"), hist.as_bytes())?;
    ctx.finish(
        "learn-product",
        json!({
            "kind": kind.name(),
            "dims": dims,
            "m0": m0,
            "alpha": alpha_setting,
            "alpha_resolved": cfg.inner.iter().map(|i| i.alpha).collect::<Vec<_>>(),
            "rho": rho,
            "max_sweeps": cfg.max_sweeps,
            "max_iter": max_iter,
            "tol": tol,
            "parallel": args.parallel,
            "sweeps": est.sweeps,
            "rejected_updates": est.rejected_updates,
            "structured_params": param_count(&dims, true),
            "unstructured_params": param_count(&dims, false),
        }),
        if est.converged {
            "converged"
        } else {
            "max-sweeps"
        },
    )
}

fn run_eval(ctx: &mut RunContext, args: &EvalArgs) -> Result<()> {
    ctx.digest_input(&args.estimate)?;
    ctx.digest_input(&args.truth)?;
    let estimate = io::read_adjacency_csv(&args.estimate)?;
    let truth = io::read_adjacency_csv(&args.truth)?;
    let m = recovery_metrics(&estimate, &truth, args.threshold)?;
    let csv = format!(
        "precision,recall,f_measure,rel_fro_error,threshold\n{},{},{},{},{}\n",
        m.precision, m.recall, m.f_measure, m.rel_fro_error, m.threshold
    );
    io::atomic_write(&ctx.out_path("metrics.csv"), csv.as_bytes())?;
    println!(
        "precision {:.4}  recall {:.4}  F {:.4}  rel-error {:.4}",
        m.precision, m.recall, m.f_measure, m.rel_fro_error
    );
    ctx.finish(
        "eval",
        serde_json::to_value(m).expect("metrics serialize"),
        "ok",
    )
}

fn run_scaling(ctx: &mut RunContext, args: &ScalingArgs) -> Result<()> {
    let cfg = ScalingStudyConfig {
        kind: args.kind.parse()?,
        dims: parse_dims(&args.dims)?,
        m_grid: parse_m_grid(&args.m_grid)?,
        seeds: args.seeds,
        base_seed: ctx.seed,
        noise_sd: args.noise_sd,
        edge_probability: args.p,
        include_baseline: args.baseline,
    };
    let study = scaling_study(&cfg)?;

    let mut cells =
        String::from("m0,seed,factor,rel_fro_error,f_measure,baseline_error,baseline_f_measure\n");
    for cell in &study.cells {
        for k in 0..cell.factor_errors.len() {
            let baseline = cell
                .baseline_errors
                .as_ref()
                .map(|b| b[k].to_string())
                .unwrap_or_default();
            let baseline_f = cell
                .baseline_f_measures
                .as_ref()
                .map(|b| b[k].to_string())
                .unwrap_or_default();
            cells.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                cell.m0,
                cell.seed,
                k,
                cell.factor_errors[k],
                cell.factor_f_measures[k],
                baseline,
                baseline_f
            ));
        }
    }
    io::atomic_write(&ctx.out_path("cells.csv"), cells.as_bytes())?;

    let mut summary = String::from(
        "m0,median_error,median_f_measure,median_baseline_error,median_baseline_f_measure\n",
    );
    for row in &study.summary {
        summary.push_str(&format!(
            "{},{},{},{},{}\n",
            row.m0,
            row.median_error,
            row.median_f_measure,
            row.median_baseline_error
                .map(|v| v.to_string())
                .unwrap_or_default(),
            row.median_baseline_f_measure
                .map(|v| v.to_string())
                .unwrap_or_default()
        ));
        println!(
            "M0 {:>8}: median error {:.4}  median F {:.4}",
            row.m0, row.median_error, row.median_f_measure
        );
    }
    io::atomic_write(&ctx.out_path("summary.csv"), summary.as_bytes())?;
    if let Some(ok) = study.trend_ok {
        println!(
            "trend: {} ({} adjacent inversion(s))",
            if ok { "non-increasing" } else { "violated" },
            study.inversions
        );
    }
    ctx.finish(
        "scaling-study",
        json!({
            "kind": study.kind.name(),
            "dims": study.dims,
            "m_grid": cfg.m_grid,
            "seeds": cfg.seeds,
            "noise_sd": cfg.noise_sd,
            "edge_probability": cfg.edge_probability,
            "baseline": cfg.include_baseline,
            "trend_ok": study.trend_ok,
            "inversions": study.inversions,
        }),
        "ok",
    )
}

fn run_predict(ctx: &mut RunContext, args: &PredictArgs) -> Result<()> {
    ctx.digest_input(&args.input)?;
    let test = io::read_signal_set(&args.input)?;
    let slab = SlabSpec {
        mode: args.miss_mode,
        index: args.miss_index,
    };

    let surrogate = if args.surrogate == "scm" {
        let train_path = args
            .train
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("--surrogate scm needs --train".into()))?;
        ctx.digest_input(train_path)?;
        scm(&read_signals(train_path)?)?
    } else if let Some(path) = args.surrogate.strip_prefix("graph:") {
        let path = PathBuf::from(path);
        ctx.digest_input(&path)?;
        CovarianceSurrogate::from_graph(&io::read_adjacency_csv(&path)?)
    } else if let Some(path) = args.surrogate.strip_prefix("cov:") {
        let path = PathBuf::from(path);
        ctx.digest_input(&path)?;
        CovarianceSurrogate::from_matrix(io::read_matrix_csv(&path)?, SurrogateKind::Explicit)?
    } else {
        return Err(Error::InvalidConfig(format!(
            "unknown surrogate '{}' (scm | graph:PATH | cov:PATH)",
            args.surrogate
        )));
    };

    let rmse = holdout_rmse(&test, slab, &surrogate, args.ridge)?;
    let mut csv = String::from("surrogate,rmse,db_reduction_over_scm\n");
    let mut db = None;
    if surrogate.kind() != SurrogateKind::Scm {
        if let Some(train_path) = &args.train {
            ctx.digest_input(train_path)?;
            let baseline = scm(&read_signals(train_path)?)?;
            let rmse_scm = holdout_rmse(&test, slab, &baseline, args.ridge)?;
            db = Some(rmse_db_reduction(rmse, rmse_scm)?);
            csv.push_str(&format!("scm,{rmse_scm},0\n"));
        }
    }
    csv.push_str(&format!(
        "{:?},{rmse},{}\n",
        surrogate.kind(),
        db.map(|v| v.to_string()).unwrap_or_default()
    ));
    io::atomic_write(&ctx.out_path("rmse.csv"), csv.as_bytes())?;
    match db {
        Some(db) => println!("RMSE {rmse:.6} ({db:+.4} dB over SCM)"),
        None => println!("RMSE {rmse:.6}"),
    }
    ctx.finish(
        "predict",
        json!({
            "miss_mode": args.miss_mode,
            "miss_index": args.miss_index,
            "surrogate": args.surrogate,
            "rmse": rmse,
            "db_reduction": db,
        }),
        "ok",
    )
}

fn run_bench(ctx: &mut RunContext, args: &BenchArgs) -> Result<()> {
    let dims = parse_dims(&args.dims)?;
    let kind: ProductKind = args.kind.parse()?;
    let n: usize = dims.iter().product();
    let specs: Vec<GeneratorSpec> = dims
        .iter()
        .map(|&d| GeneratorSpec::erdos_renyi(d, 0.5, 0))
        .collect();
    let (_, signals) = product_ground_truth(kind, &specs, args.m0, ctx.seed, 0.0)?;
    let flat = signals.reshaped(vec![n])?;

    let mut glp_cfg = GlpConfig::auto(n, args.m0);
    glp_cfg.max_iter = args.max_iter;
    let mut pgl_cfg = PglConfig::auto(kind, &dims, args.m0);
    pgl_cfg.max_sweeps = 1;
    for inner in pgl_cfg.inner.iter_mut() {
        inner.max_iter = args.max_iter;
    }

    // warmup, discarded
    glp_learn(&flat, &glp_cfg)?;
    bpgl_learn(&signals, &pgl_cfg)?;

    let mut csv = String::from("method,size,repeat,seconds\n");
    let mut rows = Vec::new();
    for r in 0..args.repeats.max(1) {
        let t0 = Instant::now();
        glp_learn(&flat, &glp_cfg)?;
        let unstructured = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        bpgl_learn(&signals, &pgl_cfg)?;
        let structured = t1.elapsed().as_secs_f64();
        csv.push_str(&format!("glp,{n},{r},{unstructured}\n"));
        csv.push_str(&format!("bpgl,{},{r},{structured}\n", args.dims));
        rows.push((unstructured, structured));
    }
    io::atomic_write(&ctx.out_path("bench.csv"), csv.as_bytes())?;
    for (r, (u, s)) in rows.iter().enumerate() {
        println!("repeat {r}: glp {u:.4}s  bpgl {s:.4}s");
    }
    ctx.finish(
        "bench",
        json!({
            "dims": dims,
            "kind": kind.name(),
            "m0": args.m0,
            "repeats": args.repeats,
            "max_iter": args.max_iter,
        }),
        "ok",
    )
}
