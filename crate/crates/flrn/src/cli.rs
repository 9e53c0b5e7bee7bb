//! Command-line interface.
//!
//! Exit codes: 0 success, 1 i/o, 2 usage, 3 numeric failure.

use std::collections::HashSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flrn_core::estimator::{fit_full, fit_nystrom, predict_all, JitterPolicy, RidgeConfig};
use flrn_core::funcspace::l2_inner;
use flrn_core::rng::derive_seed;
use flrn_core::sweep::SweepSpec;
use flrn_core::synth::{beta_star, make_experiment, SynthConfig, NOISE_STREAM, PREDICTOR_STREAM};
use flrn_core::theory::{lambda_rule, min_subsample, predicted_rates, TheoryParams};
use flrn_core::KernelSpec;
use serde::Serialize;

use crate::error::{AppError, AppResult};
use crate::eval::{self, BenchSpec, Targets};
use crate::io::{self, fmt_f64, ModelFile};
use crate::manifest::RunManifest;
use crate::svg::write_heatmap_svg;
use crate::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "flrn", version, about = "Functional linear regression with Nyström subsampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the train/test datasets.
    Generate(GenerateArgs),
    /// Fit a model on a dataset file.
    Fit(FitArgs),
    /// Predict responses for a dataset file.
    Predict(PredictArgs),
    /// RMSE heatmap over (m, lambda).
    Sweep(SweepArgs),
    /// Time the full and Nyström solvers.
    Bench(BenchArgs),
    /// Regularization and subsample-size rules with predicted rates.
    Rates(RatesArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Flat key=value file; keys are long option names, command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Where to write the run manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Full,
    Nystrom,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Jitter {
    /// Retry a failed Cholesky with a small diagonal shift.
    Auto,
    Off,
}

impl Jitter {
    fn policy(self) -> JitterPolicy {
        match self {
            Jitter::Auto => JitterPolicy::default(),
            Jitter::Off => JitterPolicy::Off,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 650)]
    pub n_total: usize,
    #[arg(long, default_value_t = 550)]
    pub n_train: usize,
    /// Number of sine modes in each simulated curve.
    #[arg(long, default_value_t = 500)]
    pub truncation: usize,
    /// Noise variance.
    #[arg(long, default_value_t = 0.5)]
    pub sigma2: f64,
    /// Quadrature grid points on [0, 1].
    #[arg(long, default_value_t = 256)]
    pub grid_size: usize,
}

impl SynthArgs {
    fn config(&self, seed: u64) -> SynthConfig {
        SynthConfig {
            n_total: self.n_total,
            n_train: self.n_train,
            truncation: self.truncation,
            sigma2: self.sigma2,
            grid_size: self.grid_size,
            seed,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Training dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub lambda: f64,
    /// Subsample size (nystrom only).
    #[arg(long)]
    pub m: Option<usize>,
    /// Subsample seed (nystrom only).
    #[arg(long)]
    pub seed: Option<u64>,
    /// `sobolev-bernoulli` or `gaussian:gamma=<value>`.
    #[arg(long, default_value = "sobolev-bernoulli")]
    pub kernel: String,
    #[arg(long, value_enum, default_value_t = Jitter::Auto)]
    pub jitter: Jitter,
    #[arg(long, default_value = "model.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// The dataset the model was fitted on.
    #[arg(long)]
    pub train: PathBuf,
    /// Curves to predict for.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "predictions.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-7)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 25)]
    pub lambda_points: usize,
    #[arg(long, default_value_t = 10)]
    pub m_min: usize,
    #[arg(long, default_value_t = 240)]
    pub m_max: usize,
    #[arg(long, default_value_t = 25)]
    pub m_points: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "sobolev-bernoulli")]
    pub kernel: String,
    #[arg(long, value_enum, default_value_t = Jitter::Auto)]
    pub jitter: Jitter,
    /// Score against the stored test responses instead of <beta*, X>.
    #[arg(long)]
    pub noisy_targets: bool,
    /// Simulate a new train/test pair for every repetition instead of reading files.
    #[arg(long)]
    pub fresh_data: bool,
    #[command(flatten)]
    pub synth: SynthArgs,
    /// With --fresh-data, also write the full-solver profile over lambda here.
    #[arg(long)]
    pub full_out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    /// Training sizes, ascending.
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value = "sobolev-bernoulli")]
    pub kernel: String,
    #[arg(long, default_value_t = 1e-6)]
    pub lambda: f64,
    #[arg(long, default_value_t = 256)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 500)]
    pub truncation: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Threads for Gram assembly inside the timed region.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Skip the full solver for sizes above this.
    #[arg(long)]
    pub full_max_n: Option<usize>,
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RatesArgs {
    #[arg(long)]
    pub n: usize,
    /// Eigenvalue decay exponent, > 1.
    #[arg(long)]
    pub b: f64,
    /// Source smoothness in [0, 1/2].
    #[arg(long)]
    pub s: f64,
    /// Also write the row to this CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// Splices `--config` file entries into `argv` ahead of the user's flags,
/// skipping keys already given on the command line.
pub fn expand_config(argv: Vec<OsString>) -> AppResult<Vec<OsString>> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = Some(strs.get(i + 1).cloned().ok_or_else(|| AppError::usage("--config needs a path"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let path = PathBuf::from(path);
    let text = std::fs::read_to_string(&path).map_err(|e| AppError::io(&path, e))?;
    let given: HashSet<&str> = strs
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut extra = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| AppError::usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key == "config" || given.contains(key.as_str()) {
            continue;
        }
        match value {
            "true" => extra.push(OsString::from(format!("--{key}"))),
            "false" => {}
            v => extra.push(OsString::from(format!("--{key}={v}"))),
        }
    }
    // right after the subcommand name
    let at = strs.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 2).unwrap_or(argv.len());
    let mut out = argv;
    out.splice(at..at, extra);
    Ok(out)
}

/// Parses and runs; returns the process exit code.
pub fn main_with(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let argv = match expand_config(argv.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> AppResult<()> {
    match command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Rates(a) => cmd_rates(&a),
    }
}

fn parse_kernel(s: &str) -> AppResult<KernelSpec> {
    Ok(s.parse::<KernelSpec>()?)
}

fn manifest_path(common: &Common, out: &Path) -> PathBuf {
    common.manifest.clone().unwrap_or_else(|| {
        let mut p = out.as_os_str().to_os_string();
        p.push(".manifest.json");
        PathBuf::from(p)
    })
}

pub fn cmd_generate(a: &GenerateArgs) -> AppResult<()> {
    let start = Instant::now();
    let cfg = a.synth.config(a.seed);
    let (train, test) = make_experiment(&cfg)?;
    let mut m = RunManifest::new("generate", a)?;
    m.seeds.insert("seed".into(), a.seed);
    m.seeds.insert("predictors".into(), derive_seed(a.seed, PREDICTOR_STREAM));
    m.seeds.insert("noise".into(), derive_seed(a.seed, NOISE_STREAM));
    for (name, data) in [("train.csv", &train), ("test.csv", &test)] {
        let path = a.out_dir.join(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
        }
        io::write_dataset(&path, data)?;
        m.file(&path);
    }
    let beta = beta_star(&train.grid);
    let mut sq = 0.0;
    for d in [&train, &test] {
        for (x, y) in d.curves.iter().zip(&d.responses) {
            let e = y - l2_inner(&beta, x)?;
            sq += e * e;
        }
    }
    m.diag("n_train", train.len());
    m.diag("n_test", test.len());
    m.diag("empirical_noise_variance", sq / cfg.n_total as f64);
    m.wall_time_seconds = start.elapsed().as_secs_f64();
    m.write(&a.common.manifest.clone().unwrap_or_else(|| a.out_dir.join("manifest.json")))?;
    Ok(())
}

pub fn cmd_fit(a: &FitArgs) -> AppResult<()> {
    let start = Instant::now();
    if !(a.lambda > 0.0 && a.lambda.is_finite()) {
        return Err(AppError::usage(format!("--lambda must be positive, got {}", a.lambda)));
    }
    let kernel = parse_kernel(&a.kernel)?;
    let data = io::read_dataset(&a.data)?;
    let cfg = RidgeConfig::new(a.lambda)?.with_jitter(a.jitter.policy());
    let mut m = RunManifest::new("fit", a)?;
    let model = match a.method {
        Method::Full => {
            if a.m.is_some() || a.seed.is_some() {
                return Err(AppError::usage("--m and --seed apply to --method nystrom only"));
            }
            fit_full(&data, kernel, &cfg)?
        }
        Method::Nystrom => {
            let (Some(size), Some(seed)) = (a.m, a.seed) else {
                return Err(AppError::usage("--method nystrom requires --m and --seed"));
            };
            if size == 0 || size > data.len() {
                return Err(AppError::usage(format!("--m must lie in 1..={}, got {size}", data.len())));
            }
            m.seeds.insert("subsample".into(), seed);
            fit_nystrom(&data, kernel, &cfg, size, seed)?
        }
    };
    io::write_model(&a.out, &ModelFile::from_model(&model))?;
    m.file(&a.out);
    m.diag("n", data.len());
    m.diag("m", model.len());
    m.diag("jitter", model.jitter);
    m.diag("relative_residual", model.relative_residual);
    m.wall_time_seconds = start.elapsed().as_secs_f64();
    m.write(&manifest_path(&a.common, &a.out))?;
    Ok(())
}

pub fn cmd_predict(a: &PredictArgs) -> AppResult<()> {
    let start = Instant::now();
    let train = io::read_dataset(&a.train)?;
    let model = io::read_model(&a.model)?.into_model(&train)?;
    let data = io::read_dataset(&a.data)?;
    let preds = predict_all(&model, &data.curves)?;
    io::write_predictions(&a.out, &preds)?;
    let mut m = RunManifest::new("predict", a)?;
    m.file(&a.out);
    m.diag("kind", model.kind.as_str());
    m.diag("rows", preds.len());
    m.wall_time_seconds = start.elapsed().as_secs_f64();
    m.write(&manifest_path(&a.common, &a.out))?;
    Ok(())
}

fn pool(threads: Option<usize>) -> AppResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| AppError::usage(e.to_string()))
}

pub fn cmd_sweep(a: &SweepArgs) -> AppResult<()> {
    let start = Instant::now();
    let kernel = parse_kernel(&a.kernel)?;
    let spec = SweepSpec {
        lambda_min: a.lambda_min,
        lambda_max: a.lambda_max,
        lambda_points: a.lambda_points,
        m_min: a.m_min,
        m_max: a.m_max,
        m_points: a.m_points,
        reps: a.reps,
        base_seed: a.seed,
    };
    let mut m = RunManifest::new("sweep", a)?;
    m.seeds.insert("base".into(), a.seed);
    let workers = pool(a.threads)?;
    let (rows, failures) = if a.fresh_data {
        if a.noisy_targets || a.train.is_some() || a.test.is_some() {
            return Err(AppError::usage("--fresh-data simulates its own data; drop --train/--test/--noisy-targets"));
        }
        let cfg = a.synth.config(a.seed);
        let out = workers.install(|| {
            eval::run_replicated_sweep(&cfg, kernel, &spec, a.full_out.is_some(), a.jitter.policy())
        })?;
        if let Some(path) = &a.full_out {
            io::write_lambda_profile(path, &out.full)?;
            m.file(path);
            if let Some(best) = eval::best_lambda(&out.full) {
                m.diag("full_best_lambda", best.lambda);
                m.diag("full_best_mean_rmse", best.mean_rmse);
            }
        }
        (out.nystrom, out.failures)
    } else {
        if a.full_out.is_some() {
            return Err(AppError::usage("--full-out requires --fresh-data"));
        }
        let (Some(train), Some(test)) = (&a.train, &a.test) else {
            return Err(AppError::usage("sweep needs --train and --test (or --fresh-data)"));
        };
        let train = io::read_dataset(train)?;
        let test = io::read_dataset(test)?;
        let beta = beta_star(&test.grid);
        let targets = if a.noisy_targets { Targets::Noisy } else { Targets::Noiseless(&beta) };
        let out = workers.install(|| eval::run_sweep(&train, &test, kernel, &spec, targets, a.jitter.policy()))?;
        (out.rows, out.failures)
    };
    if failures > 0 {
        eprintln!("warning: {failures} fits failed and were left out of their cells");
    }
    io::write_sweep(&a.out, &rows)?;
    m.file(&a.out);
    if let Some(svg) = &a.svg {
        write_heatmap_svg(svg, &rows)?;
        m.file(svg);
    }
    m.diag("failures", failures);
    m.diag("threads", workers.current_num_threads());
    if let Some(best) = eval::best_cell(&rows, |_| true) {
        m.diag("best_m", best.m);
        m.diag("best_lambda", best.lambda);
        m.diag("best_mean_rmse", best.mean_rmse);
    }
    m.wall_time_seconds = start.elapsed().as_secs_f64();
    m.write(&manifest_path(&a.common, &a.out))?;
    Ok(())
}

pub fn cmd_bench(a: &BenchArgs) -> AppResult<()> {
    let start = Instant::now();
    let spec = BenchSpec {
        sizes: a.sizes.clone(),
        m: a.m,
        reps: a.reps,
        kernel: parse_kernel(&a.kernel)?,
        lambda: a.lambda,
        grid_size: a.grid_size,
        truncation: a.truncation,
        seed: a.seed,
        threads: a.threads,
        full_max_n: a.full_max_n,
    };
    let rows = eval::run_bench(&spec)?;
    io::write_bench(&a.out, &rows)?;
    let mut m = RunManifest::new("bench", a)?;
    m.seeds.insert("seed".into(), a.seed);
    m.file(&a.out);
    for method in [eval::BenchMethod::Full, eval::BenchMethod::Nystrom] {
        let times: Vec<_> = rows.iter().filter(|r| r.method == method).collect();
        let ratios: Vec<f64> = times.windows(2).map(|w| w[1].wall_time_seconds / w[0].wall_time_seconds).collect();
        m.diag(&format!("{}_time_ratios", method.as_str()), ratios);
    }
    m.wall_time_seconds = start.elapsed().as_secs_f64();
    m.write(&manifest_path(&a.common, &a.out))?;
    Ok(())
}

pub const RATES_HEADER: &str = "n,b,s,lambda,min_m,pred_rate,est_rate";

/// The `rates` CSV row for `(n, b, s)`.
pub fn rates_row(n: usize, b: f64, s: f64) -> AppResult<String> {
    let p = TheoryParams::new(b, s)?;
    let lambda = lambda_rule(n, &p)?;
    let min_m = min_subsample(lambda, &p, n)?;
    let (pred, est) = predicted_rates(n, &p)?;
    Ok(format!(
        "{n},{},{},{},{min_m},{},{}",
        fmt_f64(b),
        fmt_f64(s),
        fmt_f64(lambda),
        fmt_f64(pred),
        fmt_f64(est)
    ))
}

pub fn cmd_rates(a: &RatesArgs) -> AppResult<()> {
    let start = Instant::now();
    let row = rates_row(a.n, a.b, a.s)?;
    let text = format!("{RATES_HEADER}\n{row}\n");
    print!("{text}");
    let mut m = RunManifest::new("rates", a)?;
    if let Some(out) = &a.out {
        io::write_text(out, &text)?;
        m.file(out);
    }
    let manifest = a.common.manifest.clone().or_else(|| a.out.as_ref().map(|o| manifest_path(&a.common, o)));
    if let Some(path) = manifest {
        m.wall_time_seconds = start.elapsed().as_secs_f64();
        m.write(&path)?;
    }
    Ok(())
}
