//! Command-line pipeline: `simulate`, `fit`, `predict`, `sensitivity`,
//! `report`.
//!
//! Every command is deterministic given its inputs and seed, never mutates an
//! input file, and emits plot-ready delimited text. Exit codes: 0 success,
//! 1 usage error, 2 data error, 3 numerical failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_pairs, FactorChoice, FitArtifacts, MeanModelKind, RunConfig};
use crate::data::{
    apply_infectious_shift, fmt_f64, load_series, make_synthetic, read_synthetic,
    scale_covariates, write_synthetic, ObservationSeries, ScalingRanges,
};
use crate::error::{Error, Result};
use crate::mcmc::{read_chain, run_chain, write_chain};
use crate::posterior::{
    fitted_curve, predictive_samples, summarize, write_forecast, write_forecast_draws,
};
use crate::sensitivity::{
    posterior_sensitivity, write_report, FactorDistribution, SensitivityOptions,
};
use crate::sir::{Compartments, MeanModel};

#[derive(Debug, Parser)]
#[command(
    name = "epical",
    version,
    about = "Bayesian calibration of covariate-dependent SIR epidemic parameters"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic study (40 days, 30 train / 10 test).
    Simulate(SimulateArgs),
    /// Fit the joint GP model to one or more cities by MCMC.
    Fit(FitArgs),
    /// Posterior-predictive forecast over a future-covariate horizon.
    Predict(PredictArgs),
    /// Functional-ANOVA sensitivity analysis of the R0 surface.
    Sensitivity(SensitivityArgs),
    /// Consolidate fit/predict/sensitivity artifacts into one summary.
    Report(ReportArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat `key = value` config file; CLI flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// RNG seed (overrides config file and EPICAL_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
}

impl CommonArgs {
    /// Resolve precedence: defaults < config file < EPICAL_SEED < --seed.
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply_env()?;
        if let Some(seed) = self.seed {
            cfg.chain.seed = seed;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory for train.csv, test.csv, truth.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Synthetic `day,x,y` training file (test mean model).
    #[arg(long, conflicts_with_all = ["cases", "covariates", "population"])]
    pub train: Option<PathBuf>,
    /// Case-count CSV (`date,count`); repeat for multiple cities.
    #[arg(long, requires = "covariates", requires = "population")]
    pub cases: Vec<PathBuf>,
    /// Covariate CSV (`date,<factors>`); one per --cases.
    #[arg(long)]
    pub covariates: Vec<PathBuf>,
    /// City population N; one per --cases, or one shared value.
    #[arg(long)]
    pub population: Vec<f64>,
    /// Mean model (defaults to `test` for --train, `sir` for --cases).
    #[arg(long, value_parser = ["sir", "test"])]
    pub mean_model: Option<String>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Days between infection and confirmation.
    #[arg(long)]
    pub shift_days: Option<usize>,
    /// Fix rho = 0 (independent-GP ablation).
    #[arg(long)]
    pub independent_gp: bool,
    /// Concurrent city fits.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory (per-city subdirectories when fitting several).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Directory written by `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Future covariates: `date,<factors>` (sir) or `day,x` (test).
    #[arg(long)]
    pub future: PathBuf,
    /// Forecast horizon in days.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Also write every predictive draw (forecast_draws.csv).
    #[arg(long)]
    pub emit_draws: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Directory written by `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Interaction surfaces to emit, e.g. `intervention:temperature,humidity:pressure`.
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Directory written by `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Directory written by `predict`.
    #[arg(long)]
    pub predict: Option<PathBuf>,
    /// Directory written by `sensitivity`.
    #[arg(long)]
    pub sensitivity: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parse arguments and run; returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut cause = std::error::Error::source(&e);
            while let Some(c) = cause {
                eprintln!("  caused by: {c}");
                cause = c.source();
            }
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Sensitivity(a) => cmd_sensitivity(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = args.common.resolve()?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let (train, test, truth) = make_synthetic(cfg.chain.seed);
    write_synthetic(&train, &args.out.join("train.csv"))?;
    write_synthetic(&test, &args.out.join("test.csv"))?;
    let mut out = String::from("day,x,beta,gamma\n");
    for (i, ((x, b), g)) in truth.x.iter().zip(&truth.beta).zip(&truth.gamma).enumerate() {
        let _ = writeln!(out, "{},{},{},{}", i + 1, fmt_f64(*x), fmt_f64(*b), fmt_f64(*g));
    }
    let path = args.out.join("truth.csv");
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    println!("wrote train.csv, test.csv, truth.csv to {}", args.out.display());
    Ok(())
}

/// One prepared city ready to sample.
struct FitJob {
    series: ObservationSeries,
    model: MeanModel,
    ranges: ScalingRanges,
    kind: MeanModelKind,
    out: PathBuf,
    seed: u64,
    shift_days: usize,
    clamped: usize,
}

fn prepare_synthetic_job(path: &Path, out: &Path, cfg: &RunConfig) -> Result<FitJob> {
    let series = read_synthetic(path)?;
    // synthetic x already lies in (0,1): identity ranges, no rescaling
    let ranges = ScalingRanges {
        min: vec![0.0; series.dim()],
        max: vec![1.0; series.dim()],
    };
    Ok(FitJob {
        series,
        model: MeanModel::Test,
        ranges,
        kind: MeanModelKind::Test,
        out: out.to_path_buf(),
        seed: cfg.chain.seed,
        shift_days: 0,
        clamped: 0,
    })
}

fn prepare_city_job(
    cases: &Path,
    covariates: &Path,
    population: f64,
    out: &Path,
    seed: u64,
    cfg: &RunConfig,
) -> Result<FitJob> {
    let (raw, clamped) = load_series(cases, covariates, population, cfg.count_kind)?;
    let mut series = apply_infectious_shift(&raw, cfg.shift_days)?;
    let ranges = scale_covariates(&mut series)?;
    // i(0) = first reported daily count (at least one index case), r(0) = 0
    let i0 = (series.y[0] as f64).max(1.0);
    let init = Compartments::from_population(population, i0)?;
    Ok(FitJob {
        series,
        model: MeanModel::Sir {
            init,
            mode: cfg.negative_state,
        },
        ranges,
        kind: MeanModelKind::Sir,
        out: out.to_path_buf(),
        seed,
        shift_days: cfg.shift_days,
        clamped,
    })
}

fn run_fit_job(job: &FitJob, cfg: &RunConfig) -> Result<()> {
    let mut chain_cfg = cfg.chain.clone();
    chain_cfg.seed = job.seed;
    let samples = run_chain(&job.series, &job.model, &cfg.prior, &chain_cfg)?;

    fs::create_dir_all(&job.out).map_err(|e| Error::io(&job.out, e))?;
    let art = FitArtifacts::in_dir(&job.out);
    write_chain(&art.chain, &samples)?;

    let mut acc = String::new();
    for (name, rate) in &samples.acceptance {
        let _ = writeln!(acc, "{name} {rate:.4}");
    }
    fs::write(&art.acceptance, acc).map_err(|e| Error::io(&art.acceptance, e))?;

    let fitted = fitted_curve(&samples, &job.series, &job.model)?;
    let mut out = String::from("day,observed,fitted\n");
    for ((d, y), f) in job.series.days.iter().zip(&job.series.y).zip(&fitted) {
        let _ = writeln!(out, "{d},{y},{}", fmt_f64(*f));
    }
    fs::write(&art.fitted, out).map_err(|e| Error::io(&art.fitted, e))?;

    write_train_scaled(&art.train, &job.series)?;
    write_ranges(&art.ranges, &job.ranges, &job.series.factor_names)?;

    let mut meta = String::new();
    let _ = writeln!(meta, "city = {}", job.series.city);
    let _ = writeln!(
        meta,
        "mean_model = {}",
        match job.kind {
            MeanModelKind::Sir => "sir",
            MeanModelKind::Test => "test",
        }
    );
    let _ = writeln!(meta, "population = {}", fmt_f64(job.series.population));
    if let MeanModel::Sir { init, .. } = &job.model {
        let _ = writeln!(meta, "i0 = {}", fmt_f64(init.i));
    }
    let _ = writeln!(meta, "shift_days = {}", job.shift_days);
    let _ = writeln!(meta, "seed = {}", job.seed);
    let _ = writeln!(meta, "independent_gp = {}", chain_cfg.independent_gp);
    let _ = writeln!(meta, "clamped_days = {}", job.clamped);
    let _ = writeln!(meta, "negative_state = {}", match cfg.negative_state {
        crate::sir::NegativeStateMode::Error => "error",
        crate::sir::NegativeStateMode::Clamp => "clamp",
    });
    fs::write(&art.meta, meta).map_err(|e| Error::io(&art.meta, e))?;
    Ok(())
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let mut cfg = args.common.resolve()?;
    if let Some(v) = args.burn_in {
        cfg.chain.burn_in = v;
    }
    if let Some(v) = args.samples {
        cfg.chain.samples = v;
    }
    if let Some(v) = args.thin {
        cfg.chain.thin = v;
    }
    if let Some(v) = args.shift_days {
        cfg.shift_days = v;
    }
    if args.independent_gp {
        cfg.chain.independent_gp = true;
    }
    if let Some(v) = args.jobs {
        cfg.jobs = v;
    }
    if let Some(m) = &args.mean_model {
        cfg.mean_model = if m == "sir" { MeanModelKind::Sir } else { MeanModelKind::Test };
    }
    cfg.validate()?;

    let jobs: Vec<FitJob> = if let Some(train) = &args.train {
        if cfg.mean_model == MeanModelKind::Sir && args.mean_model.is_some() {
            return Err(Error::Config(
                "--train carries no population; use the test mean model".into(),
            ));
        }
        vec![prepare_synthetic_job(train, &args.out, &cfg)?]
    } else {
        if args.cases.is_empty() {
            return Err(Error::Config("provide --train or --cases/--covariates/--population".into()));
        }
        if args.covariates.len() != args.cases.len() {
            return Err(Error::Config(format!(
                "{} --cases but {} --covariates",
                args.cases.len(),
                args.covariates.len()
            )));
        }
        if args.population.len() != args.cases.len() && args.population.len() != 1 {
            return Err(Error::Config(format!(
                "{} --cases but {} --population values",
                args.cases.len(),
                args.population.len()
            )));
        }
        if cfg.mean_model == MeanModelKind::Test {
            return Err(Error::Config(
                "the test mean model takes a --train file, not case counts".into(),
            ));
        }
        let single = args.cases.len() == 1;
        args.cases
            .iter()
            .enumerate()
            .map(|(i, cases)| {
                let pop = if args.population.len() == 1 {
                    args.population[0]
                } else {
                    args.population[i]
                };
                let out = if single {
                    args.out.clone()
                } else {
                    let stem = cases
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| format!("city_{i}"));
                    args.out.join(stem)
                };
                // distinct stream per city so parallel chains stay independent
                prepare_city_job(cases, &args.covariates[i], pop, &out, cfg.chain.seed + i as u64, &cfg)
            })
            .collect::<Result<_>>()?
    };

    run_jobs(jobs, &cfg)?;
    println!("fit complete: {}", args.out.display());
    Ok(())
}

/// Run fit jobs with at most `cfg.jobs` worker threads.
fn run_jobs(jobs: Vec<FitJob>, cfg: &RunConfig) -> Result<()> {
    if cfg.jobs <= 1 || jobs.len() <= 1 {
        for job in &jobs {
            run_fit_job(job, cfg)?;
        }
        return Ok(());
    }
    let mut results: Vec<Result<()>> = Vec::with_capacity(jobs.len());
    for batch in jobs.chunks(cfg.jobs) {
        let batch_results = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|job| scope.spawn(move || run_fit_job(job, cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("fit worker panicked"))
                .collect::<Vec<_>>()
        });
        results.extend(batch_results);
    }
    results.into_iter().collect()
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let mut cfg = args.common.resolve()?;
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    cfg.validate()?;

    let art = FitArtifacts::in_dir(&args.fit);
    art.require()?;
    let meta = read_meta(&art.meta)?;
    let chain = read_chain(&art.chain)?;
    let series = read_train_scaled(&art.train, &meta)?;
    let ranges = read_ranges(&art.ranges)?;
    let model = model_from_meta(&meta)?;

    let x_future = read_future(&args.future, &meta, &ranges, cfg.horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.chain.seed);
    let draws = predictive_samples(&x_future, &chain, &series, &model, &mut rng)?;

    let first_day = series.days.last().unwrap() + 1;
    let mut per_day = Vec::with_capacity(cfg.horizon);
    for day in 0..cfg.horizon {
        let ys: Vec<f64> = draws.iter().map(|d| d[day].y as f64).collect();
        per_day.push(summarize(&ys, cfg.quantile)?);
    }
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    write_forecast(&args.out.join("forecast.csv"), first_day, &per_day)?;
    if args.emit_draws {
        write_forecast_draws(&args.out.join("forecast_draws.csv"), first_day, &draws)?;
    }
    println!(
        "forecast for days {first_day}..{} written to {}",
        first_day + cfg.horizon - 1,
        args.out.display()
    );
    Ok(())
}

fn cmd_sensitivity(args: &SensitivityArgs) -> Result<()> {
    let cfg = args.common.resolve()?;
    let art = FitArtifacts::in_dir(&args.fit);
    art.require()?;
    let meta = read_meta(&art.meta)?;
    let chain = read_chain(&art.chain)?;
    let series = read_train_scaled(&art.train, &meta)?;
    let ranges = read_ranges(&art.ranges)?;

    let f = match cfg.factor_distribution {
        FactorChoice::Empirical => FactorDistribution::empirical(&series.x, cfg.sens_points),
        FactorChoice::Uniform => FactorDistribution::uniform_from_rows(&series.x, cfg.sens_points),
    };
    let pair_curves = match &args.pairs {
        None => Vec::new(),
        Some(spec) => parse_pairs(spec)?
            .into_iter()
            .map(|(a, b)| {
                let find = |name: &str| {
                    series
                        .factor_names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| Error::Config(format!("unknown factor {name:?}")))
                };
                let (mut j, mut k) = (find(&a)?, find(&b)?);
                if j > k {
                    std::mem::swap(&mut j, &mut k);
                }
                if j == k {
                    return Err(Error::Config(format!("pair {a}:{b} repeats a factor")));
                }
                Ok((j, k))
            })
            .collect::<Result<_>>()?,
    };
    let opts = SensitivityOptions {
        grid_points: cfg.grid_points,
        pair_grid: cfg.pair_grid,
        max_draws: cfg.max_draws,
        seed: cfg.chain.seed,
        pair_curves,
    };
    let mut report = posterior_sensitivity(&chain, &series.x, &series.factor_names, &f, &opts)?;
    // effect curves are computed on the scaled axes; write them in natural units
    for (j, grid) in report.grids.iter_mut().enumerate() {
        for v in grid.iter_mut() {
            *v = ranges.min[j] + *v * (ranges.max[j] - ranges.min[j]);
        }
    }
    for ((j, k), gj, gk, _) in &mut report.pair_surfaces {
        for v in gj.iter_mut() {
            *v = ranges.min[*j] + *v * (ranges.max[*j] - ranges.min[*j]);
        }
        for v in gk.iter_mut() {
            *v = ranges.min[*k] + *v * (ranges.max[*k] - ranges.min[*k]);
        }
    }
    write_report(&args.out, &report)?;
    println!(
        "sensitivity report ({} factors, {} pairs) written to {}",
        report.factor_names.len(),
        report.pairs.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let art = FitArtifacts::in_dir(&args.fit);
    art.require()?;
    let meta = read_meta(&art.meta)?;
    let chain = read_chain(&art.chain)?;
    if chain.draws.is_empty() {
        return Err(Error::EmptyDraws);
    }

    // posterior distribution of the training-window average R0 = mean_t beta_t/gamma_t
    let r0: Vec<f64> = chain
        .draws
        .iter()
        .map(|d| {
            d.beta
                .iter()
                .zip(&d.gamma)
                .map(|(b, g)| b / g)
                .sum::<f64>()
                / d.beta.len() as f64
        })
        .collect();
    let r0_sum = summarize(&r0, 0.95)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "city: {}", meta_get(&meta, "city")?);
    let _ = writeln!(summary, "mean model: {}", meta_get(&meta, "mean_model")?);
    let _ = writeln!(summary, "posterior draws: {}", chain.draws.len());
    let _ = writeln!(summary, "training days: {}", chain.n());
    let _ = writeln!(
        summary,
        "posterior mean R0 over the training window: {:.3} (95% CI [{:.3}, {:.3}])",
        r0_sum.mean, r0_sum.lo, r0_sum.hi
    );
    let acc_text = fs::read_to_string(&art.acceptance).map_err(|e| Error::io(&art.acceptance, e))?;
    let _ = writeln!(summary, "acceptance rates:");
    for line in acc_text.lines() {
        let _ = writeln!(summary, "  {line}");
    }

    let mut index: Vec<(String, PathBuf)> = vec![
        ("chain".into(), art.chain.clone()),
        ("acceptance".into(), art.acceptance.clone()),
        ("fitted".into(), art.fitted.clone()),
        ("train_scaled".into(), art.train.clone()),
        ("scaling_ranges".into(), art.ranges.clone()),
        ("meta".into(), art.meta.clone()),
    ];

    if let Some(dir) = &args.predict {
        let forecast = dir.join("forecast.csv");
        if !forecast.exists() {
            return Err(Error::MissingArtifact(forecast));
        }
        let text = fs::read_to_string(&forecast).map_err(|e| Error::io(&forecast, e))?;
        let days = text.lines().skip(1).filter(|l| !l.trim().is_empty()).count();
        let _ = writeln!(summary, "forecast: {days} days ({})", forecast.display());
        index.push(("forecast".into(), forecast));
        let fd = dir.join("forecast_draws.csv");
        if fd.exists() {
            index.push(("forecast_draws".into(), fd));
        }
    } else {
        let _ = writeln!(summary, "forecast: not run");
    }

    if let Some(dir) = &args.sensitivity {
        let main_idx = dir.join("indices_main.csv");
        if !main_idx.exists() {
            return Err(Error::MissingArtifact(main_idx));
        }
        let (names, medians) = median_indices(&main_idx)?;
        let _ = writeln!(summary, "sensitivity (median first-order Sobol index):");
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| medians[b].partial_cmp(&medians[a]).unwrap());
        for &j in &order {
            let _ = writeln!(summary, "  {} {:.3}", names[j], medians[j]);
        }
        index.push(("indices_main".into(), main_idx));
        for name in ["m0_draws.csv", "indices_interaction.csv"] {
            let p = dir.join(name);
            if p.exists() {
                index.push((name.trim_end_matches(".csv").into(), p));
            }
        }
    } else {
        let _ = writeln!(summary, "sensitivity: not run");
    }

    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let sp = args.out.join("summary.txt");
    fs::write(&sp, &summary).map_err(|e| Error::io(&sp, e))?;
    let mut idx = String::from("artifact,path\n");
    for (name, path) in &index {
        let _ = writeln!(idx, "{name},{}", path.display());
    }
    let ip = args.out.join("index.csv");
    fs::write(&ip, idx).map_err(|e| Error::io(&ip, e))?;
    print!("{summary}");
    Ok(())
}

/// Per-factor median of the `indices_main.csv` columns.
fn median_indices(path: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let names: Vec<String> = header
        .split(',')
        .skip(1)
        .map(|c| c.trim_start_matches("S_").to_owned())
        .collect();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        for (j, v) in line.split(',').skip(1).enumerate() {
            let v: f64 = v.trim().parse().map_err(|e: std::num::ParseFloatError| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                msg: e.to_string(),
            })?;
            if let Some(col) = cols.get_mut(j) {
                col.push(v);
            }
        }
    }
    let medians = cols
        .into_iter()
        .map(|col| summarize(&col, 0.5).map(|s| s.median))
        .collect::<Result<_>>()?;
    Ok((names, medians))
}

// ---------------------------------------------------------------------------
// fit-directory file formats

/// Write the scaled training series as `day,<factors>,y`.
fn write_train_scaled(path: &Path, series: &ObservationSeries) -> Result<()> {
    let mut out = format!("day,{},y\n", series.factor_names.join(","));
    for ((d, row), y) in series.days.iter().zip(&series.x).zip(&series.y) {
        let vals: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(out, "{d},{},{y}", vals.join(","));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn read_train_scaled(path: &Path, meta: &[(String, String)]) -> Result<ObservationSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "day" || *cols.last().unwrap() != "y" {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "expected header day,<factors>,y".into(),
        });
    }
    let factor_names: Vec<String> = cols[1..cols.len() - 1].iter().map(|s| s.to_string()).collect();
    let d = factor_names.len();
    let (mut days, mut x, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != d + 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected {} columns, got {}", d + 2, parts.len()),
            });
        }
        let perr = |e: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: e,
        };
        days.push(parts[0].trim().parse::<usize>().map_err(|e| perr(e.to_string()))?);
        let mut row = Vec::with_capacity(d);
        for p in &parts[1..=d] {
            row.push(p.trim().parse::<f64>().map_err(|e| perr(e.to_string()))?);
        }
        x.push(row);
        y.push(parts[d + 1].trim().parse::<u64>().map_err(|e| perr(e.to_string()))?);
    }
    let population: f64 = meta_get(meta, "population")?.parse().unwrap_or(0.0);
    Ok(ObservationSeries {
        days,
        dates: None,
        y,
        x,
        population,
        factor_names,
        city: meta_get(meta, "city")?.to_owned(),
    })
}

fn write_ranges(path: &Path, ranges: &ScalingRanges, names: &[String]) -> Result<()> {
    let mut out = String::from("factor,min,max\n");
    for (j, name) in names.iter().enumerate() {
        let _ = writeln!(out, "{name},{},{}", fmt_f64(ranges.min[j]), fmt_f64(ranges.max[j]));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn read_ranges(path: &Path) -> Result<ScalingRanges> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (mut min, mut max) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "expected factor,min,max".into(),
            });
        }
        let perr = |e: std::num::ParseFloatError| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: e.to_string(),
        };
        min.push(parts[1].trim().parse::<f64>().map_err(perr)?);
        max.push(parts[2].trim().parse::<f64>().map_err(perr)?);
    }
    Ok(ScalingRanges { min, max })
}

fn read_meta(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: "expected key = value".into(),
        })?;
        out.push((k.trim().to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

fn meta_get<'a>(meta: &'a [(String, String)], key: &str) -> Result<&'a str> {
    meta.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Config(format!("fit metadata is missing key {key:?}")))
}

fn model_from_meta(meta: &[(String, String)]) -> Result<MeanModel> {
    match meta_get(meta, "mean_model")? {
        "test" => Ok(MeanModel::Test),
        "sir" => {
            let population: f64 = meta_get(meta, "population")?
                .parse()
                .map_err(|_| Error::Config("bad population in fit metadata".into()))?;
            let i0: f64 = meta_get(meta, "i0")?
                .parse()
                .map_err(|_| Error::Config("bad i0 in fit metadata".into()))?;
            let mode = match meta_get(meta, "negative_state")? {
                "clamp" => crate::sir::NegativeStateMode::Clamp,
                _ => crate::sir::NegativeStateMode::Error,
            };
            Ok(MeanModel::Sir {
                init: Compartments::from_population(population, i0)?,
                mode,
            })
        }
        other => Err(Error::Config(format!("unknown mean model {other:?} in fit metadata"))),
    }
}

/// Read at least `horizon` future covariate rows, scaled with the training
/// ranges. A missing or short file is a horizon mismatch.
fn read_future(
    path: &Path,
    meta: &[(String, String)],
    ranges: &ScalingRanges,
    horizon: usize,
) -> Result<Vec<Vec<f64>>> {
    if !path.exists() {
        return Err(Error::HorizonMismatch { horizon, got: 0 });
    }
    let rows: Vec<Vec<f64>> = if meta_get(meta, "mean_model")? == "test" {
        read_synthetic(path)?.x
    } else {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: "empty file".into(),
        })?;
        let d = header.split(',').count() - 1;
        if d == 0 || !header.starts_with("date") {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: "expected header date,<factors>".into(),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != d + 1 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!("expected {} columns, got {}", d + 1, parts.len()),
                });
            }
            let mut row = Vec::with_capacity(d);
            for p in &parts[1..] {
                row.push(p.trim().parse::<f64>().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: e.to_string(),
                })?);
            }
            rows.push(ranges.scale_row(&row));
        }
        rows
    };
    if rows.len() < horizon {
        return Err(Error::HorizonMismatch {
            horizon,
            got: rows.len(),
        });
    }
    Ok(rows[..horizon].to_vec())
}
