//! `alc`: evaluate learning-curve trajectories, sweep and compare criteria,
//! simulate active-learning runs on synthetic pools.

mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alc_core::criteria::{
    alc, alc2, alc2_sweep, decompose_weights, default_delta, q_criterion, truncated_alc, xy_table, CriteriaError,
    CriterionParams,
};
use alc_core::curve_model::{format_real, LearningTrajectory, ValidationOptions};
use alc_core::simulator::{
    generate_pool, parse_seeds, render_comparison_tsv, render_replicates_tsv, run_simulation, stepped_schedule,
    LearnerConfig, PathologySetup, Pool, QueryPolicy, StrategyOutcome, SyntheticSpec,
};
use alc_core::strategy::{jump_strategy, RandomMix};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use svg::{LinePlot, Series};

#[derive(Parser)]
#[command(name = "alc", version, about = "Area-under-learning-curve criteria for active learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one trajectory file: ALC, weights, truncated ALC and Q.
    Evaluate(EvaluateArgs),
    /// Two-step ALC as a function of the first AUC.
    BinarySweep(SweepArgs),
    /// Score several trajectory files side by side.
    CriteriaCompare(CompareArgs),
    /// Run one strategy on a pool and write its trajectory.
    Simulate(SimulateArgs),
    /// Write a synthetic two-Gaussian pool as CSV.
    GenData(GenDataArgs),
    /// Jump-versus-knee comparison over one or more seeds.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct CriterionArgs {
    /// Label threshold for the truncated ALC and the Q criterion [default: min(0.01 T, 200)].
    #[arg(long)]
    delta: Option<f64>,
    /// Q penalty slope; overrides calibration.
    #[arg(long, conflicts_with = "calibrate")]
    alpha: Option<f64>,
    /// Calibrate the Q slope from anchors A and B at labels delta and Delta.
    #[arg(long, num_args = 3, value_names = ["A", "B", "DELTA"], allow_negative_numbers = true)]
    calibrate: Option<Vec<f64>>,
}

impl CriterionArgs {
    fn resolve(&self, pool_size: u64) -> Result<(f64, CriterionParams, String)> {
        let delta = self.delta.unwrap_or_else(|| default_delta(pool_size));
        let defaults = CriterionParams::calibrated_defaults(pool_size)?;
        let (params, how) = match (&self.alpha, &self.calibrate) {
            (Some(alpha), _) => (
                CriterionParams {
                    delta,
                    alpha: *alpha,
                    ..defaults
                },
                "given".to_string(),
            ),
            (None, Some(c)) => (
                CriterionParams::calibrated(delta, c[2], c[0], c[1])?,
                format!("calibrated A={} B={} Delta={}", c[0], c[1], c[2]),
            ),
            (None, None) => (
                CriterionParams::calibrated(delta, defaults.horizon, defaults.anchor_a, defaults.anchor_b)?,
                format!(
                    "calibrated A={} B={} Delta={}",
                    defaults.anchor_a, defaults.anchor_b, defaults.horizon
                ),
            ),
        };
        params.validate(pool_size)?;
        Ok((delta, params, how))
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// Trajectory CSV (`# T=<pool size>`, then `step,n,t,auc`).
    #[arg(long)]
    input: PathBuf,
    /// Report file [default: stdout].
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the pool size recorded in the file.
    #[arg(long = "T")]
    pool_size: Option<u64>,
    #[command(flatten)]
    criterion: CriterionArgs,
    /// Write the per-step weight decomposition as CSV.
    #[arg(long)]
    emit_weights: Option<PathBuf>,
    /// Write the learning curve as SVG (plus `-q.svg` for the Q curve; points in `-data.csv`).
    #[arg(long)]
    emit_svg: Option<PathBuf>,
    /// Accept trajectories whose first request is not a single label.
    #[arg(long)]
    relax_first: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// AUC after the jump.
    #[arg(long)]
    auc2: f64,
    /// Label count after the jump.
    #[arg(long)]
    t2: u64,
    #[arg(long = "T")]
    pool_size: u64,
    #[arg(long, default_value_t = 0.0)]
    grid_start: f64,
    #[arg(long, default_value_t = 1.0)]
    grid_end: f64,
    #[arg(long, default_value_t = 101)]
    grid_points: usize,
    /// Extra first-AUC values, comma separated; rows stay sorted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    grid_values: Vec<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    emit_svg: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Trajectory CSV files; may be repeated.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    criterion: CriterionArgs,
    /// Write all learning curves as SVG (plus `-q.svg` for the Q curves).
    #[arg(long)]
    emit_svg: Option<PathBuf>,
    #[arg(long)]
    relax_first: bool,
}

#[derive(Args, Clone)]
struct PoolArgs {
    #[arg(long, default_value_t = 5000)]
    n_samples: usize,
    /// Informative features.
    #[arg(long, default_value_t = 5)]
    n_features: usize,
    #[arg(long, default_value_t = 0.05)]
    positive_fraction: f64,
    /// Euclidean distance between the class means.
    #[arg(long, default_value_t = 3.0)]
    separation: f64,
    #[arg(long, default_value_t = 50)]
    noise_features: usize,
}

impl PoolArgs {
    fn spec(&self, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            n_samples: self.n_samples,
            n_features: self.n_features,
            positive_fraction: self.positive_fraction,
            class_separation: self.separation,
            noise_features: self.noise_features,
            seed,
        }
    }

    fn describe(&self) -> String {
        format!(
            "n_samples={} n_features={} positive_fraction={} separation={} noise_features={}",
            self.n_samples, self.n_features, self.positive_fraction, self.separation, self.noise_features
        )
    }
}

#[derive(Args, Clone)]
struct LearnerArgs {
    /// Revealed labels at which the cold-start scorer hands over to the linear one.
    #[arg(long, default_value_t = 30)]
    switch_threshold: usize,
    #[arg(long, default_value_t = 1.0)]
    ridge: f64,
}

impl LearnerArgs {
    fn config(&self) -> LearnerConfig {
        LearnerConfig {
            switch_threshold: self.switch_threshold,
            ridge_penalty: self.ridge,
            ..LearnerConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Knee,
    Random,
    Jump,
}

#[derive(Args)]
struct SimulateArgs {
    /// Pool CSV; without it a pool is generated from the pool flags and seed.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    pool: PoolArgs,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long, value_enum, default_value_t = StrategyName::Jump)]
    strategy: StrategyName,
    /// Jump size as a share of the pool; also sets the default budget.
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    /// Labels per purchase for knee and random.
    #[arg(long, default_value_t = 10)]
    step: u64,
    /// Total labels for knee and random [default: the jump's total].
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    emit_svg: Option<PathBuf>,
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    pool: PoolArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    pool: PoolArgs,
    #[command(flatten)]
    learner: LearnerArgs,
    /// Jump size as a share of the pool; the knee gets the same budget.
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    #[arg(long, default_value_t = 10)]
    knee_step: u64,
    /// Truncation threshold for the truncated ALC.
    #[arg(long, default_value_t = 200.0)]
    delta: f64,
    #[arg(long, conflicts_with = "calibrate")]
    alpha: Option<f64>,
    #[arg(long, num_args = 3, value_names = ["A", "B", "DELTA"])]
    calibrate: Option<Vec<f64>>,
    /// File with one seed per line (`#` comments allowed).
    #[arg(long, conflicts_with = "seed")]
    seeds_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Learning curves of the first seed as SVG (plus `-q.svg`).
    #[arg(long)]
    emit_svg: Option<PathBuf>,
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

/// Writes the SVG at `path` and the plotted points next to it as
/// `<stem>-data.csv`.
fn write_plot(path: &Path, plot: &LinePlot) -> Result<()> {
    fs::write(path, plot.render()).with_context(|| format!("writing {}", path.display()))?;
    let mut csv = String::from("series,x,y\n");
    for s in &plot.series {
        for (x, y) in &s.points {
            writeln!(csv, "{},{},{}", s.name, format_real(*x), format_real(*y))?;
        }
    }
    let csv_path = sibling(path, "-data", "csv");
    fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))
}

fn curve_plots(named: &[(String, &LearningTrajectory)], params: &CriterionParams) -> Result<(LinePlot, LinePlot)> {
    let mut curves = Vec::new();
    let mut qs = Vec::new();
    for (name, tr) in named {
        curves.push(Series {
            name: name.clone(),
            points: tr.steps().iter().map(|s| (s.cumulative_labels as f64, s.auc)).collect(),
        });
        qs.push(Series {
            name: name.clone(),
            points: alc_core::criteria::q_curve(tr, params)?,
        });
    }
    Ok((
        LinePlot {
            title: "Learning curve".into(),
            x_label: "labels".into(),
            y_label: "AUC".into(),
            log2_x: true,
            series: curves,
        },
        LinePlot {
            title: format!("Q (delta = {}, alpha = {:.6})", params.delta, params.alpha),
            x_label: "labels".into(),
            y_label: "Q".into(),
            log2_x: true,
            series: qs,
        },
    ))
}

fn write_curve_plots(path: &Path, named: &[(String, &LearningTrajectory)], params: &CriterionParams) -> Result<()> {
    let (curve, q) = curve_plots(named, params)?;
    write_plot(path, &curve)?;
    write_plot(&sibling(path, "-q", "svg"), &q)
}

fn read_trajectory(path: &Path, relax_first: bool, pool_size: Option<u64>) -> Result<LearningTrajectory> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let options = ValidationOptions { relax_first };
    let tr = LearningTrajectory::parse_csv(&text, options).with_context(|| format!("parsing {}", path.display()))?;
    match pool_size {
        Some(t) if t != tr.total_pool_size() => {
            let raw: Vec<(u64, f64)> = tr.steps().iter().map(|s| (s.request_size, s.auc)).collect();
            Ok(LearningTrajectory::from_requests_with(&raw, t, options)?)
        }
        _ => Ok(tr),
    }
}

/// Two-step ALC with the first and final AUC at the final label count.
fn alc2_equivalent(tr: &LearningTrajectory) -> Result<Option<f64>> {
    let last = tr.last();
    if last.cumulative_labels <= 1 || last.cumulative_labels > tr.total_pool_size() {
        return Ok(None);
    }
    Ok(Some(alc2(tr.steps()[0].auc, last.auc, last.cumulative_labels, tr.total_pool_size())?))
}

fn truncated_or_na(tr: &LearningTrajectory, delta: f64, label: &str) -> Result<String> {
    match truncated_alc(tr, delta) {
        Ok(v) => Ok(format!("{v:.6}")),
        Err(e @ CriteriaError::EndsBeforeDelta { .. }) => {
            eprintln!("warning: {label}: {e}");
            Ok("NA".into())
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let tr = read_trajectory(&args.input, args.relax_first, args.pool_size)?;
    let t = tr.total_pool_size();
    let (delta, params, how) = args.criterion.resolve(t)?;
    let q = q_criterion(&tr, &params)?;
    let last = tr.last();

    let mut out = String::new();
    writeln!(out, "# alc evaluate")?;
    writeln!(out, "# input = {}", args.input.display())?;
    writeln!(out, "# T = {t}")?;
    writeln!(out, "# delta = {delta}")?;
    writeln!(out, "# alpha = {} ({how})", format_real(params.alpha))?;
    writeln!(out, "metric\tvalue")?;
    writeln!(out, "Steps\t{}", tr.len())?;
    writeln!(out, "Used samples\t{}", last.cumulative_labels)?;
    writeln!(out, "AUC₁\t{:.6}", tr.steps()[0].auc)?;
    writeln!(out, "AUC\t{:.6}", last.auc)?;
    writeln!(out, "ALC\t{:.6}", alc(&tr)?)?;
    if let Some(v) = alc2_equivalent(&tr)? {
        writeln!(out, "ALC₂\t{v:.6}")?;
    }
    writeln!(out, "Truncated ALC\t{}", truncated_or_na(&tr, delta, "truncated ALC")?)?;
    writeln!(out, "Q\t{:.6}", q.q_max)?;
    writeln!(out, "Q best t\t{}", tr.steps()[q.best_step].cumulative_labels)?;

    let mut weights_csv = String::from("step,t,weight,auc\n");
    match decompose_weights(&tr) {
        Ok(d) => {
            writeln!(out, "Last weight\t{:.4}", d.last_weight)?;
            writeln!(out)?;
            writeln!(out, "step\tt\tweight\tauc")?;
            let aucs = d.averaged_aucs.iter().chain(std::iter::once(&d.last_auc));
            for ((k, (w, a)), s) in d.weights().iter().zip(aucs).enumerate().zip(tr.steps()) {
                writeln!(out, "{}\t{}\t{w:.4}\t{a:.4}", k + 1, s.cumulative_labels)?;
                writeln!(weights_csv, "{},{},{},{}", k + 1, s.cumulative_labels, format_real(*w), format_real(*a))?;
            }
        }
        Err(CriteriaError::TooFewSteps { .. }) => {
            let w = (t as f64 / last.cumulative_labels as f64).log2();
            writeln!(out, "Last weight\t{w:.4}")?;
            writeln!(weights_csv, "1,{},{},{}", last.cumulative_labels, format_real(w), format_real(last.auc))?;
        }
        Err(e) => return Err(e.into()),
    }
    emit(args.output.as_deref(), &out)?;
    if let Some(p) = &args.emit_weights {
        fs::write(p, weights_csv).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &args.emit_svg {
        write_curve_plots(p, &[("trajectory".into(), &tr)], &params)?;
    }
    Ok(())
}

fn cmd_binary_sweep(args: &SweepArgs) -> Result<()> {
    if args.grid_points < 2 && args.grid_values.is_empty() {
        bail!("need --grid-points >= 2 or explicit --grid-values");
    }
    let mut grid: Vec<f64> = if args.grid_points >= 2 {
        (0..args.grid_points)
            .map(|k| args.grid_start + (args.grid_end - args.grid_start) * k as f64 / (args.grid_points - 1) as f64)
            .collect()
    } else {
        Vec::new()
    };
    grid.extend(&args.grid_values);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let rows = alc2_sweep(&grid, args.auc2, args.t2, args.pool_size)?;

    let mut out = String::new();
    writeln!(out, "# alc binary-sweep")?;
    writeln!(out, "# auc2 = {} t2 = {} T = {}", args.auc2, args.t2, args.pool_size)?;
    out.push_str(&xy_table("auc1", "alc2", &rows));
    emit(args.output.as_deref(), &out)?;
    if let Some(p) = &args.emit_svg {
        write_plot(
            p,
            &LinePlot {
                title: format!("Two-step ALC (AUC₂ = {}, t₂ = {}, T = {})", args.auc2, args.t2, args.pool_size),
                x_label: "AUC₁".into(),
                y_label: "ALC₂".into(),
                log2_x: false,
                series: vec![Series {
                    name: "ALC₂".into(),
                    points: rows,
                }],
            },
        )?;
    }
    Ok(())
}

fn cmd_criteria_compare(args: &CompareArgs) -> Result<()> {
    let trajectories: Vec<LearningTrajectory> = args
        .input
        .iter()
        .map(|p| read_trajectory(p, args.relax_first, None))
        .collect::<Result<_>>()?;

    let mut out = String::new();
    writeln!(out, "# alc criteria-compare")?;
    let mut resolved = Vec::new();
    writeln!(out, "input\tT\tsteps\tused\tauc1\tauc\talc\talc2\ttruncated_alc\tq\tq_best_t\tdelta\talpha")?;
    for (path, tr) in args.input.iter().zip(&trajectories) {
        let t = tr.total_pool_size();
        let (delta, params, _) = args.criterion.resolve(t)?;
        let q = q_criterion(tr, &params)?;
        let label = path.display().to_string();
        writeln!(
            out,
            "{label}\t{t}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{:.6}\t{}\t{delta}\t{}",
            tr.len(),
            tr.last().cumulative_labels,
            tr.steps()[0].auc,
            tr.last().auc,
            alc(tr)?,
            alc2_equivalent(tr)?.map_or("NA".into(), |v| format!("{v:.6}")),
            truncated_or_na(tr, delta, &label)?,
            q.q_max,
            tr.steps()[q.best_step].cumulative_labels,
            format_real(params.alpha),
        )?;
        resolved.push(params);
    }
    emit(args.output.as_deref(), &out)?;
    if let Some(p) = &args.emit_svg {
        let (mut curves, mut qs) = (Vec::new(), Vec::new());
        for ((path, tr), params) in args.input.iter().zip(&trajectories).zip(&resolved) {
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let (c, q) = curve_plots(&[(name, tr)], params)?;
            curves.extend(c.series);
            qs.extend(q.series);
        }
        let (mut curve_plot, mut q_plot) = curve_plots(&[], &resolved[0])?;
        curve_plot.series = curves;
        q_plot.series = qs;
        q_plot.title = "Q".into();
        write_plot(p, &curve_plot)?;
        write_plot(&sibling(p, "-q", "svg"), &q_plot)?;
    }
    Ok(())
}

fn load_or_generate(input: Option<&Path>, pool: &PoolArgs, seed: u64) -> Result<(Pool, String)> {
    match input {
        Some(p) => Ok((
            Pool::read_csv(p).with_context(|| format!("reading pool {}", p.display()))?,
            format!("pool = {}", p.display()),
        )),
        None => Ok((generate_pool(&pool.spec(seed))?, format!("pool = generated {} seed={seed}", pool.describe()))),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (pool, pool_line) = load_or_generate(args.input.as_deref(), &args.pool, args.seed)?;
    let t = pool.len() as u64;
    let jump = jump_strategy(args.fraction, t)?;
    let budget = args.budget.unwrap_or_else(|| jump.iter().sum());
    let (policy, schedule, strategy_line) = match args.strategy {
        StrategyName::Jump => (QueryPolicy::Jump, jump, format!("strategy = jump fraction={}", args.fraction)),
        StrategyName::Knee => {
            let mix = RandomMix::default();
            (
                QueryPolicy::Knee { mix },
                stepped_schedule(args.step, budget)?,
                format!(
                    "strategy = knee step={} budget={budget} mix_initial={} mix_pure_from_step={}",
                    args.step, mix.initial, mix.pure_from_step
                ),
            )
        }
        StrategyName::Random => (
            QueryPolicy::Random,
            stepped_schedule(args.step, budget)?,
            format!("strategy = random step={} budget={budget}", args.step),
        ),
    };
    let config = args.learner.config();
    let run = run_simulation(&pool, policy, &config, &schedule, args.seed)?;
    for step in &run.flagged_steps {
        eprintln!("warning: fit failed at step {step}; previous decision carried forward");
    }

    let csv = run.trajectory.to_csv_string();
    let (first, rest) = csv.split_once('\n').expect("trajectory CSV has a pool-size line");
    let mut out = format!("{first}\n");
    writeln!(out, "# alc simulate")?;
    writeln!(out, "# {pool_line}")?;
    writeln!(out, "# {strategy_line}")?;
    writeln!(
        out,
        "# learner = switch_threshold={} ridge={}",
        config.switch_threshold, config.ridge_penalty
    )?;
    writeln!(out, "# seed = {}", args.seed)?;
    writeln!(out, "# flagged_steps = {:?}", run.flagged_steps)?;
    out.push_str(rest);
    emit(args.output.as_deref(), &out)?;
    if let Some(p) = &args.emit_svg {
        let params = CriterionParams::calibrated_defaults(t)?;
        write_curve_plots(p, &[(strategy_name(args.strategy).into(), &run.trajectory)], &params)?;
    }
    Ok(())
}

fn strategy_name(s: StrategyName) -> &'static str {
    match s {
        StrategyName::Knee => "knee",
        StrategyName::Random => "random",
        StrategyName::Jump => "jump",
    }
}

fn cmd_gen_data(args: &GenDataArgs) -> Result<()> {
    let pool = generate_pool(&args.pool.spec(args.seed))?;
    let comments = vec![
        "alc gen-data".to_string(),
        format!("{} seed={}", args.pool.describe(), args.seed),
    ];
    emit(args.output.as_deref(), &pool.to_csv_string(&comments))
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let seeds = match &args.seeds_file {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_seeds(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => vec![args.seed],
    };
    if seeds.is_empty() {
        bail!("no seeds given");
    }
    let t = args.pool.n_samples as u64;
    let q_params = match (&args.alpha, &args.calibrate) {
        (Some(alpha), _) => Some(CriterionParams {
            alpha: *alpha,
            ..CriterionParams::calibrated_defaults(t)?
        }),
        (None, Some(c)) => Some(CriterionParams::calibrated(default_delta(t), c[2], c[0], c[1])?),
        (None, None) => None,
    };
    let setup = PathologySetup {
        pool: args.pool.spec(0),
        jump_fraction: args.fraction,
        knee_step: args.knee_step,
        learner: args.learner.config(),
        truncation_delta: args.delta,
        q_params,
        ..PathologySetup::default()
    };
    let scoring = setup.scoring()?;
    let summary = setup.run(&seeds)?;

    let seed_list: Vec<String> = seeds.iter().map(u64::to_string).collect();
    let mut comments = vec![
        "alc report".to_string(),
        format!("pool = {}", args.pool.describe()),
        format!(
            "jump fraction = {}, knee step = {}, mix_initial = {}, mix_pure_from_step = {}",
            setup.jump_fraction, setup.knee_step, setup.mix.initial, setup.mix.pure_from_step
        ),
        format!(
            "learner = switch_threshold={} ridge={}",
            setup.learner.switch_threshold, setup.learner.ridge_penalty
        ),
        format!(
            "truncation delta = {}, Q delta = {}, Q alpha = {}",
            scoring.truncation_delta,
            scoring.q_params.delta,
            format_real(scoring.q_params.alpha)
        ),
        format!("seeds = {}", seed_list.join(",")),
        format!("jump ALC >= knee ALC: {}/{}", summary.jump_alc_wins, summary.runs),
        format!(
            "knee truncated ALC >= jump truncated ALC: {}/{}",
            summary.knee_truncated_wins, summary.runs
        ),
        format!("knee Q >= jump Q: {}/{}", summary.knee_q_wins, summary.runs),
    ];
    let text = if seeds.len() == 1 {
        render_comparison_tsv(&summary.outcomes, &comments)
    } else {
        comments.push("one row per seed and strategy".into());
        render_replicates_tsv(&summary.outcomes, &comments)
    };
    emit(args.output.as_deref(), &text)?;

    if let Some(p) = &args.emit_svg {
        let first: Vec<&StrategyOutcome> = summary.outcomes.iter().filter(|o| o.seed == seeds[0]).collect();
        let named: Vec<(String, &LearningTrajectory)> = first
            .iter()
            .map(|o| (format!("{} (seed {})", o.name, o.seed), &o.run.trajectory))
            .collect();
        write_curve_plots(p, &named, &scoring.q_params)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::BinarySweep(a) => cmd_binary_sweep(a),
        Command::CriteriaCompare(a) => cmd_criteria_compare(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::GenData(a) => cmd_gen_data(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// The error chain joined by `: `, skipping links that the previous message
/// already ends with (library errors embed their source).
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    let mut prev = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if !prev.ends_with(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
        prev = msg;
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}
