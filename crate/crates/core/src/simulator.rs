//! Active-learning replay on synthetic pools.
//!
//! A run starts with one revealed positive, buys labels batch by batch
//! according to a schedule, refits the scorer after every purchase, and
//! records the AUC of the full-pool decision vector against the hidden
//! labels. The result is a [`LearningTrajectory`] that the criteria consume.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::criteria::{self, alc, alc2, auc, q_criterion, truncated_alc, CriteriaError, CriterionParams};
use crate::curve_model::{format_real, LearningTrajectory, TrajectoryError};
use crate::learner::{
    bootstrap_score_labeled, linear_fit, top_features, wilcoxon_scores, BootstrapConfig, LearnerError, Matrix,
};
use crate::strategy::{jump_strategy, mixed_select, random_select, QueryBatch, QueryRationale, RandomMix, StrategyError};

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("pool has no positive sample to seed the run")]
    NoPositive,
    #[error("cold-start scorer failed: {0}")]
    ColdStart(LearnerError),
    #[error("holdout of {requested} exceeds the {available} unrevealed samples")]
    HoldoutTooLarge { requested: usize, available: usize },
    #[error("holdout stayed single-class after {0} draws")]
    SingleClassHoldout(usize),
    #[error("need at least two strategies to compare")]
    TooFewStrategies,
    #[error("pool file line {line}: {reason}")]
    PoolFormat { line: usize, reason: String },
    #[error("strategy: {0}")]
    Strategy(#[from] StrategyError),
    #[error("criteria: {0}")]
    Criteria(#[from] CriteriaError),
    #[error("trajectory: {0}")]
    Trajectory(#[from] TrajectoryError),
    #[error("learner: {0}")]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Two Gaussian classes with unit covariance. The class means differ by
/// `class_separation` (Euclidean), spread evenly over the informative
/// features; `noise_features` standard-normal columns are appended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub n_features: usize,
    pub positive_fraction: f64,
    pub class_separation: f64,
    pub noise_features: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn positives(&self) -> usize {
        (self.positive_fraction * self.n_samples as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let bad = |m: String| Err(SimulationError::InvalidSpec(m));
        if self.n_samples < 10 {
            return bad(format!("n_samples must be >= 10 (got {})", self.n_samples));
        }
        if self.n_features == 0 {
            return bad("n_features must be >= 1".into());
        }
        if !(self.positive_fraction > 0.0 && self.positive_fraction < 1.0) {
            return bad(format!("positive_fraction must lie in (0, 1) (got {})", self.positive_fraction));
        }
        let p = self.positives();
        if p == 0 || p == self.n_samples {
            return bad(format!("{p} positives out of {} is a single class", self.n_samples));
        }
        if !(self.class_separation >= 0.0) || !self.class_separation.is_finite() {
            return bad(format!("class_separation must be >= 0 (got {})", self.class_separation));
        }
        Ok(())
    }
}

/// Features plus hidden labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    pub features: Matrix,
    pub labels: Vec<bool>,
}

impl Pool {
    pub fn new(features: Matrix, labels: Vec<bool>) -> Result<Self, SimulationError> {
        if features.rows() != labels.len() {
            return Err(LearnerError::LengthMismatch {
                left: features.rows(),
                right: labels.len(),
            }
            .into());
        }
        Ok(Self { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Header `label,f1,...,fk`, one row per sample, optional leading
    /// `#` comment lines.
    pub fn to_csv_string(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            writeln!(out, "# {c}").unwrap();
        }
        out.push_str("label");
        for j in 1..=self.features.cols() {
            write!(out, ",f{j}").unwrap();
        }
        out.push('\n');
        for i in 0..self.len() {
            out.push(if self.labels[i] { '1' } else { '0' });
            for v in self.features.row(i) {
                out.push(',');
                out.push_str(&format_real(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self, SimulationError> {
        let mut cols = None;
        let mut labels = Vec::new();
        let mut data = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') || line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let Some(k) = cols else {
                let expected: Vec<String> =
                    std::iter::once("label".to_string()).chain((1..fields.len()).map(|j| format!("f{j}"))).collect();
                if fields.len() < 2 || fields != expected {
                    return Err(SimulationError::PoolFormat {
                        line: line_no,
                        reason: format!("header must be `label,f1,...,fk`, found `{line}`"),
                    });
                }
                cols = Some(fields.len() - 1);
                continue;
            };
            if fields.len() != k + 1 {
                return Err(SimulationError::PoolFormat {
                    line: line_no,
                    reason: format!("expected {} fields, found {}", k + 1, fields.len()),
                });
            }
            labels.push(match fields[0] {
                "1" => true,
                "0" => false,
                other => {
                    return Err(SimulationError::PoolFormat {
                        line: line_no,
                        reason: format!("label must be 0 or 1, found `{other}`"),
                    })
                }
            });
            for f in &fields[1..] {
                data.push(f.parse::<f64>().map_err(|e| SimulationError::PoolFormat {
                    line: line_no,
                    reason: format!("bad feature `{f}`: {e}"),
                })?);
            }
        }
        let cols = cols.ok_or(SimulationError::PoolFormat {
            line: 1,
            reason: "missing header".into(),
        })?;
        let features = Matrix::new(labels.len(), cols, data)?;
        Pool::new(features, labels)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self, SimulationError> {
        Self::parse_csv(&fs::read_to_string(path)?)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, comments: &[String]) -> Result<(), SimulationError> {
        fs::write(path, self.to_csv_string(comments))?;
        Ok(())
    }
}

pub fn generate_pool(spec: &SyntheticSpec) -> Result<Pool, SimulationError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_samples;
    let mut labels = vec![false; n];
    for i in index::sample(&mut rng, n, spec.positives()) {
        labels[i] = true;
    }
    let shift = spec.class_separation / (spec.n_features as f64).sqrt();
    let cols = spec.n_features + spec.noise_features;
    let mut data = Vec::with_capacity(n * cols);
    for &positive in &labels {
        for j in 0..cols {
            let z: f64 = StandardNormal.sample(&mut rng);
            let mean = if positive && j < spec.n_features { shift } else { 0.0 };
            data.push(mean + z);
        }
    }
    Pool::new(Matrix::new(n, cols, data)?, labels)
}

/// Simulation state: what has been bought and the latest decision vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPool {
    pub revealed: Vec<bool>,
    pub decision: Vec<f64>,
    pub purchase_log: Vec<QueryBatch>,
}

impl ScoredPool {
    /// Reveals one positive chosen uniformly by `seed`.
    pub fn initialize(pool: &Pool, seed: u64) -> Result<Self, SimulationError> {
        let positives: Vec<usize> = (0..pool.len()).filter(|&i| pool.labels[i]).collect();
        if positives.is_empty() {
            return Err(SimulationError::NoPositive);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, Purpose::SeedPositive, 0));
        let pick = positives[index::sample(&mut rng, positives.len(), 1).index(0)];
        let mut revealed = vec![false; pool.len()];
        revealed[pick] = true;
        Ok(Self {
            revealed,
            decision: vec![0.0; pool.len()],
            purchase_log: vec![QueryBatch {
                indices: vec![pick],
                rationale: QueryRationale::Random,
            }],
        })
    }

    pub fn revealed_count(&self) -> usize {
        self.revealed.iter().filter(|&&r| r).count()
    }

    pub fn unrevealed_mask(&self) -> Vec<bool> {
        self.revealed.iter().map(|r| !r).collect()
    }

    fn reveal(&mut self, batch: QueryBatch) {
        for &i in &batch.indices {
            debug_assert!(!self.revealed[i]);
            self.revealed[i] = true;
        }
        self.purchase_log.push(batch);
    }
}

#[derive(Clone, Copy)]
enum Purpose {
    SeedPositive = 1,
    Query = 2,
    Bootstrap = 3,
    Holdout = 4,
}

/// Independent sub-seed per (purpose, step), so that strategies sharing a
/// seed share their cold start.
fn sub_seed(seed: u64, purpose: Purpose, step: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 32) | step);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    /// Revealed-label count at which the cold-start scorer gives way to the
    /// linear scorer.
    pub switch_threshold: usize,
    pub ridge_penalty: f64,
    pub bootstrap: BootstrapConfig,
    /// Keep only the best features by Wilcoxon score on the revealed rows.
    pub top_features: Option<usize>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            switch_threshold: 30,
            ridge_penalty: 1.0,
            bootstrap: BootstrapConfig::default(),
            top_features: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueryPolicy {
    Knee { mix: RandomMix },
    Random,
    /// Random selection, reported as a jump.
    Jump,
}

impl QueryPolicy {
    fn select(&self, state: &ScoredPool, batch_size: usize, step: usize, seed: u64) -> Result<QueryBatch, StrategyError> {
        let unlabeled = state.unrevealed_mask();
        let query_seed = sub_seed(seed, Purpose::Query, step as u64);
        match self {
            QueryPolicy::Knee { mix } => {
                mixed_select(&state.decision, &unlabeled, batch_size, mix.fraction_at(step), query_seed)
            }
            QueryPolicy::Random => random_select(&unlabeled, batch_size, query_seed),
            QueryPolicy::Jump => random_select(&unlabeled, batch_size, query_seed).map(|b| QueryBatch {
                rationale: QueryRationale::Jump,
                ..b
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub trajectory: LearningTrajectory,
    /// 1-based steps whose fit failed and reused the previous decision.
    pub flagged_steps: Vec<usize>,
    /// Revealed count after every step.
    pub revealed_counts: Vec<usize>,
    /// Share of positives among the revealed labels at the end.
    pub revealed_positive_share: f64,
    pub state: ScoredPool,
}

fn fit_decision(pool: &Pool, state: &ScoredPool, config: &LearnerConfig, seed: u64, step: usize) -> Result<Vec<f64>, LearnerError> {
    let revealed: Vec<usize> = (0..pool.len()).filter(|&i| state.revealed[i]).collect();
    if revealed.len() < config.switch_threshold {
        let positives: Vec<usize> = revealed.iter().copied().filter(|&i| pool.labels[i]).collect();
        let negatives: Vec<usize> = revealed.iter().copied().filter(|&i| !pool.labels[i]).collect();
        if positives.is_empty() {
            return Err(LearnerError::SingleClass);
        }
        let boot_seed = sub_seed(seed, Purpose::Bootstrap, step as u64);
        return bootstrap_score_labeled(&pool.features, &positives, &negatives, &config.bootstrap, boot_seed);
    }
    let labels: Vec<bool> = revealed.iter().map(|&i| pool.labels[i]).collect();
    let train = pool.features.select_rows(&revealed);
    match config.top_features {
        Some(k) if k < pool.features.cols() => {
            let keep = top_features(&wilcoxon_scores(&train, &labels)?, k);
            let model = linear_fit(&train.select_columns(&keep), &labels, config.ridge_penalty)?;
            Ok(model.score(&pool.features.select_columns(&keep)))
        }
        _ => Ok(linear_fit(&train, &labels, config.ridge_penalty)?.score(&pool.features)),
    }
}

/// Replays one run. `schedule` holds request sizes and must start with the
/// single seed label.
pub fn run_simulation(
    pool: &Pool,
    policy: QueryPolicy,
    config: &LearnerConfig,
    schedule: &[u64],
    seed: u64,
) -> Result<SimulationRun, SimulationError> {
    if schedule.first() != Some(&1) {
        return Err(SimulationError::InvalidSchedule("must start with a single seed label".into()));
    }
    if schedule.contains(&0) {
        return Err(SimulationError::InvalidSchedule("request sizes must be >= 1".into()));
    }
    let total: u64 = schedule.iter().sum();
    if total > pool.len() as u64 {
        return Err(SimulationError::InvalidSchedule(format!(
            "schedule buys {total} labels from a pool of {}",
            pool.len()
        )));
    }

    let mut state = ScoredPool::initialize(pool, seed)?;
    let mut raw = Vec::with_capacity(schedule.len());
    let mut flagged_steps = Vec::new();
    let mut revealed_counts = Vec::with_capacity(schedule.len());
    for (k, &request) in schedule.iter().enumerate() {
        let step = k + 1;
        if step > 1 {
            let batch = policy.select(&state, request as usize, step, seed)?;
            state.reveal(batch);
        }
        match fit_decision(pool, &state, config, seed, step) {
            Ok(decision) => state.decision = decision,
            Err(e) if step == 1 => return Err(SimulationError::ColdStart(e)),
            Err(_) => flagged_steps.push(step),
        }
        raw.push((request, auc(&state.decision, &pool.labels)?));
        revealed_counts.push(state.revealed_count());
    }
    let revealed_positives = (0..pool.len()).filter(|&i| state.revealed[i] && pool.labels[i]).count();
    Ok(SimulationRun {
        trajectory: LearningTrajectory::from_requests(&raw, pool.len() as u64)?,
        flagged_steps,
        revealed_positive_share: revealed_positives as f64 / state.revealed_count() as f64,
        revealed_counts,
        state,
    })
}

const HOLDOUT_RETRIES: usize = 100;

/// AUC of `decision` on a uniform sample of unrevealed samples.
pub fn random_holdout_auc(
    pool: &Pool,
    state: &ScoredPool,
    decision: &[f64],
    holdout_size: usize,
    seed: u64,
) -> Result<f64, SimulationError> {
    let unrevealed: Vec<usize> = (0..pool.len()).filter(|&i| !state.revealed[i]).collect();
    if holdout_size > unrevealed.len() {
        return Err(SimulationError::HoldoutTooLarge {
            requested: holdout_size,
            available: unrevealed.len(),
        });
    }
    let subset_auc = |idx: &[usize]| {
        let s: Vec<f64> = idx.iter().map(|&i| decision[i]).collect();
        let l: Vec<bool> = idx.iter().map(|&i| pool.labels[i]).collect();
        auc(&s, &l)
    };
    if holdout_size == unrevealed.len() {
        return subset_auc(&unrevealed).map_err(|_| SimulationError::SingleClassHoldout(1));
    }
    for attempt in 0..HOLDOUT_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, Purpose::Holdout, attempt as u64));
        let idx: Vec<usize> = index::sample(&mut rng, unrevealed.len(), holdout_size)
            .into_iter()
            .map(|j| unrevealed[j])
            .collect();
        match subset_auc(&idx) {
            Ok(v) => return Ok(v),
            Err(CriteriaError::SingleClass) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(SimulationError::SingleClassHoldout(HOLDOUT_RETRIES))
}

/// A named query policy with its purchase schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub name: String,
    pub policy: QueryPolicy,
    pub schedule: Vec<u64>,
}

impl StrategySpec {
    /// Seed label plus one random jump of `round(fraction * T)`.
    pub fn jump(fraction: f64, pool_size: u64) -> Result<Self, SimulationError> {
        Ok(Self {
            name: "jump".into(),
            policy: QueryPolicy::Jump,
            schedule: jump_strategy(fraction, pool_size)?,
        })
    }

    /// Seed label plus equal steps of `step` labels until `budget` labels
    /// are bought (the last step takes the remainder).
    pub fn knee(step: u64, budget: u64, mix: RandomMix) -> Result<Self, SimulationError> {
        Ok(Self {
            name: "knee".into(),
            policy: QueryPolicy::Knee { mix },
            schedule: stepped_schedule(step, budget)?,
        })
    }

    pub fn random(step: u64, budget: u64) -> Result<Self, SimulationError> {
        Ok(Self {
            name: "random".into(),
            policy: QueryPolicy::Random,
            schedule: stepped_schedule(step, budget)?,
        })
    }
}

pub fn stepped_schedule(step: u64, budget: u64) -> Result<Vec<u64>, SimulationError> {
    if step == 0 || budget < 1 {
        return Err(SimulationError::InvalidSchedule("step and budget must be >= 1".into()));
    }
    let mut schedule = vec![1];
    let mut bought = 1;
    while bought < budget {
        let n = step.min(budget - bought);
        schedule.push(n);
        bought += n;
    }
    Ok(schedule)
}

/// Criterion settings used when scoring simulated trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    pub truncation_delta: f64,
    pub q_params: CriterionParams,
}

impl ScoringConfig {
    pub fn defaults(pool_size: u64) -> Result<Self, CriteriaError> {
        Ok(Self {
            truncation_delta: criteria::default_delta(pool_size),
            q_params: CriterionParams::calibrated_defaults(pool_size)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome {
    pub name: String,
    pub seed: u64,
    pub run: SimulationRun,
    pub alc: f64,
    /// Two-step ALC with the run's first and final AUC at its final label count.
    pub alc2_equivalent: f64,
    pub truncated_alc: f64,
    pub q: f64,
}

fn score_run(name: &str, seed: u64, run: SimulationRun, scoring: &ScoringConfig) -> Result<StrategyOutcome, SimulationError> {
    let tr = &run.trajectory;
    let first = tr.steps()[0].auc;
    let last = tr.last();
    let alc2_equivalent = if last.cumulative_labels > 1 {
        alc2(first, last.auc, last.cumulative_labels, tr.total_pool_size())?
    } else {
        alc(tr)?
    };
    Ok(StrategyOutcome {
        name: name.to_string(),
        seed,
        alc: alc(tr)?,
        alc2_equivalent,
        truncated_alc: truncated_alc(tr, scoring.truncation_delta)?,
        q: q_criterion(tr, &scoring.q_params)?.q_max,
        run,
    })
}

/// Runs every strategy on the same pool and seed.
pub fn compare_strategies(
    pool: &Pool,
    strategies: &[StrategySpec],
    config: &LearnerConfig,
    scoring: &ScoringConfig,
    seed: u64,
) -> Result<Vec<StrategyOutcome>, SimulationError> {
    if strategies.len() < 2 {
        return Err(SimulationError::TooFewStrategies);
    }
    strategies
        .iter()
        .map(|s| {
            let run = run_simulation(pool, s.policy, config, &s.schedule, seed)?;
            score_run(&s.name, seed, run, scoring)
        })
        .collect()
}

/// One pool per seed (the template's seed replaced by each entry), all
/// strategies on each. Seeds run on parallel threads; the output is sorted
/// by seed, then strategy name.
pub fn run_replicates(
    template: &SyntheticSpec,
    seeds: &[u64],
    strategies: &[StrategySpec],
    config: &LearnerConfig,
    scoring: &ScoringConfig,
) -> Result<Vec<StrategyOutcome>, SimulationError> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(seeds.len().max(1));
    let chunk = seeds.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<StrategyOutcome>, SimulationError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for &seed in part {
                        let pool = generate_pool(&SyntheticSpec { seed, ..*template })?;
                        out.extend(compare_strategies(&pool, strategies, config, scoring, seed)?);
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("replicate thread panicked")).collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.seed.cmp(&b.seed).then_with(|| a.name.cmp(&b.name)));
    Ok(rows)
}

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

/// Column-per-strategy TSV with the row names of the usual learning-curve
/// summary table.
pub fn render_comparison_tsv(outcomes: &[StrategyOutcome], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "# {c}").unwrap();
    }
    let mut header = String::from("DataSet");
    for o in outcomes {
        header.push('\t');
        header.push_str(&o.name);
    }
    out.push_str(&header);
    out.push('\n');

    let mut row = |label: &str, f: &dyn Fn(&StrategyOutcome) -> String| {
        out.push_str(label);
        for o in outcomes {
            out.push('\t');
            out.push_str(&f(o));
        }
        out.push('\n');
    };
    row("Sample size", &|o| o.run.trajectory.total_pool_size().to_string());
    row("No of submissions", &|o| o.run.trajectory.len().to_string());
    row("Used samples", &|o| o.run.trajectory.last().cumulative_labels.to_string());
    row("Percentage", &|o| {
        let tr = &o.run.trajectory;
        format!("{:.2}%", 100.0 * tr.last().cumulative_labels as f64 / tr.total_pool_size() as f64)
    });
    row("Last weight", &|o| {
        let tr = &o.run.trajectory;
        format!("{:.2}", (tr.total_pool_size() as f64 / tr.last().cumulative_labels as f64).log2())
    });
    row("Percent (positives)", &|o| format!("{:.2}%", 100.0 * o.run.revealed_positive_share));
    row("AUC₁", &|o| fmt4(o.run.trajectory.steps()[0].auc));
    row("AUC", &|o| fmt4(o.run.trajectory.last().auc));
    row("ALC", &|o| fmt4(o.alc));
    row("ALC₂", &|o| fmt4(o.alc2_equivalent));
    row("Truncated ALC", &|o| fmt4(o.truncated_alc));
    row("Q", &|o| fmt4(o.q));
    row("Flagged steps", &|o| o.run.flagged_steps.len().to_string());
    out
}

/// One line per (seed, strategy).
pub fn render_replicates_tsv(outcomes: &[StrategyOutcome], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "# {c}").unwrap();
    }
    out.push_str("seed\tstrategy\tsteps\tused\tauc1\tauc\talc\talc2\ttruncated_alc\tq\tflagged\n");
    for o in outcomes {
        let tr = &o.run.trajectory;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            o.seed,
            o.name,
            tr.len(),
            tr.last().cumulative_labels,
            fmt4(tr.steps()[0].auc),
            fmt4(tr.last().auc),
            format_real(o.alc),
            format_real(o.alc2_equivalent),
            format_real(o.truncated_alc),
            format_real(o.q),
            o.run.flagged_steps.len()
        )
        .unwrap();
    }
    out
}

/// Jump-versus-knee experiment at a matched label budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PathologySetup {
    pub pool: SyntheticSpec,
    pub jump_fraction: f64,
    pub knee_step: u64,
    pub mix: RandomMix,
    pub learner: LearnerConfig,
    /// Label threshold of the truncated ALC.
    pub truncation_delta: f64,
    /// Q parameters; `None` uses the calibrated defaults for the pool size.
    pub q_params: Option<CriterionParams>,
}

impl Default for PathologySetup {
    fn default() -> Self {
        Self {
            pool: SyntheticSpec {
                n_samples: 5000,
                n_features: 5,
                positive_fraction: 0.05,
                class_separation: 3.0,
                noise_features: 50,
                seed: 0,
            },
            jump_fraction: 0.05,
            knee_step: 10,
            mix: RandomMix::default(),
            learner: LearnerConfig::default(),
            truncation_delta: 200.0,
            q_params: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathologySummary {
    pub outcomes: Vec<StrategyOutcome>,
    pub runs: usize,
    /// Seeds where the jump's ALC is at least the knee's.
    pub jump_alc_wins: usize,
    /// Seeds where the knee's truncated ALC is at least the jump's.
    pub knee_truncated_wins: usize,
    /// Seeds where the knee's Q is at least the jump's.
    pub knee_q_wins: usize,
}

impl PathologySetup {
    pub fn strategies(&self) -> Result<Vec<StrategySpec>, SimulationError> {
        let pool_size = self.pool.n_samples as u64;
        let jump = StrategySpec::jump(self.jump_fraction, pool_size)?;
        let budget: u64 = jump.schedule.iter().sum();
        let knee = StrategySpec::knee(self.knee_step, budget, self.mix)?;
        Ok(vec![jump, knee])
    }

    pub fn scoring(&self) -> Result<ScoringConfig, SimulationError> {
        let pool_size = self.pool.n_samples as u64;
        Ok(ScoringConfig {
            truncation_delta: self.truncation_delta,
            q_params: match self.q_params {
                Some(p) => p,
                None => CriterionParams::calibrated_defaults(pool_size)?,
            },
        })
    }

    pub fn run(&self, seeds: &[u64]) -> Result<PathologySummary, SimulationError> {
        let outcomes = run_replicates(&self.pool, seeds, &self.strategies()?, &self.learner, &self.scoring()?)?;
        let mut summary = PathologySummary {
            runs: seeds.len(),
            jump_alc_wins: 0,
            knee_truncated_wins: 0,
            knee_q_wins: 0,
            outcomes: Vec::new(),
        };
        for pair in outcomes.chunks(2) {
            // sorted by name within a seed: jump, knee
            let (jump, knee) = (&pair[0], &pair[1]);
            summary.jump_alc_wins += usize::from(jump.alc >= knee.alc);
            summary.knee_truncated_wins += usize::from(knee.truncated_alc >= jump.truncated_alc);
            summary.knee_q_wins += usize::from(knee.q >= jump.q);
        }
        summary.outcomes = outcomes;
        Ok(summary)
    }
}

/// Seeds from a text file: one integer per line, `#` comments allowed.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, SimulationError> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(line, l)| {
            l.parse::<u64>().map_err(|e| SimulationError::PoolFormat {
                line,
                reason: format!("bad seed `{l}`: {e}"),
            })
        })
        .collect()
}
