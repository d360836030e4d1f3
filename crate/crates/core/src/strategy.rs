//! Query selection: knee-of-the-sorted-decision-curve batches, uniform random
//! batches, the two-step "big jump" schedule, and optimal stopping for that
//! two-step case.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::criteria::{alc2, stopping_objective, CriteriaError};

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("requested {requested} samples but only {available} are unlabeled")]
    InsufficientUnlabeled { requested: usize, available: usize },
    #[error("batch size must be at least 1")]
    EmptyBatch,
    #[error("length mismatch: {decision} decision values vs {mask} mask entries")]
    LengthMismatch { decision: usize, mask: usize },
    #[error("jump fraction {fraction} is degenerate for a pool of {pool}: need 0 < fraction <= 1 and fraction * T >= 1")]
    InvalidFraction { fraction: f64, pool: u64 },
    #[error("growth model has no observations")]
    EmptyModel,
    #[error("invalid growth model: {0}")]
    InvalidModel(String),
    #[error("argmax disagreement: exact form picks t = {exact}, affine form picks t = {affine}")]
    ArgmaxMismatch { exact: u64, affine: u64 },
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryRationale {
    Knee,
    Random,
    Jump,
    Mixed,
}

impl QueryRationale {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryRationale::Knee => "knee",
            QueryRationale::Random => "random",
            QueryRationale::Jump => "jump",
            QueryRationale::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryBatch {
    pub indices: Vec<usize>,
    pub rationale: QueryRationale,
}

/// Knee of an ascending-sorted curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knee {
    /// Position in the sorted order.
    pub position: usize,
    /// Set when the curve has no usable curvature and the median was taken.
    pub fallback: bool,
    /// True when the curve is flatter to the left of the knee.
    pub smoother_left: bool,
}

fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let slice = &values[i - h..=i + h];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

/// Smoothing window for a curve of `n` points: `max(5, n / 200)`.
pub fn smoothing_window(n: usize) -> usize {
    5usize.max(n / 200)
}

/// Second differences below this (in unit-normalized coordinates) count as
/// zero so that straight lines report no curvature.
const SECOND_DIFFERENCE_FLOOR: f64 = 1e-12;
const CURVATURE_RANGE_FLOOR: f64 = 1e-9;

/// Discrete curvature of `sorted` (ascending) after a centered moving
/// average and scaling both axes to `[0, 1]`. The knee is the first point of
/// maximal convex curvature, where the slow bulk of the curve turns into its
/// steep upper tail; the median position is used when there is no such bend.
pub fn detect_knee(sorted: &[f64]) -> Knee {
    let n = sorted.len();
    let median = Knee {
        position: n.saturating_sub(1) / 2,
        fallback: true,
        smoother_left: true,
    };
    if n < 3 {
        return median;
    }
    let smooth = moving_average(sorted, smoothing_window(n));
    let (lo, hi) = (smooth[0], smooth[n - 1]);
    if !(hi > lo) {
        return median;
    }
    let y: Vec<f64> = smooth.iter().map(|v| (v - lo) / (hi - lo)).collect();
    let h = 1.0 / (n - 1) as f64;
    let mut curvature = vec![0.0; n];
    for i in 1..n - 1 {
        let slope = (y[i + 1] - y[i - 1]) / (2.0 * h);
        let mut d2 = y[i + 1] - 2.0 * y[i] + y[i - 1];
        if d2.abs() < SECOND_DIFFERENCE_FLOOR {
            d2 = 0.0;
        }
        // convex bends only: where the ascending curve takes off
        curvature[i] = (d2 / (h * h)).max(0.0) / (1.0 + slope * slope).powf(1.5);
    }
    let inner = &curvature[1..n - 1];
    let max = inner.iter().cloned().fold(f64::MIN, f64::max);
    let min = inner.iter().cloned().fold(f64::MAX, f64::min);
    if max - min < CURVATURE_RANGE_FLOOR {
        return median;
    }
    let position = 1 + inner.iter().position(|&c| c == max).unwrap();

    let reach = smoothing_window(n);
    let left = position.saturating_sub(reach);
    let right = (position + reach).min(n - 1);
    let left_slope = (y[position] - y[left]) / (position - left).max(1) as f64;
    let right_slope = (y[right] - y[position]) / (right - position).max(1) as f64;
    Knee {
        position,
        fallback: false,
        smoother_left: left_slope.abs() <= right_slope.abs(),
    }
}

/// Sample indices ordered by ascending decision value (ties by index).
pub fn sorted_order(decision: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..decision.len()).collect();
    order.sort_by(|&a, &b| decision[a].total_cmp(&decision[b]));
    order
}

fn count_unlabeled(mask: &[bool]) -> usize {
    mask.iter().filter(|&&u| u).count()
}

/// Picks the `batch_size` unlabeled samples whose positions on the sorted
/// full-pool decision curve are closest to its knee.
pub fn knee_select(decision: &[f64], unlabeled: &[bool], batch_size: usize) -> Result<QueryBatch, StrategyError> {
    if decision.len() != unlabeled.len() {
        return Err(StrategyError::LengthMismatch {
            decision: decision.len(),
            mask: unlabeled.len(),
        });
    }
    if batch_size == 0 {
        return Err(StrategyError::EmptyBatch);
    }
    let available = count_unlabeled(unlabeled);
    if available < batch_size {
        return Err(StrategyError::InsufficientUnlabeled {
            requested: batch_size,
            available,
        });
    }
    let order = sorted_order(decision);
    let sorted: Vec<f64> = order.iter().map(|&i| decision[i]).collect();
    let knee = detect_knee(&sorted);

    let mut candidates: Vec<(usize, usize, bool)> = order
        .iter()
        .enumerate()
        .filter(|(_, &i)| unlabeled[i])
        .map(|(pos, &i)| {
            let on_smooth_side = if knee.smoother_left {
                pos <= knee.position
            } else {
                pos >= knee.position
            };
            (pos.abs_diff(knee.position), i, !on_smooth_side)
        })
        .collect();
    candidates.sort_by_key(|&(dist, _, rough)| (dist, rough));
    Ok(QueryBatch {
        indices: candidates[..batch_size].iter().map(|c| c.1).collect(),
        rationale: QueryRationale::Knee,
    })
}

/// Uniform draw without replacement from the unlabeled samples.
pub fn random_select(unlabeled: &[bool], batch_size: usize, seed: u64) -> Result<QueryBatch, StrategyError> {
    if batch_size == 0 {
        return Err(StrategyError::EmptyBatch);
    }
    let pool: Vec<usize> = (0..unlabeled.len()).filter(|&i| unlabeled[i]).collect();
    if pool.len() < batch_size {
        return Err(StrategyError::InsufficientUnlabeled {
            requested: batch_size,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = index::sample(&mut rng, pool.len(), batch_size)
        .into_iter()
        .map(|j| pool[j])
        .collect();
    indices.sort_unstable();
    Ok(QueryBatch {
        indices,
        rationale: QueryRationale::Random,
    })
}

/// Request sizes of the two-step strategy: the seed label, then
/// `round(fraction * T)` random labels (capped so the total stays within
/// `T`).
pub fn jump_strategy(fraction: f64, pool_size: u64) -> Result<Vec<u64>, StrategyError> {
    let invalid = StrategyError::InvalidFraction {
        fraction,
        pool: pool_size,
    };
    if !(fraction > 0.0 && fraction <= 1.0) || fraction * (pool_size as f64) < 1.0 || pool_size < 2 {
        return Err(invalid);
    }
    let jump = ((fraction * pool_size as f64).round() as u64).min(pool_size - 1);
    Ok(vec![1, jump])
}

/// Share of a batch that is drawn at random instead of around the knee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomMix {
    /// Random share of the first purchase (step 2).
    pub initial: f64,
    /// First step that is fully knee-driven.
    pub pure_from_step: usize,
}

impl Default for RandomMix {
    fn default() -> Self {
        Self {
            initial: 0.5,
            pure_from_step: 5,
        }
    }
}

impl RandomMix {
    pub const NONE: RandomMix = RandomMix {
        initial: 0.0,
        pure_from_step: 2,
    };

    /// Random share at 1-based trajectory step `step` (purchases start at 2);
    /// halves every step.
    pub fn fraction_at(&self, step: usize) -> f64 {
        if step < 2 || step >= self.pure_from_step {
            return 0.0;
        }
        self.initial * 0.5f64.powi(step as i32 - 2)
    }
}

/// Knee selection with a random share, drawn first from the unlabeled
/// samples; the remainder is knee-selected among what is left.
pub fn mixed_select(
    decision: &[f64],
    unlabeled: &[bool],
    batch_size: usize,
    random_fraction: f64,
    seed: u64,
) -> Result<QueryBatch, StrategyError> {
    let n_random = ((random_fraction * batch_size as f64).round() as usize).min(batch_size);
    if n_random == 0 {
        return knee_select(decision, unlabeled, batch_size);
    }
    let random = random_select(unlabeled, n_random, seed)?;
    if n_random == batch_size {
        return Ok(random);
    }
    let mut remaining = unlabeled.to_vec();
    for &i in &random.indices {
        remaining[i] = false;
    }
    let knee = knee_select(decision, &remaining, batch_size - n_random)?;
    let mut indices = random.indices;
    indices.extend(knee.indices);
    Ok(QueryBatch {
        indices,
        rationale: QueryRationale::Mixed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthKind {
    /// Piecewise-linear through the observations, constant outside them.
    TableInterpolation,
    /// `min(1, scale * t / (t + half_point))`.
    Saturating { scale: f64, half_point: f64 },
}

/// AUC reached as a function of the number of labels bought in one jump.
#[derive(Debug, Clone, PartialEq)]
pub struct AucGrowthModel {
    observed: Vec<(u64, f64)>,
    kind: GrowthKind,
}

impl AucGrowthModel {
    pub fn table(observed: Vec<(u64, f64)>) -> Result<Self, StrategyError> {
        if observed.is_empty() {
            return Err(StrategyError::EmptyModel);
        }
        for w in observed.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(StrategyError::InvalidModel("t must be strictly increasing".into()));
            }
        }
        if let Some(p) = observed.iter().find(|p| !(0.0..=1.0).contains(&p.1)) {
            return Err(StrategyError::InvalidModel(format!("AUC {} outside [0, 1]", p.1)));
        }
        Ok(Self {
            observed,
            kind: GrowthKind::TableInterpolation,
        })
    }

    pub fn saturating(scale: f64, half_point: f64) -> Result<Self, StrategyError> {
        if !(scale > 0.0 && scale.is_finite()) || !(half_point >= 0.0 && half_point.is_finite()) {
            return Err(StrategyError::InvalidModel(format!(
                "saturating model needs scale > 0 and half_point >= 0 (got {scale}, {half_point})"
            )));
        }
        Ok(Self {
            observed: Vec::new(),
            kind: GrowthKind::Saturating { scale, half_point },
        })
    }

    /// Least-squares fit of `scale * t / (t + half_point)` to the
    /// observations: closed form in `scale`, log-grid search in
    /// `half_point`.
    pub fn fit_saturating(observed: Vec<(u64, f64)>) -> Result<Self, StrategyError> {
        let table = Self::table(observed)?;
        let mut best = (f64::INFINITY, 1.0, 0.0);
        for k in 0..=600 {
            let half_point = 10f64.powf(k as f64 / 100.0) - 1.0;
            let g: Vec<f64> = table.observed.iter().map(|&(t, _)| t as f64 / (t as f64 + half_point)).collect();
            let gg: f64 = g.iter().map(|v| v * v).sum();
            let gy: f64 = g.iter().zip(&table.observed).map(|(v, p)| v * p.1).sum();
            let scale = gy / gg;
            let sse: f64 = g.iter().zip(&table.observed).map(|(v, p)| (scale * v - p.1).powi(2)).sum();
            if sse < best.0 {
                best = (sse, scale, half_point);
            }
        }
        Ok(Self {
            observed: table.observed,
            kind: GrowthKind::Saturating {
                scale: best.1,
                half_point: best.2,
            },
        })
    }

    pub fn kind(&self) -> GrowthKind {
        self.kind
    }

    pub fn observed(&self) -> &[(u64, f64)] {
        &self.observed
    }

    pub fn auc_at(&self, t: u64) -> f64 {
        match self.kind {
            GrowthKind::Saturating { scale, half_point } => {
                (scale * t as f64 / (t as f64 + half_point)).clamp(0.0, 1.0)
            }
            GrowthKind::TableInterpolation => {
                let obs = &self.observed;
                if t <= obs[0].0 {
                    return obs[0].1;
                }
                let last = obs[obs.len() - 1];
                if t >= last.0 {
                    return last.1;
                }
                let k = obs.partition_point(|p| p.0 <= t);
                let (t0, a0) = obs[k - 1];
                let (t1, a1) = obs[k];
                a0 + (a1 - a0) * (t - t0) as f64 / (t1 - t0) as f64
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingPoint {
    pub t_star: u64,
    pub alc2_star: f64,
    pub objective_star: f64,
}

const EXHAUSTIVE_GRID_LIMIT: u64 = 100_000;
const GEOMETRIC_GRID_POINTS: usize = 10_000;

/// Candidate jump sizes: every integer in `[2, T]` up to 1e5, else a
/// geometric grid.
pub fn stopping_grid(pool_size: u64) -> Vec<u64> {
    if pool_size <= EXHAUSTIVE_GRID_LIMIT {
        return (2..=pool_size).collect();
    }
    let (lo, hi) = (2f64.ln(), (pool_size as f64).ln());
    let mut grid: Vec<u64> = (0..GEOMETRIC_GRID_POINTS)
        .map(|k| (lo + (hi - lo) * k as f64 / (GEOMETRIC_GRID_POINTS - 1) as f64).exp().round() as u64)
        .map(|t| t.clamp(2, pool_size))
        .collect();
    grid.dedup();
    grid
}

/// First index of the maximum.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn maximize_over(grid: &[u64], model: &AucGrowthModel, auc1: f64, pool_size: u64) -> Result<(usize, usize, Vec<f64>), StrategyError> {
    let exact: Vec<f64> = grid
        .iter()
        .map(|&t| alc2(auc1, model.auc_at(t), t, pool_size))
        .collect::<Result<_, _>>()?;
    let affine: Vec<f64> = grid
        .iter()
        .map(|&t| stopping_objective(auc1, model.auc_at(t), t, pool_size))
        .collect();
    Ok((argmax(&exact), argmax(&affine), exact))
}

/// The jump size maximizing the two-step ALC under `model`. The exact
/// two-step score and its affine stopping objective are both maximized and
/// must agree on the argmax.
pub fn optimal_stop(model: &AucGrowthModel, auc1: f64, pool_size: u64) -> Result<StoppingPoint, StrategyError> {
    if model.kind == GrowthKind::TableInterpolation && model.observed.is_empty() {
        return Err(StrategyError::EmptyModel);
    }
    if pool_size < 2 {
        return Err(CriteriaError::PoolTooSmall(pool_size).into());
    }
    let mut grid = stopping_grid(pool_size);
    let (mut exact_i, mut affine_i, _) = maximize_over(&grid, model, auc1, pool_size)?;
    if exact_i == affine_i && pool_size > EXHAUSTIVE_GRID_LIMIT {
        // refine between the neighbours of the coarse maximum
        let lo = grid[exact_i.saturating_sub(1)];
        let hi = grid[(exact_i + 1).min(grid.len() - 1)];
        grid = (lo..=hi).collect();
        (exact_i, affine_i, _) = maximize_over(&grid, model, auc1, pool_size)?;
    }
    if exact_i != affine_i {
        return Err(StrategyError::ArgmaxMismatch {
            exact: grid[exact_i],
            affine: grid[affine_i],
        });
    }
    let t_star = grid[exact_i];
    let auc2 = model.auc_at(t_star);
    Ok(StoppingPoint {
        t_star,
        alc2_star: alc2(auc1, auc2, t_star, pool_size)?,
        objective_star: stopping_objective(auc1, auc2, t_star, pool_size),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knee_on_two_plateaus() {
        let mut decision = vec![0.0; 90];
        decision.extend(vec![1.0; 10]);
        let unlabeled = vec![true; 100];
        let batch = knee_select(&decision, &unlabeled, 6).unwrap();
        assert_eq!(batch.rationale, QueryRationale::Knee);
        assert_eq!(batch.indices.len(), 6);
        // sorted position equals sample index here
        for &i in &batch.indices {
            assert!((83..=95).contains(&i), "index {i} is not near the plateau boundary");
        }
    }

    #[test]
    fn knee_falls_back_to_median_on_lines() {
        for n in [11usize, 1_000, 20_000] {
            let line: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 - 7.0).collect();
            let knee = detect_knee(&line);
            assert!(knee.fallback, "n = {n}");
            assert_eq!(knee.position, (n - 1) / 2);
        }
        let knee = detect_knee(&[2.0; 50]);
        assert!(knee.fallback);
    }

    #[test]
    fn knee_matches_analytic_curvature_maximum() {
        // y = exp(a (x - 1)) on [0, 1], normalized to [0, 1]:
        // curvature c a^2 e / (1 + (c a e)^2)^1.5 peaks where c a e = 1/sqrt(2).
        let a = 10.0f64;
        let n = 1001usize;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (a * (x - 1.0)).exp()).collect();
        let e0 = (-a).exp();
        let c = 1.0 / (1.0 - e0);
        // c a (exp(a(x-1))) = 1/sqrt(2), ignoring the e0 shift which only
        // affects the vertical offset
        let x_star = 1.0 + (1.0 / (2f64.sqrt() * c * a)).ln() / a;
        let analytic = x_star * (n - 1) as f64;
        let knee = detect_knee(&ys);
        assert!(!knee.fallback);
        assert!(
            (knee.position as f64 - analytic).abs() <= 2.0,
            "knee at {} vs analytic {analytic}",
            knee.position
        );
    }

    #[test]
    fn knee_select_skips_labeled() {
        let decision: Vec<f64> = (0..200).map(|i| ((i as f64) / 20.0).exp()).collect();
        let mut unlabeled = vec![true; 200];
        let first = knee_select(&decision, &unlabeled, 10).unwrap();
        for &i in &first.indices {
            unlabeled[i] = false;
        }
        let second = knee_select(&decision, &unlabeled, 10).unwrap();
        assert!(second.indices.iter().all(|&i| unlabeled[i]));
        assert!(matches!(
            knee_select(&decision, &vec![false; 200], 1),
            Err(StrategyError::InsufficientUnlabeled { .. })
        ));
    }

    #[test]
    fn random_select_cases() {
        let mut unlabeled = vec![true; 10];
        unlabeled[3] = false;
        let all = random_select(&unlabeled, 9, 1).unwrap();
        assert_eq!(all.indices, vec![0, 1, 2, 4, 5, 6, 7, 8, 9]);
        assert_eq!(random_select(&unlabeled, 4, 12).unwrap(), random_select(&unlabeled, 4, 12).unwrap());
        assert!(matches!(
            random_select(&unlabeled, 10, 1),
            Err(StrategyError::InsufficientUnlabeled { requested: 10, available: 9 })
        ));
        assert_eq!(random_select(&unlabeled, 0, 1), Err(StrategyError::EmptyBatch));
    }

    #[test]
    fn random_select_is_uniform() {
        let unlabeled = vec![true; 10];
        let mut counts = [0usize; 10];
        let draws = 10_000;
        for seed in 0..draws {
            counts[random_select(&unlabeled, 1, seed).unwrap().indices[0]] += 1;
        }
        // binomial(10^4, 0.1): sd = 30
        let expected = draws as f64 / 10.0;
        let sd = (draws as f64 * 0.1 * 0.9).sqrt();
        let mut chi2 = 0.0;
        for &c in &counts {
            assert!((c as f64 - expected).abs() <= 3.0 * sd, "{counts:?}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // chi-square, 9 dof: 99.9th percentile is 27.88
        assert!(chi2 < 27.88, "chi2 = {chi2}");
    }

    #[test]
    fn jump_schedules() {
        assert_eq!(jump_strategy(0.044, 25_000).unwrap(), vec![1, 1100]);
        assert_eq!(jump_strategy(1.0, 500).unwrap().iter().sum::<u64>(), 500);
        assert_eq!(jump_strategy(0.05, 20_000).unwrap().iter().sum::<u64>(), 1001);
        assert!(jump_strategy(0.0, 100).is_err());
        assert!(jump_strategy(1.5, 100).is_err());
        assert!(jump_strategy(0.001, 100).is_err());
    }

    #[test]
    fn random_mix_halves() {
        let mix = RandomMix::default();
        assert_eq!(mix.fraction_at(1), 0.0);
        assert_eq!(mix.fraction_at(2), 0.5);
        assert_eq!(mix.fraction_at(3), 0.25);
        assert_eq!(mix.fraction_at(4), 0.125);
        assert_eq!(mix.fraction_at(5), 0.0);
        assert_eq!(RandomMix::NONE.fraction_at(2), 0.0);
    }

    #[test]
    fn mixed_select_combines_without_overlap() {
        let decision: Vec<f64> = (0..300).map(|i| ((i % 97) as f64).powi(2)).collect();
        let unlabeled = vec![true; 300];
        let batch = mixed_select(&decision, &unlabeled, 20, 0.5, 4).unwrap();
        assert_eq!(batch.rationale, QueryRationale::Mixed);
        let mut idx = batch.indices.clone();
        idx.sort_unstable();
        idx.dedup();
        assert_eq!(idx.len(), 20);
    }

    #[test]
    fn growth_model_interpolates() {
        let m = AucGrowthModel::table(vec![(10, 0.6), (20, 0.8)]).unwrap();
        assert_eq!(m.auc_at(1), 0.6);
        assert!((m.auc_at(15) - 0.7).abs() < 1e-15);
        assert_eq!(m.auc_at(1000), 0.8);
        assert_eq!(AucGrowthModel::table(vec![]), Err(StrategyError::EmptyModel));
        assert!(AucGrowthModel::table(vec![(5, 0.5), (5, 0.6)]).is_err());
    }

    #[test]
    fn fit_saturating_recovers_parameters() {
        let truth = AucGrowthModel::saturating(0.95, 99.0).unwrap();
        let obs: Vec<(u64, f64)> = [5u64, 20, 50, 100, 300, 1000, 4000].iter().map(|&t| (t, truth.auc_at(t))).collect();
        let fit = AucGrowthModel::fit_saturating(obs).unwrap();
        match fit.kind() {
            GrowthKind::Saturating { scale, half_point } => {
                assert!((scale - 0.95).abs() < 1e-2, "{scale}");
                assert!((half_point - 99.0).abs() < 5.0, "{half_point}");
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn constant_growth_stops_immediately() {
        let m = AucGrowthModel::table(vec![(1, 0.9)]).unwrap();
        let stop = optimal_stop(&m, 0.6, 5000).unwrap();
        assert_eq!(stop.t_star, 2);
        assert!((stop.alc2_star - alc2(0.6, 0.9, 2, 5000).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn step_growth_stops_at_the_step() {
        let (auc1, t0) = (0.55, 700);
        let m = AucGrowthModel::table(vec![(t0 - 1, auc1), (t0, 1.0)]).unwrap();
        assert_eq!(optimal_stop(&m, auc1, 10_000).unwrap().t_star, t0);
    }

    #[test]
    fn saturating_growth_matches_exhaustive_sweep() {
        let m = AucGrowthModel::saturating(0.97, 150.0).unwrap();
        let (auc1, pool) = (0.58, 20_000);
        let stop = optimal_stop(&m, auc1, pool).unwrap();
        let mut best = (0u64, f64::MIN);
        for t in 2..=pool {
            let a2 = 0.97 * t as f64 / (t as f64 + 150.0);
            let v = 2.0 / (pool as f64).log2()
                * (0.5 * (auc1 + a2) * (t as f64).log2() + a2 * (pool as f64 / t as f64).log2())
                - 1.0;
            if v > best.1 {
                best = (t, v);
            }
        }
        assert_eq!(stop.t_star, best.0);
        assert!((stop.alc2_star - best.1).abs() < 1e-12);
    }

    #[test]
    fn large_pool_uses_refined_geometric_grid() {
        let grid = stopping_grid(1_000_000);
        assert!(grid.len() <= GEOMETRIC_GRID_POINTS);
        assert_eq!(*grid.first().unwrap(), 2);
        assert_eq!(*grid.last().unwrap(), 1_000_000);
        let m = AucGrowthModel::saturating(0.97, 400.0).unwrap();
        let stop = optimal_stop(&m, 0.6, 1_000_000).unwrap();
        let neighbours = [stop.t_star - 1, stop.t_star + 1];
        for t in neighbours {
            assert!(alc2(0.6, m.auc_at(t), t, 1_000_000).unwrap() <= stop.alc2_star);
        }
    }
}
