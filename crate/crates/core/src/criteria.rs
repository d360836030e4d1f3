//! Learning-curve criteria: the ALC, its per-step weight
//! decomposition, the two-point special case and its stopping objective,
//! and the two replacements that ignore (or flatly penalize) the cold-start
//! period: the truncated ALC and the Q criterion.
//!
//! All arithmetic is `f64`; the ALC-family scores live in `[-1, 1]`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::curve_model::LearningTrajectory;

#[derive(Debug, Error, PartialEq)]
pub enum CriteriaError {
    #[error("AUC undefined: labels contain a single class")]
    SingleClass,
    #[error("length mismatch: {scores} scores vs {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("score at index {index} is not finite")]
    NonFiniteScore { index: usize },
    #[error("total pool size must be at least 2 (log2(T) = 0 for T = {0})")]
    PoolTooSmall(u64),
    #[error("second label count t2 = {t2} must satisfy 1 < t2 <= T = {pool}")]
    InvalidSecondPoint { t2: u64, pool: u64 },
    #[error("AUC {0} is outside [0, 1]")]
    AucOutOfRange(f64),
    #[error("need at least {need} steps, trajectory has {got}")]
    TooFewSteps { need: usize, got: usize },
    #[error("label threshold delta must be >= 1 (got {0})")]
    InvalidDelta(f64),
    #[error("trajectory ends before delta = {delta} (last t = {last_t})")]
    EndsBeforeDelta { delta: f64, last_t: u64 },
    #[error("invalid criterion parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate calibration: {0}")]
    DegenerateCalibration(String),
}

/// ROC AUC in Mann-Whitney form with average ranks for ties:
/// `P(s+ > s-) + P(s+ = s-)/2`.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64, CriteriaError> {
    if scores.len() != labels.len() {
        return Err(CriteriaError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(CriteriaError::NonFiniteScore { index });
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(CriteriaError::SingleClass);
    }
    let ranks = average_ranks(scores);
    // Ranks are half-integers, so this sum is exact.
    let rank_sum: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(r, _)| r)
        .sum();
    let p = positives as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

fn log2_pool(total_pool_size: u64) -> Result<f64, CriteriaError> {
    if total_pool_size < 2 {
        return Err(CriteriaError::PoolTooSmall(total_pool_size));
    }
    Ok((total_pool_size as f64).log2())
}

/// Area under the learning curve, with `AUC_{N+1} = AUC_N` and
/// `t_{N+1} = T`, mapped affinely onto `[-1, 1]`.
pub fn alc(trajectory: &LearningTrajectory) -> Result<f64, CriteriaError> {
    let log_t = log2_pool(trajectory.total_pool_size())?;
    let first = trajectory.steps()[0].cumulative_labels;
    if first != 1 {
        return Ok(2.0 * weighted_area(trajectory, 0.0) / log_t - 1.0);
    }
    // The weights telescope to log2 T, so only the excess over the final
    // AUC needs summing; constant curves come out exact.
    let last = trajectory.last().auc;
    Ok(2.0 * last - 1.0 + 2.0 * weighted_area(trajectory, last) / log_t)
}

/// `sum_i (AUC^_i - baseline) * log2(t_{i+1}/t_i)`.
fn weighted_area(trajectory: &LearningTrajectory, baseline: f64) -> f64 {
    let steps = trajectory.steps();
    trajectory
        .log_ratios()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let next = steps.get(i + 1).map_or(steps[i].auc, |s| s.auc);
            (0.5 * (steps[i].auc + next) - baseline) * w
        })
        .sum()
}

/// `log2(1 + 1/(i - 1))`: the weight of step `i >= 2` when every request
/// after the first has the same size as the second cumulative count.
pub fn weight_function(i: usize) -> f64 {
    assert!(i >= 2, "weight function is defined for i >= 2");
    (1.0 + 1.0 / (i - 1) as f64).log2()
}

/// Per-step ALC weights and averaged AUCs.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDecomposition {
    /// `log2(t_2 / t_1)`; equals `log2(n_2 + 1)` when `t_1 = 1`.
    pub first_weight: f64,
    /// `log2(t_{i+1} / t_i)` for `i = 2..N-1`.
    pub middle_weights: Vec<f64>,
    /// `log2(T / t_N)`.
    pub last_weight: f64,
    /// `(AUC_i + AUC_{i+1}) / 2` for `i = 1..N-1`.
    pub averaged_aucs: Vec<f64>,
    pub last_auc: f64,
    pub total_pool_size: u64,
}

impl WeightDecomposition {
    pub fn weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.middle_weights.len() + 2);
        w.push(self.first_weight);
        w.extend_from_slice(&self.middle_weights);
        w.push(self.last_weight);
        w
    }

    /// Unscaled score: `AUC^_1 w_1 + sum AUC^_i w_i + AUC_N w_N`.
    pub fn weighted_sum(&self) -> f64 {
        let mut sum = self.averaged_aucs[0] * self.first_weight;
        for (a, w) in self.averaged_aucs[1..].iter().zip(&self.middle_weights) {
            sum += a * w;
        }
        sum + self.last_auc * self.last_weight
    }

    pub fn reconstruct_alc(&self) -> Result<f64, CriteriaError> {
        Ok(2.0 * self.weighted_sum() / log2_pool(self.total_pool_size)? - 1.0)
    }

    /// True when the first label is the single seed and the middle weights
    /// coincide with [`weight_function`] (every request after the first
    /// equal to `t_2`).
    pub fn follows_constant_stride(&self, tolerance: f64) -> bool {
        self.middle_weights
            .iter()
            .enumerate()
            .all(|(k, w)| (w - weight_function(k + 2)).abs() <= tolerance)
    }
}

pub fn decompose_weights(trajectory: &LearningTrajectory) -> Result<WeightDecomposition, CriteriaError> {
    let n = trajectory.len();
    if n < 2 {
        return Err(CriteriaError::TooFewSteps { need: 2, got: n });
    }
    let aucs = trajectory.aucs();
    let ratios = trajectory.log_ratios();
    Ok(WeightDecomposition {
        first_weight: ratios[0],
        middle_weights: ratios[1..n - 1].to_vec(),
        last_weight: ratios[n - 1],
        averaged_aucs: aucs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
        last_auc: aucs[n - 1],
        total_pool_size: trajectory.total_pool_size(),
    })
}

fn check_auc(a: f64) -> Result<(), CriteriaError> {
    if (0.0..=1.0).contains(&a) {
        Ok(())
    } else {
        Err(CriteriaError::AucOutOfRange(a))
    }
}

/// ALC of the two-point curve: one seed label, then a jump to `t2` labels.
pub fn alc2(auc1: f64, auc2: f64, t2: u64, total_pool_size: u64) -> Result<f64, CriteriaError> {
    check_auc(auc1)?;
    check_auc(auc2)?;
    if t2 <= 1 || t2 > total_pool_size {
        return Err(CriteriaError::InvalidSecondPoint {
            t2,
            pool: total_pool_size,
        });
    }
    let log_t = log2_pool(total_pool_size)?;
    let log_t2 = (t2 as f64).log2();
    let tail = (total_pool_size as f64 / t2 as f64).log2();
    Ok(2.0 / log_t * (0.5 * (auc1 + auc2) * log_t2 + auc2 * tail) - 1.0)
}

/// The stopping objective `(log2 t / 2)(AUC_1 - AUC_2) + AUC_2 log2 T`,
/// an affine image of [`alc2`]: `alc2 = 2 * objective / log2 T - 1`.
pub fn stopping_objective(auc1: f64, auc2: f64, t: u64, total_pool_size: u64) -> f64 {
    0.5 * (t as f64).log2() * (auc1 - auc2) + auc2 * (total_pool_size as f64).log2()
}

/// `alc2` evaluated at every first-step AUC of `auc1_grid`.
pub fn alc2_sweep(
    auc1_grid: &[f64],
    auc2: f64,
    t2: u64,
    total_pool_size: u64,
) -> Result<Vec<(f64, f64)>, CriteriaError> {
    auc1_grid
        .iter()
        .map(|&a| Ok((a, alc2(a, auc2, t2, total_pool_size)?)))
        .collect()
}

/// `min(0.01 T, 200)`.
pub fn default_delta(total_pool_size: u64) -> f64 {
    (0.01 * total_pool_size as f64).min(200.0)
}

/// ALC of the sub-curve with `t_i >= delta`, renormalized by the log-span
/// `log2(T / t_start)` it covers, where `t_start` is the first counted
/// label count. When the first counted point is already at `T` the score
/// is `2 AUC_N - 1`.
pub fn truncated_alc(trajectory: &LearningTrajectory, delta: f64) -> Result<f64, CriteriaError> {
    if !(delta >= 1.0) {
        return Err(CriteriaError::InvalidDelta(delta));
    }
    let restricted = trajectory
        .restricted_from(delta)
        .ok_or(CriteriaError::EndsBeforeDelta {
            delta,
            last_t: trajectory.last().cumulative_labels,
        })?;
    let t_start = restricted.steps()[0].cumulative_labels;
    let span = (trajectory.total_pool_size() as f64 / t_start as f64).log2();
    let last = restricted.last().auc;
    if span == 0.0 {
        return Ok(2.0 * last - 1.0);
    }
    Ok(2.0 * last - 1.0 + 2.0 * weighted_area(&restricted, last) / span)
}

/// Parameters of the Q criterion and its calibration anchors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionParams {
    /// Label-count threshold below which every solution is penalized equally.
    pub delta: f64,
    /// Penalty slope beyond `delta`.
    pub alpha: f64,
    /// Calibration horizon: the label count at which `anchor_b` is expected.
    pub horizon: f64,
    /// Expected AUC at `delta`.
    pub anchor_a: f64,
    /// Expected AUC at `horizon`.
    pub anchor_b: f64,
}

impl CriterionParams {
    /// `delta = min(0.01 T, 200)`, `horizon = 0.2 T`, `B = 1.5 A`, with
    /// `alpha` calibrated so both anchors score equally.
    pub fn calibrated_defaults(total_pool_size: u64) -> Result<Self, CriteriaError> {
        let delta = default_delta(total_pool_size);
        let horizon = 0.2 * total_pool_size as f64;
        Self::calibrated(delta, horizon, 0.6, 0.9)
    }

    pub fn calibrated(delta: f64, horizon: f64, anchor_a: f64, anchor_b: f64) -> Result<Self, CriteriaError> {
        let alpha = calibrate_alpha(delta, horizon, anchor_a, anchor_b)?;
        Ok(Self {
            delta,
            alpha,
            horizon,
            anchor_a,
            anchor_b,
        })
    }

    pub fn validate(&self, total_pool_size: u64) -> Result<(), CriteriaError> {
        let bad = |m: String| Err(CriteriaError::InvalidParams(m));
        if !(self.delta > 0.0) {
            return bad(format!("delta must be positive (got {})", self.delta));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be positive and finite (got {})", self.alpha));
        }
        if !(self.horizon > self.delta) || self.horizon > total_pool_size as f64 {
            return bad(format!(
                "need delta < horizon <= T (delta = {}, horizon = {}, T = {total_pool_size})",
                self.delta, self.horizon
            ));
        }
        if !(0.0..=1.0).contains(&self.anchor_a) || !(0.0..=1.0).contains(&self.anchor_b) {
            return bad("anchors must lie in [0, 1]".into());
        }
        if self.anchor_b < self.anchor_a {
            return bad(format!(
                "anchor B ({}) must be >= anchor A ({})",
                self.anchor_b, self.anchor_a
            ));
        }
        Ok(())
    }
}

/// `alpha = delta / (horizon - delta) * (B / A - 1)`, the slope that makes
/// `(delta, A)` and `(horizon, B)` score equally under the Q criterion.
pub fn calibrate_alpha(delta: f64, horizon: f64, anchor_a: f64, anchor_b: f64) -> Result<f64, CriteriaError> {
    if !(delta > 0.0) || !(horizon > delta) {
        return Err(CriteriaError::DegenerateCalibration(format!(
            "need 0 < delta < horizon (delta = {delta}, horizon = {horizon})"
        )));
    }
    if !(anchor_a > 0.0) {
        return Err(CriteriaError::DegenerateCalibration(format!(
            "anchor A must be positive (got {anchor_a})"
        )));
    }
    let alpha = delta / (horizon - delta) * (anchor_b / anchor_a - 1.0);
    if !(alpha > 0.0) {
        return Err(CriteriaError::DegenerateCalibration(format!(
            "alpha = {alpha} is not positive; anchor B must exceed anchor A"
        )));
    }
    Ok(alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QScore {
    pub q_max: f64,
    /// 0-based index of the (first) maximizing step.
    pub best_step: usize,
    pub per_step: Vec<f64>,
}

/// `delta * AUC / (delta + alpha * max(0, t - delta))`.
pub fn q_value(auc: f64, labels: f64, delta: f64, alpha: f64) -> f64 {
    delta * auc / (delta + alpha * (labels - delta).max(0.0))
}

pub fn q_criterion(trajectory: &LearningTrajectory, params: &CriterionParams) -> Result<QScore, CriteriaError> {
    params.validate(trajectory.total_pool_size())?;
    let per_step: Vec<f64> = trajectory
        .steps()
        .iter()
        .map(|s| q_value(s.auc, s.cumulative_labels as f64, params.delta, params.alpha))
        .collect();
    let mut best_step = 0;
    for (i, &q) in per_step.iter().enumerate() {
        if q > per_step[best_step] {
            best_step = i;
        }
    }
    Ok(QScore {
        q_max: per_step[best_step],
        best_step,
        per_step,
    })
}

/// ALC before and after replacing `AUC_2` with `(AUC_1 + AUC_3) / 2`.
pub fn second_point_sensitivity(trajectory: &LearningTrajectory) -> Result<(f64, f64), CriteriaError> {
    if trajectory.len() < 3 {
        return Err(CriteriaError::TooFewSteps {
            need: 3,
            got: trajectory.len(),
        });
    }
    let aucs = trajectory.aucs();
    let patched = trajectory
        .with_auc(1, 0.5 * (aucs[0] + aucs[2]))
        .expect("mean of two valid AUCs is a valid AUC");
    Ok((alc(trajectory)?, alc(&patched)?))
}

/// Two-column CSV with a header row; reals use 17 significant digits.
pub fn xy_table(x_name: &str, y_name: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{x_name},{y_name}\n");
    for (x, y) in rows {
        writeln!(
            out,
            "{},{}",
            crate::curve_model::format_real(*x),
            crate::curve_model::format_real(*y)
        )
        .unwrap();
    }
    out
}

/// `(i, w_i)` for `i = 2..=max_index`.
pub fn weight_function_table(max_index: usize) -> Vec<(f64, f64)> {
    (2..=max_index).map(|i| (i as f64, weight_function(i))).collect()
}

/// `(t_i, q_i)` per step.
pub fn q_curve(trajectory: &LearningTrajectory, params: &CriterionParams) -> Result<Vec<(f64, f64)>, CriteriaError> {
    let score = q_criterion(trajectory, params)?;
    Ok(trajectory
        .steps()
        .iter()
        .zip(score.per_step)
        .map(|(s, q)| (s.cumulative_labels as f64, q))
        .collect())
}
