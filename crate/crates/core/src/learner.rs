//! Decision-function machinery: the one-positive cold-start scorer built from
//! averaged random sets, a ridge-regularized least-squares linear scorer,
//! Wilcoxon feature ranking, and rank-aligned blending of two score vectors.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::criteria::average_ranks;

#[derive(Debug, Error, PartialEq)]
pub enum LearnerError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    Empty,
    #[error("labels contain a single class")]
    SingleClass,
    #[error("blend weight tau must lie strictly inside (0, 1), got {0}")]
    InvalidTau(f64),
    #[error("no eligible pseudo-negatives beyond the {quantile} distance quantile")]
    EmptyEligibleRegion { quantile: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("ridge penalty must be >= 0 and finite, got {0}")]
    InvalidPenalty(f64),
    #[error("normal equations are singular; use a positive ridge penalty")]
    Singular,
    #[error("sample index {index} out of range for {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },
}

/// Dense row-major sample-by-feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LearnerError> {
        if data.len() != rows * cols {
            return Err(LearnerError::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LearnerError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LearnerError::LengthMismatch { left: r.len(), right: cols });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, columns: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * columns.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(columns.iter().map(|&j| row[j]));
        }
        Matrix {
            rows: self.rows,
            cols: columns.len(),
            data,
        }
    }
}

fn check_binary(labels: &[bool]) -> Result<(), LearnerError> {
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return Err(LearnerError::SingleClass);
    }
    Ok(())
}

/// Rearranges the values of `x1` so they carry the ranking of `x2`:
/// `x3[i]` is the `r`-th smallest value of `x1`, where `r` is the rank of
/// `x2[i]` within `x2`. Ties in `x2` are ranked by original index.
pub fn rank_align(x1: &[f64], x2: &[f64]) -> Result<Vec<f64>, LearnerError> {
    if x1.len() != x2.len() {
        return Err(LearnerError::LengthMismatch {
            left: x1.len(),
            right: x2.len(),
        });
    }
    if x1.is_empty() {
        return Err(LearnerError::Empty);
    }
    let mut sorted_x1 = x1.to_vec();
    sorted_x1.sort_by(f64::total_cmp);

    let mut order: Vec<usize> = (0..x2.len()).collect();
    order.sort_by(|&a, &b| x2[a].total_cmp(&x2[b]));
    let mut x3 = vec![0.0; x1.len()];
    for (rank, &i) in order.iter().enumerate() {
        x3[i] = sorted_x1[rank];
    }
    Ok(x3)
}

/// Two solutions and their blend `x_ens = tau * x1 + (1 - tau) * x3`, where
/// `x3` is `x1`'s values rearranged to `x2`'s ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub x3: Vec<f64>,
    pub tau: f64,
    pub x_ens: Vec<f64>,
}

pub const DEFAULT_TAU: f64 = 0.5;

pub fn blend(x1: &[f64], x2: &[f64], tau: f64) -> Result<EnsembleSpec, LearnerError> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(LearnerError::InvalidTau(tau));
    }
    let x3 = rank_align(x1, x2)?;
    let x_ens = x1.iter().zip(&x3).map(|(a, b)| tau * a + (1.0 - tau) * b).collect();
    Ok(EnsembleSpec {
        x1: x1.to_vec(),
        x2: x2.to_vec(),
        x3,
        tau,
        x_ens,
    })
}

/// Scorer trained on one random set (the positives plus a set of
/// pseudo-negatives).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseScorer {
    /// `||x - c_neg|| - ||x - c_pos||`.
    #[default]
    NearestCentroid,
    /// `-||x - c_pos||`; ignores the pseudo-negatives.
    PositiveDistance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub num_sets: usize,
    pub negatives_per_set: usize,
    /// Pseudo-negatives are drawn from samples farther from the positive
    /// centroid than this quantile of all candidate distances.
    pub distance_quantile: f64,
    pub base: BaseScorer,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            num_sets: 50,
            negatives_per_set: 100,
            distance_quantile: 0.5,
            base: BaseScorer::NearestCentroid,
        }
    }
}

impl BootstrapConfig {
    fn validate(&self) -> Result<(), LearnerError> {
        if self.num_sets == 0 {
            return Err(LearnerError::InvalidConfig("num_sets must be >= 1".into()));
        }
        if self.negatives_per_set == 0 {
            return Err(LearnerError::InvalidConfig("negatives_per_set must be >= 1".into()));
        }
        if !(self.distance_quantile > 0.0 && self.distance_quantile < 1.0) {
            return Err(LearnerError::InvalidConfig(format!(
                "distance_quantile must lie in (0, 1), got {}",
                self.distance_quantile
            )));
        }
        Ok(())
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn centroid(features: &Matrix, indices: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; features.cols()];
    for &i in indices {
        for (acc, v) in c.iter_mut().zip(features.row(i)) {
            *acc += v;
        }
    }
    let n = indices.len() as f64;
    c.iter_mut().for_each(|v| *v /= n);
    c
}

fn check_indices(features: &Matrix, indices: &[usize]) -> Result<(), LearnerError> {
    match indices.iter().find(|&&i| i >= features.rows()) {
        Some(&index) => Err(LearnerError::IndexOutOfRange {
            index,
            rows: features.rows(),
        }),
        None => Ok(()),
    }
}

/// Draws `num_sets` pseudo-negative index sets. Set `k` uses its own
/// ChaCha stream `k` of `seed`, so the sets do not depend on evaluation
/// order.
pub fn draw_pseudo_negative_sets(
    features: &Matrix,
    positives: &[usize],
    known_negatives: &[usize],
    config: &BootstrapConfig,
    seed: u64,
) -> Result<Vec<Vec<usize>>, LearnerError> {
    config.validate()?;
    if positives.is_empty() {
        return Err(LearnerError::Empty);
    }
    check_indices(features, positives)?;
    check_indices(features, known_negatives)?;
    let positive_centroid = centroid(features, positives);

    let mut excluded = vec![false; features.rows()];
    for &i in positives.iter().chain(known_negatives) {
        excluded[i] = true;
    }
    let candidates: Vec<(usize, f64)> = (0..features.rows())
        .filter(|&i| !excluded[i])
        .map(|i| (i, euclidean(features.row(i), &positive_centroid)))
        .collect();
    if candidates.is_empty() {
        return Err(LearnerError::EmptyEligibleRegion {
            quantile: config.distance_quantile,
        });
    }
    let mut distances: Vec<f64> = candidates.iter().map(|c| c.1).collect();
    distances.sort_by(f64::total_cmp);
    let cut = distances[((distances.len() - 1) as f64 * config.distance_quantile).floor() as usize];
    let eligible: Vec<usize> = candidates.iter().filter(|c| c.1 > cut).map(|c| c.0).collect();
    if eligible.is_empty() {
        return Err(LearnerError::EmptyEligibleRegion {
            quantile: config.distance_quantile,
        });
    }

    let per_set = config.negatives_per_set.min(eligible.len());
    Ok((0..config.num_sets)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            index::sample(&mut rng, eligible.len(), per_set)
                .into_iter()
                .map(|j| eligible[j])
                .collect()
        })
        .collect())
}

/// Averages the base scorer over the given pseudo-negative sets.
pub fn score_with_sets(
    features: &Matrix,
    positives: &[usize],
    known_negatives: &[usize],
    sets: &[Vec<usize>],
    base: BaseScorer,
) -> Vec<f64> {
    let positive_centroid = centroid(features, positives);
    let to_positive: Vec<f64> = (0..features.rows())
        .map(|i| euclidean(features.row(i), &positive_centroid))
        .collect();
    if base == BaseScorer::PositiveDistance {
        return to_positive.iter().map(|d| -d).collect();
    }
    let mut total = vec![0.0; features.rows()];
    for set in sets {
        let members: Vec<usize> = known_negatives.iter().chain(set).copied().collect();
        let negative_centroid = centroid(features, &members);
        for (i, acc) in total.iter_mut().enumerate() {
            *acc += euclidean(features.row(i), &negative_centroid) - to_positive[i];
        }
    }
    let r = sets.len() as f64;
    total.iter().map(|s| s / r).collect()
}

/// Cold-start decision function from a single labeled positive: the average
/// over random sets of pseudo-negatives drawn far from it.
pub fn bootstrap_score(
    features: &Matrix,
    positive_index: usize,
    config: &BootstrapConfig,
    seed: u64,
) -> Result<Vec<f64>, LearnerError> {
    bootstrap_score_labeled(features, &[positive_index], &[], config, seed)
}

/// As [`bootstrap_score`], with any labels revealed so far: known negatives
/// join every set and the positive centroid is the mean of all positives.
pub fn bootstrap_score_labeled(
    features: &Matrix,
    positives: &[usize],
    known_negatives: &[usize],
    config: &BootstrapConfig,
    seed: u64,
) -> Result<Vec<f64>, LearnerError> {
    let sets = draw_pseudo_negative_sets(features, positives, known_negatives, config, seed)?;
    Ok(score_with_sets(features, positives, known_negatives, &sets, config.base))
}

/// Standardized ridge regression on `+1 / -1` targets.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub means: Vec<f64>,
    /// Column standard deviations; zero marks a constant column.
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn score(&self, features: &Matrix) -> Vec<f64> {
        (0..features.rows())
            .map(|i| {
                let row = features.row(i);
                let mut s = self.intercept;
                for j in 0..row.len() {
                    if self.scales[j] > 0.0 {
                        s += self.weights[j] * (row[j] - self.means[j]) / self.scales[j];
                    }
                }
                s
            })
            .collect()
    }
}

/// Standardizes the columns (constant ones become zero), centers `+1/-1`
/// targets, and solves `(Z'Z + penalty I) w = Z'y`.
pub fn linear_fit(features: &Matrix, labels: &[bool], penalty: f64) -> Result<LinearModel, LearnerError> {
    if features.rows() != labels.len() {
        return Err(LearnerError::LengthMismatch {
            left: features.rows(),
            right: labels.len(),
        });
    }
    if labels.len() < 2 {
        return Err(LearnerError::Empty);
    }
    check_binary(labels)?;
    if !(penalty >= 0.0) || !penalty.is_finite() {
        return Err(LearnerError::InvalidPenalty(penalty));
    }

    let n = features.rows();
    let d = features.cols();
    let mut means = vec![0.0; d];
    let mut scales = vec![0.0; d];
    for j in 0..d {
        let col = features.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        means[j] = mean;
        scales[j] = if var > 0.0 { var.sqrt() } else { 0.0 };
    }
    let z = DMatrix::from_fn(n, d, |i, j| {
        if scales[j] > 0.0 {
            (features.get(i, j) - means[j]) / scales[j]
        } else {
            0.0
        }
    });
    let targets: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let intercept = targets.iter().sum::<f64>() / n as f64;
    let y = DVector::from_iterator(n, targets.iter().map(|t| t - intercept));

    let mut gram = z.transpose() * &z;
    for k in 0..d {
        gram[(k, k)] += penalty;
    }
    let rhs = z.transpose() * y;
    let chol = gram.cholesky().ok_or(LearnerError::Singular)?;
    let weights = chol.solve(&rhs);

    Ok(LinearModel {
        means,
        scales,
        weights: weights.iter().copied().collect(),
        intercept,
    })
}

pub fn linear_score(model: &LinearModel, features: &Matrix) -> Vec<f64> {
    model.score(features)
}

/// Per-feature absolute standardized Wilcoxon rank-sum statistic of the
/// positives (average ranks for ties).
pub fn wilcoxon_scores(features: &Matrix, labels: &[bool]) -> Result<Vec<f64>, LearnerError> {
    if features.rows() != labels.len() {
        return Err(LearnerError::LengthMismatch {
            left: features.rows(),
            right: labels.len(),
        });
    }
    check_binary(labels)?;
    let n = labels.len() as f64;
    let n1 = labels.iter().filter(|&&l| l).count() as f64;
    let n0 = n - n1;
    let expected = n1 * (n + 1.0) / 2.0;
    let sd = (n1 * n0 * (n + 1.0) / 12.0).sqrt();
    Ok((0..features.cols())
        .map(|j| {
            let ranks = average_ranks(&features.column(j));
            let w: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
            ((w - expected) / sd).abs()
        })
        .collect())
}

/// Indices of the `k` highest scores, best first; ties keep column order.
pub fn top_features(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(k);
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::auc;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::new(rows, cols, (0..rows * cols).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap()
    }

    #[test]
    fn rank_align_examples() {
        let x1 = [0.1, 0.9, 0.5];
        assert_eq!(rank_align(&x1, &x1).unwrap(), x1.to_vec());
        assert_eq!(rank_align(&x1, &[3.0, 1.0, 2.0]).unwrap(), vec![0.9, 0.1, 0.5]);
        assert!(matches!(rank_align(&x1, &[1.0]), Err(LearnerError::LengthMismatch { .. })));
        assert_eq!(rank_align(&[], &[]), Err(LearnerError::Empty));
    }

    #[test]
    fn rank_align_ties_follow_index_order() {
        assert_eq!(rank_align(&[3.0, 1.0, 2.0], &[5.0, 5.0, 0.0]).unwrap(), vec![2.0, 3.0, 1.0]);
    }

    #[test]
    fn blend_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let x1: Vec<f64> = (0..30).map(|_| rng.random()).collect();
        let x2: Vec<f64> = (0..30).map(|_| rng.random::<f64>() * 100.0).collect();
        let spec = blend(&x1, &x2, 0.5).unwrap();
        for i in 0..30 {
            assert_eq!(spec.x_ens[i], 0.5 * x1[i] + 0.5 * spec.x3[i]);
        }

        let same = blend(&x1, &x1, 0.3).unwrap();
        for (e, x) in same.x_ens.iter().zip(&x1) {
            assert!((e - x).abs() < 1e-15);
        }

        let dominant = blend(&x1, &x2, 0.999).unwrap();
        let r1 = average_ranks(&x1);
        assert_eq!(average_ranks(&dominant.x_ens), r1);

        assert_eq!(blend(&x1, &x2, 0.0), Err(LearnerError::InvalidTau(0.0)));
        assert_eq!(blend(&x1, &x2, 1.0), Err(LearnerError::InvalidTau(1.0)));
    }

    #[test]
    fn bootstrap_single_set_positive_distance() {
        let m = random_matrix(40, 3, 1);
        let config = BootstrapConfig {
            num_sets: 1,
            base: BaseScorer::PositiveDistance,
            negatives_per_set: 5,
            ..Default::default()
        };
        let s = bootstrap_score(&m, 7, &config, 9).unwrap();
        for i in 0..40 {
            assert_eq!(s[i], -euclidean(m.row(i), m.row(7)));
        }
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let m = random_matrix(200, 4, 2);
        let config = BootstrapConfig::default();
        assert_eq!(
            bootstrap_score(&m, 3, &config, 77).unwrap(),
            bootstrap_score(&m, 3, &config, 77).unwrap()
        );
        assert_ne!(
            bootstrap_score(&m, 3, &config, 77).unwrap(),
            bootstrap_score(&m, 3, &config, 78).unwrap()
        );
    }

    #[test]
    fn bootstrap_set_order_does_not_matter() {
        let m = random_matrix(150, 3, 3);
        let config = BootstrapConfig {
            num_sets: 20,
            negatives_per_set: 10,
            ..Default::default()
        };
        let mut sets = draw_pseudo_negative_sets(&m, &[0], &[], &config, 5).unwrap();
        let a = score_with_sets(&m, &[0], &[], &sets, config.base);
        sets.shuffle(&mut ChaCha8Rng::seed_from_u64(8));
        let b = score_with_sets(&m, &[0], &[], &sets, config.base);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn bootstrap_sets_are_far_from_positive() {
        let m = random_matrix(100, 2, 4);
        let config = BootstrapConfig {
            num_sets: 3,
            negatives_per_set: 10,
            distance_quantile: 0.8,
            ..Default::default()
        };
        let sets = draw_pseudo_negative_sets(&m, &[0], &[], &config, 1).unwrap();
        let mut d: Vec<f64> = (1..100).map(|i| euclidean(m.row(i), m.row(0))).collect();
        d.sort_by(f64::total_cmp);
        let cut = d[(98.0 * 0.8f64).floor() as usize];
        for set in &sets {
            assert_eq!(set.len(), 10);
            assert!(set.iter().all(|&i| euclidean(m.row(i), m.row(0)) > cut));
        }
    }

    #[test]
    fn bootstrap_errors() {
        let m = Matrix::new(5, 1, vec![1.0; 5]).unwrap();
        assert!(matches!(
            bootstrap_score(&m, 0, &BootstrapConfig::default(), 1),
            Err(LearnerError::EmptyEligibleRegion { .. })
        ));
        let m = random_matrix(10, 2, 1);
        let bad = BootstrapConfig {
            num_sets: 0,
            ..Default::default()
        };
        assert!(matches!(bootstrap_score(&m, 0, &bad, 1), Err(LearnerError::InvalidConfig(_))));
        assert!(matches!(
            bootstrap_score(&m, 10, &BootstrapConfig::default(), 1),
            Err(LearnerError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn linear_fit_separable_1d() {
        let m = Matrix::new(6, 1, vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]).unwrap();
        let labels = [false, false, false, true, true, true];
        let model = linear_fit(&m, &labels, 1e-3).unwrap();
        assert_eq!(auc(&model.score(&m), &labels).unwrap(), 1.0);
    }

    #[test]
    fn linear_fit_flipped_labels_negate_weights() {
        let m = random_matrix(12, 3, 6);
        let labels: Vec<bool> = (0..12).map(|i| i % 3 == 0).collect();
        let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
        let a = linear_fit(&m, &labels, 0.5).unwrap();
        let b = linear_fit(&m, &flipped, 0.5).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert!((x + y).abs() < 1e-8);
        }
        assert!((a.intercept + b.intercept).abs() < 1e-12);
    }

    /// Normal equations on standardized columns, solved by Gaussian
    /// elimination with partial pivoting.
    fn normal_equations_oracle(m: &Matrix, labels: &[bool], penalty: f64) -> Vec<f64> {
        let (n, d) = (m.rows(), m.cols());
        let mut z = vec![vec![0.0; d]; n];
        for j in 0..d {
            let col = m.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
            for i in 0..n {
                z[i][j] = (col[i] - mean) / sd;
            }
        }
        let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
        let ybar = y.iter().sum::<f64>() / n as f64;
        let mut a = vec![vec![0.0; d + 1]; d];
        for r in 0..d {
            for c in 0..d {
                a[r][c] = (0..n).map(|i| z[i][r] * z[i][c]).sum::<f64>() + if r == c { penalty } else { 0.0 };
            }
            a[r][d] = (0..n).map(|i| z[i][r] * (y[i] - ybar)).sum();
        }
        for col in 0..d {
            let pivot = (col..d).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
            a.swap(col, pivot);
            for r in 0..d {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=d {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        (0..d).map(|r| a[r][d] / a[r][r]).collect()
    }

    #[test]
    fn linear_fit_matches_normal_equations() {
        let m = random_matrix(5, 3, 11);
        let labels = [true, false, true, false, false];
        let model = linear_fit(&m, &labels, 0.7).unwrap();
        let oracle = normal_equations_oracle(&m, &labels, 0.7);
        for (w, o) in model.weights.iter().zip(&oracle) {
            assert!((w - o).abs() < 1e-8, "{w} vs {o}");
        }
    }

    #[test]
    fn linear_fit_errors_and_constant_columns() {
        let m = random_matrix(4, 2, 1);
        assert_eq!(linear_fit(&m, &[true; 4], 1.0), Err(LearnerError::SingleClass));
        assert_eq!(linear_fit(&m, &[true, false, true, false], -1.0), Err(LearnerError::InvalidPenalty(-1.0)));
        let constant = Matrix::new(4, 2, vec![1.0, 0.5, 1.0, -0.5, 1.0, 2.0, 1.0, 0.0]).unwrap();
        let model = linear_fit(&constant, &[true, false, true, false], 0.1).unwrap();
        assert_eq!(model.weights[0], 0.0);
        assert_eq!(linear_fit(&constant, &[true, false, true, false], 0.0), Err(LearnerError::Singular));
    }

    #[test]
    fn affine_feature_maps_leave_unpenalized_predictions_unchanged() {
        let m = random_matrix(30, 3, 12);
        let labels: Vec<bool> = (0..30).map(|i| (m.get(i, 0) + 0.3 * m.get(i, 2)) > 0.1).collect();
        // x' = x A + b with A invertible
        let a = [[2.0, 0.5, 0.0], [-1.0, 1.0, 0.3], [0.0, 0.2, -3.0]];
        let b = [4.0, -1.0, 0.5];
        let mapped = Matrix::from_rows(
            &(0..30)
                .map(|i| {
                    (0..3)
                        .map(|c| (0..3).map(|r| m.get(i, r) * a[r][c]).sum::<f64>() + b[c])
                        .collect()
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let p = linear_fit(&m, &labels, 0.0).unwrap().score(&m);
        let q = linear_fit(&mapped, &labels, 0.0).unwrap().score(&mapped);
        for (x, y) in p.iter().zip(&q) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    fn brute_force_rank_sum_z(col: &[f64], labels: &[bool]) -> f64 {
        let n = col.len();
        let mut w = 0.0;
        for i in 0..n {
            if !labels[i] {
                continue;
            }
            let mut rank = 1.0;
            for j in 0..n {
                if j != i {
                    if col[j] < col[i] {
                        rank += 1.0;
                    } else if col[j] == col[i] {
                        rank += 0.5;
                    }
                }
            }
            w += rank;
        }
        let n1 = labels.iter().filter(|&&l| l).count() as f64;
        let n0 = n as f64 - n1;
        let nf = n as f64;
        ((w - n1 * (nf + 1.0) / 2.0) / (n1 * n0 * (nf + 1.0) / 12.0).sqrt()).abs()
    }

    #[test]
    fn wilcoxon_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = Matrix::new(10, 4, (0..40).map(|_| rng.random_range(0..5) as f64).collect()).unwrap();
        let labels = [true, false, false, true, false, true, false, false, true, false];
        let scores = wilcoxon_scores(&m, &labels).unwrap();
        for j in 0..4 {
            assert!((scores[j] - brute_force_rank_sum_z(&m.column(j), &labels)).abs() < 1e-12);
        }
    }

    #[test]
    fn wilcoxon_extremes() {
        let labels = [true, false, false, true, false, true, false, false];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| vec![1.0, if l { 1.0 } else { 0.0 }, rng.random(), rng.random()])
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let scores = wilcoxon_scores(&m, &labels).unwrap();
        assert_eq!(scores[0], 0.0);
        assert_eq!(top_features(&scores, 1), vec![1]);
        assert!(scores[1] >= scores[2] && scores[1] >= scores[3]);
        assert_eq!(wilcoxon_scores(&m, &[false; 8]), Err(LearnerError::SingleClass));
    }

    proptest! {
        #[test]
        fn rank_align_keeps_x2_auc(
            x1 in prop::collection::hash_set(-1_000_000i64..1_000_000, 2..60),
            seed in any::<u64>(),
        ) {
            let x1: Vec<f64> = x1.into_iter().map(|v| v as f64 / 1000.0).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x2: Vec<f64> = (0..x1.len()).map(|i| i as f64 * 0.37 - 3.0).collect();
            x2.shuffle(&mut rng);
            let mut labels: Vec<bool> = (0..x1.len()).map(|_| rng.random_bool(0.5)).collect();
            labels[0] = true;
            labels[1] = false;
            let x3 = rank_align(&x1, &x2).unwrap();
            prop_assert_eq!(auc(&x3, &labels).unwrap(), auc(&x2, &labels).unwrap());

            let mut sorted3 = x3.clone();
            sorted3.sort_by(f64::total_cmp);
            let mut sorted1 = x1.clone();
            sorted1.sort_by(f64::total_cmp);
            prop_assert_eq!(sorted3, sorted1);
            prop_assert_eq!(rank_align(&x3, &x2).unwrap(), x3);
        }
    }
}
