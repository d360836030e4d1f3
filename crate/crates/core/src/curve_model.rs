//! Learning trajectories: the `(n_i, t_i, AUC_i)` sequence recorded while an
//! active learner buys labels from a pool of `T` samples, plus its CSV form.
//!
//! File layout (one trajectory per file):
//!
//! ```text
//! # T=25000
//! # any other comment lines are ignored
//! step,n,t,auc
//! 1,1,1,6.3040000000000000e-1
//! 2,1100,1101,7.3230000000000000e-1
//! ```
//!
//! `t` is stored next to `n` and cross-checked on read; a mismatch is an
//! error rather than something to recompute.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("trajectory has no steps")]
    Empty,
    #[error("total pool size must be at least 1")]
    EmptyPool,
    #[error("step {step}: request size must be at least 1")]
    ZeroRequest { step: usize },
    #[error("step 1: first request must be a single label (got {n}); use relaxed validation to allow a leading jump")]
    FirstRequestNotOne { n: u64 },
    #[error("step {step}: AUC {auc} is outside [0, 1]")]
    AucOutOfRange { step: usize, auc: f64 },
    #[error("trajectory exceeds pool: t = {t} at step {step} but T = {pool}")]
    ExceedsPool { step: usize, t: u64, pool: u64 },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One purchase: `request_size` new labels bringing the total to
/// `cumulative_labels`, after which the pool-wide AUC was `auc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryStep {
    pub request_size: u64,
    pub cumulative_labels: u64,
    pub auc: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Accept a first request larger than one label.
    pub relax_first: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningTrajectory {
    steps: Vec<TrajectoryStep>,
    total_pool_size: u64,
}

impl LearningTrajectory {
    /// Builds a trajectory from `(request size, AUC)` pairs with strict
    /// validation (the first request must be a single label).
    pub fn from_requests(raw: &[(u64, f64)], total_pool_size: u64) -> Result<Self, TrajectoryError> {
        Self::from_requests_with(raw, total_pool_size, ValidationOptions::default())
    }

    pub fn from_requests_with(
        raw: &[(u64, f64)],
        total_pool_size: u64,
        options: ValidationOptions,
    ) -> Result<Self, TrajectoryError> {
        if raw.is_empty() {
            return Err(TrajectoryError::Empty);
        }
        if total_pool_size == 0 {
            return Err(TrajectoryError::EmptyPool);
        }
        let mut steps = Vec::with_capacity(raw.len());
        let mut cumulative = 0u64;
        for (i, &(n, auc)) in raw.iter().enumerate() {
            let step = i + 1;
            if n == 0 {
                return Err(TrajectoryError::ZeroRequest { step });
            }
            if step == 1 && n != 1 && !options.relax_first {
                return Err(TrajectoryError::FirstRequestNotOne { n });
            }
            if !(0.0..=1.0).contains(&auc) {
                return Err(TrajectoryError::AucOutOfRange { step, auc });
            }
            cumulative = cumulative.saturating_add(n);
            if cumulative > total_pool_size {
                return Err(TrajectoryError::ExceedsPool {
                    step,
                    t: cumulative,
                    pool: total_pool_size,
                });
            }
            steps.push(TrajectoryStep {
                request_size: n,
                cumulative_labels: cumulative,
                auc,
            });
        }
        Ok(Self {
            steps,
            total_pool_size,
        })
    }

    /// Builds a trajectory from `(t, AUC)` points; request sizes are the
    /// successive differences of `t`.
    pub fn from_label_counts(
        points: &[(u64, f64)],
        total_pool_size: u64,
        options: ValidationOptions,
    ) -> Result<Self, TrajectoryError> {
        let mut raw = Vec::with_capacity(points.len());
        let mut previous = 0u64;
        for (i, &(t, auc)) in points.iter().enumerate() {
            if t <= previous {
                return Err(TrajectoryError::ZeroRequest { step: i + 1 });
            }
            raw.push((t - previous, auc));
            previous = t;
        }
        Self::from_requests_with(&raw, total_pool_size, options)
    }

    pub fn steps(&self) -> &[TrajectoryStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_pool_size(&self) -> u64 {
        self.total_pool_size
    }

    pub fn aucs(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.auc).collect()
    }

    pub fn label_counts(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.cumulative_labels).collect()
    }

    pub fn last(&self) -> &TrajectoryStep {
        self.steps.last().expect("trajectory is nonempty by construction")
    }

    /// `log2(t_{i+1} / t_i)` for every step, with `t_{N+1} = T`.
    /// The entries telescope to `log2(T / t_1)`.
    pub fn log_ratios(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.steps.len());
        for (i, step) in self.steps.iter().enumerate() {
            let next = self
                .steps
                .get(i + 1)
                .map_or(self.total_pool_size, |s| s.cumulative_labels);
            out.push((next as f64 / step.cumulative_labels as f64).log2());
        }
        out
    }

    /// Copy of this trajectory with the AUC of step `index` (0-based)
    /// replaced.
    pub fn with_auc(&self, index: usize, auc: f64) -> Result<Self, TrajectoryError> {
        if !(0.0..=1.0).contains(&auc) {
            return Err(TrajectoryError::AucOutOfRange { step: index + 1, auc });
        }
        let mut out = self.clone();
        out.steps[index].auc = auc;
        Ok(out)
    }

    /// The steps with `t_i >= threshold`, keeping the original label counts.
    pub fn restricted_from(&self, threshold: f64) -> Option<Self> {
        let steps: Vec<_> = self
            .steps
            .iter()
            .copied()
            .filter(|s| s.cumulative_labels as f64 >= threshold)
            .collect();
        if steps.is_empty() {
            return None;
        }
        Some(Self {
            steps,
            total_pool_size: self.total_pool_size,
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# T={}", self.total_pool_size).unwrap();
        out.push_str("step,n,t,auc\n");
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                i + 1,
                s.request_size,
                s.cumulative_labels,
                format_real(s.auc)
            )
            .unwrap();
        }
        out
    }

    pub fn parse_csv(text: &str, options: ValidationOptions) -> Result<Self, TrajectoryError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

        let (line_no, first) = lines.next().ok_or(TrajectoryError::Malformed {
            line: 1,
            reason: "empty file".into(),
        })?;
        let total_pool_size = first
            .strip_prefix("# T=")
            .ok_or_else(|| TrajectoryError::Malformed {
                line: line_no,
                reason: format!("expected `# T=<int>`, found `{first}`"),
            })?
            .trim()
            .parse::<u64>()
            .map_err(|e| TrajectoryError::Malformed {
                line: line_no,
                reason: format!("bad pool size: {e}"),
            })?;

        let mut header_seen = false;
        let mut raw = Vec::new();
        let mut expected_t = 0u64;
        for (line_no, line) in lines {
            if line.starts_with('#') {
                if header_seen {
                    return Err(TrajectoryError::Malformed {
                        line: line_no,
                        reason: "comment after header".into(),
                    });
                }
                continue;
            }
            if !header_seen {
                if line != "step,n,t,auc" {
                    return Err(TrajectoryError::Malformed {
                        line: line_no,
                        reason: format!("header mismatch: expected `step,n,t,auc`, found `{line}`"),
                    });
                }
                header_seen = true;
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(TrajectoryError::Malformed {
                    line: line_no,
                    reason: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let bad = |what: &str, e: &dyn std::fmt::Display| TrajectoryError::Malformed {
                line: line_no,
                reason: format!("bad {what}: {e}"),
            };
            let step: usize = fields[0].parse().map_err(|e| bad("step", &e))?;
            let n: u64 = fields[1].parse().map_err(|e| bad("n", &e))?;
            let t: u64 = fields[2].parse().map_err(|e| bad("t", &e))?;
            let auc: f64 = fields[3].parse().map_err(|e| bad("auc", &e))?;
            if step != raw.len() + 1 {
                return Err(TrajectoryError::Malformed {
                    line: line_no,
                    reason: format!("step index {step} out of sequence (expected {})", raw.len() + 1),
                });
            }
            if t <= expected_t {
                return Err(TrajectoryError::Malformed {
                    line: line_no,
                    reason: format!("non-monotone t: {t} after {expected_t}"),
                });
            }
            expected_t = expected_t.saturating_add(n);
            if t != expected_t {
                return Err(TrajectoryError::Malformed {
                    line: line_no,
                    reason: format!("t = {t} does not equal the running sum of n ({expected_t})"),
                });
            }
            if !(0.0..=1.0).contains(&auc) {
                return Err(TrajectoryError::Malformed {
                    line: line_no,
                    reason: format!("AUC {auc} is outside [0, 1]"),
                });
            }
            raw.push((n, auc));
        }
        if !header_seen {
            return Err(TrajectoryError::Malformed {
                line: text.lines().count().max(1),
                reason: "missing header `step,n,t,auc`".into(),
            });
        }
        Self::from_requests_with(&raw, total_pool_size, options)
    }
}

pub fn read_trajectory_csv(path: impl AsRef<Path>) -> Result<LearningTrajectory, TrajectoryError> {
    read_trajectory_csv_with(path, ValidationOptions::default())
}

pub fn read_trajectory_csv_with(
    path: impl AsRef<Path>,
    options: ValidationOptions,
) -> Result<LearningTrajectory, TrajectoryError> {
    let text = fs::read_to_string(path)?;
    LearningTrajectory::parse_csv(&text, options)
}

pub fn write_trajectory_csv(
    trajectory: &LearningTrajectory,
    path: impl AsRef<Path>,
) -> Result<(), TrajectoryError> {
    fs::write(path, trajectory.to_csv_string())?;
    Ok(())
}

/// 17 significant digits: enough for any `f64` to survive a text round trip.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}
