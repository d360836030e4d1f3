//! Learning-curve criteria for pool-based active learning, and a
//! deterministic simulator that produces the curves they score.
//!
//! * [`curve_model`]: trajectories `(n_i, t_i, AUC_i)` over a pool of `T`
//!   samples and their CSV form.
//! * [`criteria`]: AUC, ALC and its weight decomposition, the two-step ALC,
//!   truncated ALC and the Q criterion.
//! * [`learner`]: cold-start random-set scorer, ridge linear scorer,
//!   Wilcoxon feature scores, rank-aligned blending.
//! * [`strategy`]: knee, random and jump query selection; optimal stopping.
//! * [`simulator`]: synthetic pools and protocol replay.

pub mod criteria;
pub mod curve_model;
pub mod learner;
pub mod simulator;
pub mod strategy;

pub use criteria::{alc, alc2, auc, q_criterion, truncated_alc, CriteriaError, CriterionParams};
pub use curve_model::{LearningTrajectory, TrajectoryError, TrajectoryStep};
