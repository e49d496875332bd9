//! Estimators and algebra for additive functionals, the current and the
//! second-class particle.

mod analysis;
mod estimate;
mod functional;
mod inference;
mod local;
mod sampling;

pub use analysis::{
    clt_diagnostic, current_variance, increment_covariance, occupation_from_grid, second_class_occupation, trend,
    variance_curve, velocity_and_tails, weighted_occupation, CltReport, OccupationEstimate, TailPoint, Trend, TrendFit, VelocityReport,
};
pub use estimate::{
    covariance_estimate, mean, mean_estimate, sample_variance, variance_estimate, wilson, EnsembleEstimate, Z95,
};
pub use functional::{additive_functional, AdditiveObserver, OriginDwell, Trajectory};
pub use inference::{
    chi_square_integer, kolmogorov_survival, ks_normal, ks_test, symmetric_walk_pmf, weighted_line, FitTest, LineFit,
};
pub use local::{decompose, monotone_split, pair_identity, BasisDecomposition, LocalFunction, Scalar, MAX_SUPPORT};
pub use sampling::{AdditiveSample, CurrentSample, Sampler, SecondClassSample};
