//! Kernel smoothing around the empirical CDF: estimators, confidence
//! bands, bandwidth rules, and the Monte Carlo machinery to study when
//! the smoothed CDF stays inside the bands.
//!
//! The central objects are the smoothed empirical CDF
//! F̂_h(x) = n⁻¹ Σ K((x − X_i)/h), its derivative the kernel density
//! estimator, and the discrepancy process Z_n(x) = √n (F̂_h(x) − F_n(x)).
//! With the MSE-optimal n^{−1/5} bandwidths, the drift of Z_n grows like
//! n^{1/10} wherever f'(x) ≠ 0, so F̂_h eventually escapes every fixed
//! confidence band around F_n; n^{−1/4}-rate bandwidths and the maximum
//! smoothing bandwidth ĥ = sup{h : max_x |Z_n(x)| < c_n} keep it inside.
//! This crate implements the estimators exactly (windowed sums, no
//! gridding), the bands and their constants, the bandwidth rules, the
//! closed-form asymptotics, and reproducible simulation studies that set
//! the two against each other.

pub mod bands;
pub mod bandwidth;
#[cfg(feature = "cli")]
pub mod cli;
pub mod densities;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod normal;
mod numfmt;
pub mod quad;
pub mod rng;
pub mod simulation;
pub mod theory;

pub use bands::{
    band_at, contains_globally, corrected_band_at, kolmogorov_cdf, ks_quantile, membership,
    membership_at, BandInterval, BandKind, BandSpec, EvalPoints, MembershipReport,
};
pub use bandwidth::{
    constrained_cv_bandwidth, default_cv_grid, lscv_bandwidth, max_smoothing_bandwidth,
    quick_rule_bandwidth, BandwidthRule, CvPoint, MaxSmoothDiagnostics,
};
pub use densities::TestDensity;
pub use error::{Error, Result};
pub use estimators::{Sample, Side, SmoothedEstimate};
pub use kernels::{kernel_moments, Kernel, KernelMoments};
pub use rng::{derive_stream, RngStream};
pub use simulation::{
    collect_z_at_point, correlation_diagnostic, normality_diagnostic, run_study, run_trial,
    CorrelationReport, NormalityReport, StudyConfig, StudyResult, TrialRecord,
};
pub use theory::{AsymptoticContext, InclusionApprox, RegimeFlags};
