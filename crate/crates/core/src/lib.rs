//! Common information components analysis.
//!
//! Relaxed Wyner common information `C_γ(X;Y)` measures how much information a
//! latent `W` must carry so that `X` and `Y` are conditionally independent up
//! to a residual `I(X;Y|W) ≤ γ`. Projecting the optimal latent back onto each
//! source yields low-dimensional features that keep what the two sources
//! share. For jointly Gaussian sources the features are exactly the top-`k`
//! CCA components, with `k` set by `γ` through a water-filling allocation.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`model`] | validated Gaussian and discrete joint models, [`InfoValue`] |
//! | [`whitening`] | `K^{-1/2}` and the canonical matrix |
//! | [`cca`] | canonical correlation basis, projections, power-iteration oracle |
//! | [`gaussian_ci`] | closed-form `C_γ` for Gaussian pairs, water-filling, component count |
//! | [`discrete`] | information functionals and the Lagrangian solver for finite alphabets |
//! | [`projections`] | MAP / conditional-expectation / marginal feature maps |
//! | [`estimation`] | model fitting from samples, and samplers |
//!
//! All information quantities are in nats.

pub mod cca;
pub mod discrete;
pub mod error;
pub mod estimation;
pub mod gaussian_ci;
pub mod model;
pub mod projections;
pub mod whitening;

pub use cca::{cca_decompose, cca_project, leading_pair_fixed_point, CcaBasis, LeadingPair};
pub use discrete::{
    ci_curve_discrete, conditional_mi_given_w, dsbs_wyner, entropy, mutual_information,
    solve_relaxed_wyner, solve_relaxed_wyner_multi, Coupling, CurvePoint, SolveReport,
    SolverOptions,
};
pub use error::{Error, Result};
pub use estimation::{estimate_gaussian, estimate_pmf, sample_gaussian};
pub use gaussian_ci::{
    ci_curve, component_count, mutual_info_rho, relaxed_ci_gaussian, scalar_relaxed_ci, waterfill,
    GammaAllocation, GaussianCurvePoint,
};
pub use model::{
    validate_discrete, validate_gaussian, validate_multi, DiscreteJoint, GaussianJoint, InfoValue,
    MultiDiscreteJoint, DEFAULT_EPS_PD,
};
pub use projections::{
    feature_mutual_information, gaussian_latent, map_features, project_discrete,
    project_discrete_map, project_gaussian, toy_binary_example, toy_bit_covariance, FeatureMap,
    GaussianLatentSpec, ProjectionOutputs, ProjectionVersion,
};
pub use whitening::{canonical_matrix, inv_sqrt_psd, WhitenedPair};
