//! Weighted topological pressure for chains of subshifts over Z and Z^2.
//!
//! The crate computes the nested partition function of a chain of factor
//! maps `X_1 → … → X_r` with exponents `a_i ∈ [0, 1]`, the weighted
//! measure-theoretic objective `Σ w_i h_{μ_i} + w_1 ∫ f dμ`, and a set of
//! numerical checks tying the two together.

pub mod error;
pub mod group;
pub mod logspace;
pub mod measures;
pub mod oracle;
pub mod potential;
pub mod pressure;
pub mod suites;
pub mod symbolic;
pub mod variational;

pub use error::{Error, Result};
pub use group::{boundary, folner_ratio, subadditive_limit, BoxKind, Dim, FolnerSchedule, GroupPoint, Window};
pub use measures::{
    entropy_rate, entropy_subadditivity_check, marginal, partition_entropy, pushforward, weighted_objective,
    EntropyBounds, FiniteSupport, MarginalTable, MeasureSpec, ObjectiveInterval,
};
pub use potential::{birkhoff_argmax, birkhoff_sup, Potential};
pub use pressure::{
    nested_partition_function, pressure_estimate, weights_from_exponents, CylinderScheme, ExponentVector,
    PressureEstimate, WeightVector,
};
pub use symbolic::{
    enumerate_patterns, fiber_decomposition, Alphabet, BlockCode, Pattern, PatternSet, Subshift, Symbol, SystemChain,
    Word, DEFAULT_BUDGET,
};
pub use variational::{
    construct_nu_n, duality_check, invariantize, optimize_objective, verify_logz_identity, Family, LogZReport,
    OptimizerConfig, Optimum,
};
