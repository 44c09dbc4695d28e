//! Constructive lower-bound machinery: packings, bump-function density
//! families, information and testing bounds, and unit-constant rate envelopes.

mod bump;
mod info;
mod linalg;
mod packing;
mod rates;

pub use bump::{bump_eval, BumpFunction, DensityPacking, PackedDensity};
pub use info::{
    c_epsilon, density_information_matrix, fano_bound, info_bound_density, info_bound_multinomial, kl_pair_bound,
    lecam_bound,
};
pub use linalg::{lambda_max, lambda_max_power};
pub use packing::{
    build_sign_packing, build_weighted_packing, verify_packing, Certificate, PackingKind, PackingOptions, PackingSet,
    PackingSummary,
};
pub use rates::{predict_rates, Problem, RatePrediction, RateTerm};
