//! The PowerBurr family, its classical relatives, and their numerics.

pub mod burr;
pub mod model;
pub mod moments;
pub mod powerburr;
pub mod quantile;
pub mod special_cases;
pub mod unimodality;

pub use burr::{burr_cdf, burr_log_pdf, BurrKernel};
pub use model::{burr_quantile, gamma_unit_mean_quantile, quantile, Distribution};
pub use moments::{moments, Moment};
pub use powerburr::{
    forward_transform, inverse_transform, powerburr_log_pdf, DensityPoint, PowerBurr,
};
pub use special_cases::{special_case_params, ClassicalKind, SpecialCase, DEFAULT_LIMIT};
pub use unimodality::{
    grid_scan_maxima, unimodality_check, UnimodalityCondition, UnimodalityVerdict,
};
