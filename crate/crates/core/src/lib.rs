//! PowerBurr claim-severity models.
//!
//! The PowerBurr family pushes a Burr (beta-prime) variable `X = G_θ / G_α`,
//! a ratio of unit-mean Gammas, through
//!
//! ```text
//! Z = β {(1 + X^η / τ)^γ − 1}
//! ```
//!
//! which nests the log-normal, log-gamma, Weibull, Pareto, Gamma and several
//! other classical severity laws as limits. The crate provides densities,
//! quantiles, moments and sampling for the family and its relatives
//! ([`distributions`], [`sampling`]), maximum likelihood with analytic
//! gradients ([`fitting`]), compound-Poisson reserves ([`risk`]), a
//! simulation-study harness ([`study`]) and validation tools ([`validation`]).

pub mod distributions;
pub mod error;
pub mod family;
pub mod fitting;
pub mod gof;
pub mod params;
pub mod quadrature;
pub mod risk;
pub mod sample;
pub mod sampling;
pub mod special;
pub mod study;
pub mod validation;

pub use error::{Error, Result};
pub use family::{FamilyKind, FamilySpec};
pub use params::{ParamVector, Positive};
pub use sample::ClaimSample;
pub use sampling::RngStream;
