//! Analytical throughput engine for random annex codes.
//!
//! The pipeline: expected overlap between decoded and pending generations
//! ([`overlap`]), the per-generation packet requirement that overlap implies
//! ([`eta`]), and the expected number of random draws needed to meet all
//! requirements at once ([`collector`]), evaluated with Poisson kernels
//! ([`poisson`]) and adaptive quadrature ([`quadrature`]).

pub mod collector;
pub mod eta;
pub mod overlap;
pub mod poisson;
pub mod predict;
pub mod quadrature;

pub use collector::{condense, expected_collection, integrand, CollectionIntegrand, CollectorProfile};
pub use eta::{eta, eta_exact};
pub use overlap::{layout_overlap_profile, omega, omega_asymptotic, OverlapProfile};
pub use poisson::{partial_exp_sum, poisson_band, UNBOUNDED};
pub use predict::{predict, predict_expected_packets, predict_from_overlap, requirements, Prediction};
