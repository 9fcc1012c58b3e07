//! Analytical performance model of a UAV relay carrying an intelligent
//! reflecting surface (IRS), with a Monte-Carlo oracle and quadratic-transform
//! optimizers for element count, altitude and mode selection.
//!
//! Three relaying modes are modelled: a decode-and-forward UAV relay, a passive
//! IRS cascade, and an integrated mode that applies selection combining at the
//! receiver. All internal quantities are linear SI values; dB conversions live
//! in [`units`].

pub mod cascade;
pub mod environment;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod mode_select;
pub mod montecarlo;
pub mod optimizer;
pub mod performance;
pub mod power;
pub mod quadrature;
pub mod radio;
pub mod scenario;
pub mod special;
pub mod units;

pub use error::{Error, Result};
pub use geometry::Link;
pub use performance::Mode;
pub use scenario::Scenario;
