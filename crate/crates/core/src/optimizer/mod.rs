//! Quadratic-transform fractional programming and the problems built on it.

pub mod concavity;
pub mod elements;
pub mod golden;
pub mod height;
pub mod qt;

pub use concavity::{check_concavity_irs, check_concavity_uav, ConcavityVerdict};
pub use elements::{min_power_elements, min_power_uplink, optimize_irs_elements, ElementsReport};
pub use height::{optimize_irs_height, optimize_uav_height, HeightReport};
pub use qt::{solve, OptReport, QtKind, QtProblem};
