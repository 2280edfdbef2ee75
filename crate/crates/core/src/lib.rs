//! Exact random walks on groups and their actions.

pub mod actions;
pub mod dual_norm;
pub mod dyadic;
pub mod groups;
pub mod harmonic;
pub mod kv;
pub mod measures;
pub mod metric;
pub mod parallel;
pub mod weight;

pub use dyadic::Dyadic;
pub use weight::{Rational, Weight, WeightMode};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
