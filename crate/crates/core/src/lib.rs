//! Bistable parametric oscillators used as measurement devices for the
//! quadrature statistics of an injected state.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytics;
pub mod dsl;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod numerics;
pub mod rng;
pub mod states;
pub mod table;

pub use error::{Error, Result};
pub use exec::Execution;
