//! Configuration, file formats, parallel Monte Carlo and the `homsim`
//! command line on top of `homsim-core`.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod error;
pub mod material;
pub mod output;
pub mod parallel;
pub mod svg;

pub use error::{AppError, AppResult};
