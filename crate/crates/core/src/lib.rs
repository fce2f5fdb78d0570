// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coherent;
pub mod error;
pub mod moments;
pub mod oscillator;
pub mod quadrature;
pub mod recurrence;
pub mod report;
pub mod resolution;
pub mod specfun;

pub use error::{OscError, Result};
