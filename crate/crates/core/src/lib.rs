#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::approx_constant, clippy::excessive_precision))]

pub mod band;
pub mod cli;
pub mod error;
pub mod halfplane;
pub mod mourre;
pub mod packet;
pub mod specfun;

pub use error::{EdgeError, Result};
