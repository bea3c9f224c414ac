//! Parabolic cylinder functions and the edge quantization condition.
//!
//! This module is deliberately independent of the finite-difference solver
//! in [`crate::band`]; the two are cross-checked against each other.

pub mod gamma;
pub mod pcf;
pub mod roots;

pub use pcf::{pcf_d, pcf_d_split, PcfEvaluation, PcfMethod};
pub use roots::{quantization_excess, quantization_excess_slope, quantization_roots, QuantizationRootSet};
