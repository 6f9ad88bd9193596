//! Random geometric graphs whose per-vertex cut-off radius is the radius at
//! which a ball around the vertex carries a prescribed probability mass.
// Negated float comparisons are how parameter checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod density;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod norm;
pub mod numeric;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
