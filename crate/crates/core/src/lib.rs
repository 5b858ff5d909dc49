//! Continuous-time quantum walks on weighted graph joins.
//!
//! The crate builds graphs and their joins, decomposes adjacency and
//! Laplacian matrices into spectral projectors, and decides strong
//! cospectrality, periodicity and perfect state transfer both from closed
//! forms over the join parameters and from the dense spectral data. The
//! closed forms are always cross-checked against the dense computation.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod cli;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod spectral;
pub mod transfer;
pub mod walk;

pub use error::{Error, Result};
