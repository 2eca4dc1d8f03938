//! Continuous-time quantum walks on necklace graphs.
//!
//! A necklace is `K` copies of a small pearl graph joined in a ring. Its
//! adjacency Hamiltonian block-diagonalizes into `K` momentum sectors of size
//! `M`, which is what every computation here is built on. The [`oracle`]
//! module holds brute-force reference routines used to validate the reduction.

pub mod analysis;
pub mod bloch;
pub mod cli;
pub mod comb1;
pub mod dynamics;
pub mod eig;
pub mod error;
pub mod graph;
pub mod numeric;
pub mod oracle;

pub use error::{Error, Result};
