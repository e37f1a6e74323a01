//! Quantum-like bits built from complex gain graphs.
//!
//! A QL bit is a pair of random regular graphs joined by sparse coupling edges
//! whose common complex gain (the bias) is read off the top eigenvector of
//! the adjacency matrix. Cartesian products of QL bits carry tensor product
//! states, and the modules here cover construction, spectra, products,
//! concurrence experiments and oscillator dynamics on such graphs.

pub mod entanglement;
pub mod error;
pub mod graph;
pub mod io;
pub mod kuramoto;
pub mod linalg;
pub mod qlbit;
pub mod regular;
pub mod product;
pub mod spectral;
pub mod su2;

pub use error::{QlError, Result};
pub use graph::GainGraph;
pub use qlbit::{build_ql_bit, QlBit, QlBitSpec};
pub use regular::generate_d_regular;
