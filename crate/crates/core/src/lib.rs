//! Simulation and verification toolkit for gradient random surfaces with
//! monotone potentials, Gaussian-mixture decompositions and the resulting
//! random-conductance Gaussian free fields.

pub mod error;
pub mod field;
pub mod gibbs;
pub mod graph;
pub mod inequality;
pub mod linalg;
pub mod percolation;
pub mod potential;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
