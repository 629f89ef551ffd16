//! Generalized convolution and Fourier analysis on finite groups and their
//! quotient spaces, with numerical certification that a feed-forward network
//! over homogeneous spaces is group-equivariant exactly when every layer is
//! a generalized convolution.

// index loops mirror the parallel-array layout of the tables throughout
#![allow(clippy::needless_range_loop)]

pub mod convolution;
pub mod equivariance;
pub mod error;
pub mod fourier;
pub mod gcnn;
pub mod group;
pub mod io;
pub mod linalg;
mod numeric;
pub mod report;
pub mod repr;
pub mod verify;
pub mod young;

pub use error::{Error, Result};
