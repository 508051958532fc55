//! Numerical core for compressing time-evolution operators of constrained
//! spin chains into shallow parametrized circuits.
//!
//! Basis convention: index `b` stores qubit `j` in bit `L-1-j` and bit value 1
//! is spin up (`σ^z = +1`).

#![no_std]
extern crate alloc;

pub mod analysis;
pub mod circuit;
pub mod compress;
pub mod eigen;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod model;

pub use error::{Error, Result};
pub use linalg::{BlockMask, DenseOperator, LocalMatrix, StateVector, C64, OPERATOR_CEILING, STATE_CEILING};
