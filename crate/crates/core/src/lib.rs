//! Exact and floating point kernels for rotations, skew products,
//! Heisenberg nilsystems and q-multiplicative sequences: orbit iteration,
//! weighted and multiple ergodic averages along Følner windows, discrete
//! spectra with an exact Kronecker-disjointness test, and the complete
//! joining theory of ergodic rotations on finite abelian groups.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arcs;
pub mod averaging;
pub mod error;
pub mod folner;
pub mod frequency;
pub mod joinings;
pub mod lattice;
pub mod numeric;
pub mod parse;
pub mod qmult;
pub mod spectrum;
pub mod summation;
pub mod systems;

pub use error::{Error, ParseError, Result};
pub use frequency::{BasisTag, Frequency};
pub use num_complex::Complex64;
pub use systems::{product, Observable, Point, SystemDescriptor};
