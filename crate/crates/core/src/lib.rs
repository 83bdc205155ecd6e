//! Finite-model laboratory.
//!
//! Everything here works on small in-memory structures: symmetric loop-free
//! relations as bit matrices, densities and thresholds as exact rationals,
//! and exhaustive or seeded-deterministic searches. No IO, no floats.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bits;
pub mod charseq;
pub mod counting;
pub mod graph;
pub mod independence;
pub mod orderprops;
pub mod rat;
pub mod regularity;
pub mod rng;
pub mod structures;

pub use graph::Graph;
pub use rat::Rat;
