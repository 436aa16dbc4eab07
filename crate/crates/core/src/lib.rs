//! Unitary CPT representations for spin-0, ½ and 1 plane-wave sub-bases,
//! the wave-equation algebra behind their dimensions, the CPT superselection
//! sectors with frameness-resource measures, and seeded simulations of
//! communication without a shared CPT frame.

// tensor-index loops read closer to the formulas than iterator chains
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod reps;
pub mod rng;
pub mod ssr;
pub mod wave_eqs;
