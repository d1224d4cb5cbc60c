//! Magic-resource toolkit for multi-qubit states and channels with completely
//! stabilizer preserving operations (CSPOs) as the free set.
//!
//! The crate provides:
//!
//! - exact enumeration of pure stabilizer states (1-3 qubits) with
//!   polytope-membership certificates,
//! - Choi-matrix machinery for channels and superchannels, including the
//!   completely-CSPO-preserving check and the qubit CSPO-preserving check,
//! - magic monotones: robustness, generalized robustness (primal and dual),
//!   min-relative entropy, hypothesis-testing relative entropy, and the
//!   geometric measure,
//! - qubit interconversion decisions with Farkas certificates and an
//!   independent convex-hull oracle,
//! - single-shot cost/distillation bounds,
//! - quasiprobability circuit simulators: static Monte Carlo and the dynamic
//!   constrained-path algorithm.
//!
//! Monte Carlo sampling is data-parallel over sample indices. The default
//! `parallel` feature runs chunks on rayon; disabling it yields a sequential
//! build with bit-identical output (the reduction is chunked in fixed order
//! either way).

// Index loops over tableau rows/columns and tensor legs stay as-is; iterator
// rewrites obscure the stride arithmetic.
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod channels;
pub mod error;
pub mod interconvert;
pub mod io;
pub mod monotones;
pub mod numerics;
pub mod simulate;
pub mod stabilizer;

pub use error::{MagicError, Result};
