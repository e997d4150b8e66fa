//! Exact-arithmetic kernel for differential graded categories, twisted
//! complexes, cubical enrichments and pseudo-tensor structures.
//!
//! Everything in this crate computes over `Z` or `Q` exactly: there are no
//! floating-point numbers and no tolerances. Claims are checked by full
//! enumeration of basis elements, so every verdict is a finite calculation
//! that either holds on the nose or produces a concrete witness.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod builder;
pub mod complex;
pub mod cosimplicial;
pub mod cube;
pub mod dg;
pub mod fincor;
pub mod gen;
pub mod graded;
pub mod matrix;
pub mod multicomplex;
pub mod pretr;
pub mod ring;
pub mod snf;

/// Deterministic RNG used by all seeded checks.
pub fn rng_from_seed(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand_core::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
