//! Exact computation of sandpile groups (critical groups) and spanning-tree
//! counts for polygon chains, polygon rings and twisted polygon rings.
//!
//! A polygon chain glues cycles `C_{k_1}, ..., C_{k_n}` in a row along shared
//! rung edges; closing the chain up planarly gives a polygon ring, closing it
//! with a flip gives a twisted (Moebius) polygon ring. The sandpile group of
//! such a graph is computed here by several independent routes that
//! cross-check each other:
//!
//! * Smith normal form of the reduced Laplacian ([`graph`], [`matrix`]),
//! * Smith normal form of the cycle/cut edge presentation ([`graph`]),
//! * small relation matrices among at most three edge generators, propagated
//!   across the polygons by 3x3 transfer matrices ([`relations`]),
//! * closed-form invariant factors for uniform families ([`group`]),
//! * exhaustive chip-firing dynamics as a tiny-scale oracle ([`sandpile`]).
//!
//! All arithmetic is exact: every integer is a [`BigInt`] and every division
//! is checked to leave no remainder.

pub mod error;
pub mod graph;
pub mod group;
pub mod matrix;
pub mod relations;
mod rng;
pub mod sandpile;
pub mod sequences;

pub use error::Error;
pub use num_bigint::BigInt;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand used throughout: `int(7)` instead of `BigInt::from(7)`.
pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}
