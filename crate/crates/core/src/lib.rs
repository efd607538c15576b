//! Bipolar-oriented planar maps and their encoding as quadrant lattice walks.
//!
//! The crate is organised around one bijection: a bipolar-oriented planar map
//! with `ℓ` edges, `m + 1` edges on its west boundary and `n + 1` on its east
//! boundary corresponds to a walk of `ℓ - 1` steps from `(0, m)` to `(n, 0)`
//! that stays in the nonnegative quadrant. Steps are either `(1, -1)` or
//! `(-i, j)` for `i, j ≥ 0`.
//!
//! * [`map`] holds the map type, validation, trees, duals and JSON.
//! * [`bijection`] sews walks into maps and reads walks off maps.
//! * [`weights`] turns face weights into a zero-drift step law.
//! * [`enumeration`] counts walks exactly and samples them uniformly.
//! * [`simulate`] runs samplers and the degree/covariance statistics.
//! * [`embed`] draws maps with straight north-going edges.

pub mod error;
pub mod geometry;
pub mod bijection;
pub mod cli;
pub mod embed;
pub mod enumeration;
pub mod map;
pub mod simulate;
pub mod tableau;
pub mod weights;

pub use error::{Error, Result};
