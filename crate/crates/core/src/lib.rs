//! Pricing engine for subordinated (subdiffusive) market models.
//!
//! The classical Bachelier, Black-Scholes and Cox-Ross-Rubinstein models are
//! driven here by an inverse subordinator `S(t)`: the operational clock stalls
//! during the jumps of the underlying subordinator, which produces the flat
//! periods typical of illiquid markets. Prices are obtained by averaging the
//! classical price over random horizons `S(T)`, and are cross-checked against a
//! finite-difference solver of the time-fractional pricing equations.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command-line front end live in the companion `subdiff` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classical;
pub mod error;
pub mod pde;
pub mod rng;
pub mod special;
pub mod subordinated;
pub mod subordinator;

pub use classical::{MarketParams, OptionKind, OptionSpec, TreeConfig};
pub use error::{Error, Result};
pub use pde::{Coordinate, FractionalOrder, PdeGrid, PdeSolution};
pub use rng::RngStream;
pub use subordinated::{HorizonSampleSet, McConfig, PriceEstimate};
pub use subordinator::{Family, InversePath, LaplaceExponentSpec, SubordinatorPath};
