//! Pricing of defaultable zero-coupon bonds whose default can happen either at
//! discrete announcing dates (firm value below a barrier) or at the first jump
//! of a Poisson process with a piecewise-constant intensity.
//!
//! The closed-form prices are assembled from higher-order bond and asset
//! binaries ([`binaries`]) and exponentially weighted time-integrals of them
//! ([`intbin`]). Two independent numerical engines, a finite-difference cascade
//! ([`pde`]) and a Monte Carlo simulator ([`mc`]), are provided for
//! cross-checking.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![warn(missing_docs)]
// `!(x > 0.0)` deliberately rejects NaN alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod binaries;
mod error;
pub mod intbin;
pub mod math;
pub mod mc;
pub mod mvn;
pub mod pde;
pub mod pricer;
pub mod quadrature;

pub use error::{Error, Result};
