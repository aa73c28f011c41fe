//! Simulation and closed-form analysis of uplinks aided by reconfigurable
//! distributed antennas and reflecting surfaces (RDARS).
//!
//! An RDARS is a planar array of `N` elements. Each element either reflects
//! with a unit-modulus phase shift or is wired to the base station as a
//! remote receive antenna. With `a = 0` it is a passive RIS; with `a = N` it
//! is a distributed antenna system.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod calc;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod rdars;
pub mod scenario;
pub mod snr;

pub use error::{Error, FieldError, Result};
