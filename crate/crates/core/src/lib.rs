//! Numerical geometry of hypersurfaces with vanishing `2k`-mean curvature.
//!
//! The crate builds the rotationally invariant Lovelock-Schwarzschild
//! hypersurfaces of `R^{n+1}`, checks the null `2k`-mean-curvature constraint
//! and its ellipticity, reads off the Gauss-Bonnet-Chern mass from end
//! expansions and flux integrals, evaluates the Penrose mass-area functional,
//! and certifies `C^2` regularity of the reflection double across the horizon.
//!
//! Everything here is `no_std` (with `alloc`). File formats and the command
//! line live in the `lovegeo` crate.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod asymptotics;
pub mod error;
pub mod graphgeom;
pub mod massflux;
pub mod model;
pub mod numerics;
pub mod rotational;
pub mod symcurv;

pub use error::{GeoError, Result};
pub use symcurv::DimensionPair;
