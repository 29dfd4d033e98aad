//! Law of the first time a Bessel process started at 1 meets the square-root
//! boundary `R_u² = (b + u) / c`.
//!
//! The crate evaluates the closed-form Mellin–Stieltjes transforms
//! `E[(b + σ)^-s]` for indices `-ν` and `+ν`, inverts them numerically to a
//! density and CDF, and checks the underlying distributional identities by
//! simulating the geometric Brownian motion whose exponential functional is
//! the Bessel clock.
//!
//! Modules, bottom-up:
//! - [`numerics`]: log-gamma, incomplete gamma, gamma-weighted quadrature, KS statistics
//! - [`transforms`]: gamma expectations, the two transform formulas, Tricomi U / Whittaker W
//! - [`inversion`]: contour inversion to density, CDF and quantiles
//! - [`simulate`]: seeded Monte-Carlo of hitting times and perpetuities
//! - [`verify`]: named pass/fail checks producing JSON reports

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod transforms;
pub mod inversion;
pub mod simulate;
pub mod verify;
