//! Special functions, quadrature and test statistics shared by every other module.

mod gamma;
mod ks;
mod quadrature;

pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type ComplexValue = Complex64;

pub use gamma::{
    ln_gamma, log_gamma, regularized_incomplete_gamma_lower, regularized_incomplete_gamma_upper,
};
pub(crate) use gamma::recip_gamma;
pub use ks::{
    kolmogorov_survival, ks_coefficient, ks_critical_one_sample, ks_critical_two_sample,
    ks_one_sample, ks_p_value_one_sample, ks_p_value_two_sample, ks_two_sample,
};
pub use quadrature::{
    default_ray_angle, integrate_gamma_weighted, integrate_gamma_weighted_on_ray, integrate_real,
    GaussLaguerre, QuadratureConfig, QuadratureEstimate,
};
pub(crate) use quadrature::{check_alpha, integrate_log_ray};

use crate::error::{Error, Result};

/// Rejects NaN or infinite components.
pub fn ensure_finite(what: &'static str, z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Overflow(what))
    }
}
