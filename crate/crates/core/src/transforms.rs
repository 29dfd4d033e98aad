//! Mellin–Stieltjes transforms `s ↦ E[(b + σ)^-s]` of the hitting time of the
//! boundary `R_u² = (b + u) / c`, and the confluent hypergeometric functions
//! that give an independent route to the same gamma expectations.
//!
//! Everything is built on
//!
//! ```text
//! E(α, β, p) = E[(1 + 2β γ_α)^-p] = Γ(α)⁻¹ ∫₀^∞ (1 + 2βx)^-p x^(α-1) e^-x dx
//! ```
//!
//! For index `-ν` the transform is `c^-s E(ν+s, b, s) / E(ν+s, c, s)`; for index
//! `+ν` it is `c^-s E(s, b, s-ν) / E(s, c, s-ν)`. Both are evaluated as
//! differences of logarithms so that contour points with large `Im s`, where
//! the individual expectations leave the floating-point range, stay usable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{domain, Error, Result};
use crate::numerics::{
    check_alpha, default_ray_angle, ensure_finite, integrate_log_ray, log_gamma, recip_gamma,
    QuadratureConfig,
};

/// Sign of the Bessel index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexSign {
    Negative,
    Positive,
}

/// A Bessel process of index `-ν` or `+ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselSpec {
    nu: f64,
    sign: IndexSign,
}

impl BesselSpec {
    pub fn new(nu: f64, sign: IndexSign) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(domain("BesselSpec::new", format!("index magnitude must be positive, got {nu}")));
        }
        Ok(Self { nu, sign })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sign(&self) -> IndexSign {
        self.sign
    }

    /// Signed index, `-ν` or `+ν`.
    pub fn index(&self) -> f64 {
        match self.sign {
            IndexSign::Negative => -self.nu,
            IndexSign::Positive => self.nu,
        }
    }

    /// Dimension δ = 2(1 + index).
    pub fn dimension(&self) -> f64 {
        2.0 * (1.0 + self.index())
    }
}

/// The square-root boundary `R_u² = (b + u) / c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    b: f64,
    c: f64,
}

impl Boundary {
    /// Requires `0 < b < c`.
    pub fn new(b: f64, c: f64) -> Result<Self> {
        if !(b > 0.0 && b < c && c.is_finite()) {
            return Err(domain("Boundary::new", format!("requires 0 < b < c, got b={b}, c={c}")));
        }
        Ok(Self { b, c })
    }

    /// The limiting boundary `b = c`, for which the hitting time is zero.
    pub fn degenerate(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain("Boundary::degenerate", format!("requires c > 0, got {c}")));
        }
        Ok(Self { b: c, c })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_degenerate(&self) -> bool {
        self.b == self.c
    }
}

/// A Mellin evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformQuery {
    pub s: Complex64,
    /// True when `s` is real and non-negative, where the value is a moment.
    pub closed_form_regime: bool,
}

impl TransformQuery {
    pub fn new(s: Complex64) -> Self {
        Self {
            s,
            closed_form_regime: s.im == 0.0 && s.re >= 0.0,
        }
    }
}

/// Tolerance semantics for the log-domain kernel.
#[derive(Debug, Clone, Copy)]
enum Tolerance {
    /// `abs_tol` applies to the expectation, `rel_tol` to its modulus.
    Expectation,
    /// Only `rel_tol` applies.
    RelativeOnly,
}

/// E[(1 + 2β γ_α)^-p] for `Re α > 0`, `β > 0`, continued analytically in `α` and `p`.
pub fn gamma_expectation(
    alpha: Complex64,
    beta: f64,
    p: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let ln_e = ln_gamma_expectation(alpha, beta, p, cfg, Tolerance::Expectation)?;
    ensure_finite("gamma_expectation", ln_e.exp())
}

/// Ray angle for `∫ (1+2βx)^-p x^(α-1) e^-x dx`.
///
/// When `α` and `p` share a large imaginary part `t` (the transform integrands)
/// the modulus carries `exp(-t (arg x - arg(1 + 2βx)))` and the saddle of the
/// large-`t` approximation `x^(ν-1) exp(-x - s/(2βx))` sits at `arg x = arg(s)/2`,
/// so `±π/4` is used. Otherwise the ray follows `α` alone.
fn expectation_ray_angle(alpha: Complex64, p: Complex64) -> f64 {
    let t = alpha.im;
    if t.abs() > 1.0 && p.im * t > 0.0 {
        FRAC_PI_4.copysign(t)
    } else if p.im.abs() <= 1.0 {
        default_ray_angle(alpha)
    } else {
        0.0
    }
}

/// log E(α, β, p); the imaginary part is only defined modulo 2π.
fn ln_gamma_expectation(
    alpha: Complex64,
    beta: f64,
    p: Complex64,
    cfg: &QuadratureConfig,
    tol: Tolerance,
) -> Result<Complex64> {
    cfg.validate()?;
    check_alpha("gamma_expectation", alpha)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain("gamma_expectation", format!("β must be positive, got {beta}")));
    }
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(domain("gamma_expectation", format!("exponent must be finite, got {p}")));
    }
    if p == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_gamma_alpha = log_gamma(alpha)?;
    let am1 = alpha - 1.0;
    let two_beta = 2.0 * beta;
    let log_g = |x: Complex64| -p * (1.0 + two_beta * x).ln() + am1 * x.ln() - x;
    let log_abs_tol = match tol {
        Tolerance::Expectation => cfg.abs_tol.ln() + ln_gamma_alpha.re,
        Tolerance::RelativeOnly => f64::NEG_INFINITY,
    };
    let theta = expectation_ray_angle(alpha, p);
    let integral = integrate_log_ray(&log_g, alpha, theta, log_abs_tol, cfg.rel_tol, cfg.max_subdivisions)
        .map_err(|e| rescale_failure(e, ln_gamma_alpha))?;
    Ok(integral.ln() - ln_gamma_alpha)
}

/// Re-expresses a failed integral's estimate and bound as expectations.
fn rescale_failure(err: Error, ln_gamma_alpha: Complex64) -> Error {
    match err {
        Error::ToleranceNotMet {
            estimate,
            error_bound,
            requested,
        } => {
            let inv = (-ln_gamma_alpha).exp();
            let scale = inv.norm();
            Error::ToleranceNotMet {
                estimate: estimate * inv,
                error_bound: error_bound * scale,
                requested: requested * scale,
            }
        }
        other => other,
    }
}

/// E[(b+σ)^-s] for the index `-ν` process started at 1.
pub fn mellin_neg_index(
    nu: f64,
    bnd: &Boundary,
    s: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_nu("mellin_neg_index", nu)?;
    let alpha = s + nu;
    if !(alpha.re > 0.0) {
        return Err(domain("mellin_neg_index", format!("requires Re(ν + s) > 0, got ν={nu}, s={s}")));
    }
    if s == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    mellin_ratio(bnd, s, alpha, s, cfg, "mellin_neg_index")
}

/// E[(b+σ)^-s] for the index `+ν` process started at 1.
///
/// Real `s` below 1e-8 returns the limit 1.
pub fn mellin_pos_index(
    nu: f64,
    bnd: &Boundary,
    s: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_nu("mellin_pos_index", nu)?;
    if s.im == 0.0 && (0.0..POS_INDEX_CUTOFF).contains(&s.re) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if !(s.re > 0.0) {
        return Err(domain("mellin_pos_index", format!("requires Re s > 0, got {s}")));
    }
    mellin_ratio(bnd, s, s, s - nu, cfg, "mellin_pos_index")
}

const POS_INDEX_CUTOFF: f64 = 1e-8;

/// Dispatches on the sign of the index.
pub fn mellin(spec: &BesselSpec, bnd: &Boundary, s: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    match spec.sign() {
        IndexSign::Negative => mellin_neg_index(spec.nu(), bnd, s, cfg),
        IndexSign::Positive => mellin_pos_index(spec.nu(), bnd, s, cfg),
    }
}

fn check_nu(op: &'static str, nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("ν must be positive, got {nu}")))
    }
}

fn mellin_ratio(
    bnd: &Boundary,
    s: Complex64,
    alpha: Complex64,
    p: Complex64,
    cfg: &QuadratureConfig,
    op: &'static str,
) -> Result<Complex64> {
    let ln_c = bnd.c().ln();
    if bnd.is_degenerate() {
        return ensure_finite(op, (-s * ln_c).exp());
    }
    let num = ln_gamma_expectation(alpha, bnd.b(), p, cfg, Tolerance::RelativeOnly)?;
    let den = ln_gamma_expectation(alpha, bnd.c(), p, cfg, Tolerance::RelativeOnly)?;
    ensure_finite(op, (-s * ln_c + num - den).exp())
}

/// `|M₊(s) - c^-ν M₋(s-ν)|`, which vanishes identically; requires `s ≥ ν`.
pub fn duality_residual(nu: f64, bnd: &Boundary, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_nu("duality_residual", nu)?;
    if !(s >= nu) {
        return Err(domain("duality_residual", format!("requires s ≥ ν, got s={s}, ν={nu}")));
    }
    let pos = mellin_pos_index(nu, bnd, Complex64::new(s, 0.0), cfg)?;
    let neg = mellin_neg_index(nu, bnd, Complex64::new(s - nu, 0.0), cfg)?;
    Ok((pos - neg * bnd.c().powf(-nu)).norm())
}

// --- confluent hypergeometric functions -------------------------------------

/// Distance from an integer below which the connection formula is refused.
pub const NEAR_INTEGER_TOL: f64 = 1e-6;

/// Tricomi U(a, b, z) for `z > 0`.
///
/// Uses the integral representation when `Re a > 0`, otherwise the Kummer
/// connection formula, which is refused for `b` near an integer.
pub fn tricomi_u(a: Complex64, b: Complex64, z: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if a.re > 0.0 {
        tricomi_u_integral(a, b, z, cfg)
    } else {
        tricomi_u_series(a, b, z)
    }
}

/// U(a, b, z) = Γ(a)⁻¹ ∫₀^∞ e^(-zt) t^(a-1) (1+t)^(b-a-1) dt, integrated in x = zt.
pub fn tricomi_u_integral(a: Complex64, b: Complex64, z: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_z("tricomi_u_integral", z)?;
    cfg.validate()?;
    check_alpha("tricomi_u_integral", a)?;
    let am1 = a - 1.0;
    let e = b - a - 1.0;
    let inv_z = 1.0 / z;
    let log_g = |x: Complex64| am1 * x.ln() - x + e * (1.0 + x * inv_z).ln();
    let ln_gamma_a = log_gamma(a)?;
    let theta = default_ray_angle(a);
    let integral = integrate_log_ray(&log_g, a, theta, f64::NEG_INFINITY, cfg.rel_tol, cfg.max_subdivisions)?;
    ensure_finite("tricomi_u_integral", (integral.ln() - ln_gamma_a - a * z.ln()).exp())
}

/// U(a, b, z) from the connection formula
/// `U = π / sin(πb) [M(a,b,z) / (Γ(b) Γ(a-b+1)) - z^(1-b) M(a-b+1, 2-b, z) / (Γ(a) Γ(2-b))]`.
///
/// Accurate for moderate `z`; the two Kummer terms cancel roughly like `e^z`.
pub fn tricomi_u_series(a: Complex64, b: Complex64, z: f64) -> Result<Complex64> {
    let (u, cancellation) = tricomi_u_series_conditioned(a, b, z)?;
    if cancellation > 1e6 {
        log::warn!("Kummer connection formula cancels by {cancellation:.1e} at a={a}, b={b}, z={z}");
    }
    Ok(u)
}

/// The series value together with `(|T₁| + |T₂|) / |T₁ - T₂|` for its two terms.
pub(crate) fn tricomi_u_series_conditioned(a: Complex64, b: Complex64, z: f64) -> Result<(Complex64, f64)> {
    check_z("tricomi_u_series", z)?;
    // the slack admits b = α + 1 - p with p shifted by exactly the tolerance
    if b.im == 0.0 && (b.re - b.re.round()).abs() < NEAR_INTEGER_TOL * (1.0 - 1e-6) {
        return Err(Error::NearIntegerParameter {
            b: b.re,
            tol: NEAR_INTEGER_TOL,
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let zc = Complex64::new(z, 0.0);
    let m1 = kummer_m(a, b, z)? * recip_gamma(b) * recip_gamma(a - b + one);
    let m2 = kummer_m(a - b + one, 2.0 - b, z)?
        * recip_gamma(2.0 - b)
        * recip_gamma(a)
        * ((one - b) * zc.ln()).exp();
    let diff = m1 - m2;
    let u = ensure_finite("tricomi_u_series", diff * PI / (b * PI).sin())?;
    Ok((u, (m1.norm() + m2.norm()) / diff.norm()))
}

/// Kummer's M(a, b, z) by its power series.
fn kummer_m(a: Complex64, b: Complex64, z: f64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..20_000 {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * (z / (kf + 1.0));
        sum += term;
        if kf > z + a.norm() && term.norm() <= 1e-17 * sum.norm() {
            return Ok(sum);
        }
        if !(term.re.is_finite() && term.im.is_finite()) {
            break;
        }
    }
    Err(Error::SeriesDivergence("Kummer M series"))
}

fn check_z(op: &'static str, z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("requires z > 0, got {z}")))
    }
}

/// E[(1 + 2βγ_α)^-p] through `(2β)^-α U(α, α+1-p, 1/(2β))` on the series path.
///
/// Errors with [`Error::NearIntegerParameter`] when `α + 1 - p` is within 1e-6 of
/// an integer; callers may shift `p` by 1e-6 and retry.
pub fn gamma_expectation_via_u(alpha: f64, beta: f64, p: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(domain(
            "gamma_expectation_via_u",
            format!("requires α > 0 and β > 0, got α={alpha}, β={beta}"),
        ));
    }
    let two_beta = 2.0 * beta;
    let u = tricomi_u_series(
        Complex64::new(alpha, 0.0),
        Complex64::new(alpha + 1.0 - p, 0.0),
        1.0 / two_beta,
    )?;
    Ok(two_beta.powf(-alpha) * u.re)
}

/// Whittaker W_{κ,μ}(z) = e^(-z/2) z^(μ+1/2) U(μ-κ+1/2, 1+2μ, z).
pub fn whittaker_w(kappa: f64, mu: f64, z: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_z("whittaker_w", z)?;
    let a = Complex64::new(mu - kappa + 0.5, 0.0);
    let b = Complex64::new(1.0 + 2.0 * mu, 0.0);
    let u = tricomi_u(a, b, z, cfg)?;
    Ok((-0.5 * z + (mu + 0.5) * z.ln()).exp() * u.re)
}
