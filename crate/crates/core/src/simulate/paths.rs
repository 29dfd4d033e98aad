//! Single-path samplers.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::{path_rng, Lane, PathStreams};
use super::SimConfig;
use crate::error::{domain, Result};
use crate::transforms::{BesselSpec, Boundary, IndexSign};

/// Geometric Brownian motion `E_t = exp(B_t + μt)` and its clock `A_t = ∫ E² ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmState {
    pub t: f64,
    /// Brownian value `B_t`.
    pub b: f64,
    pub e: f64,
    pub a: f64,
}

impl Default for GbmState {
    fn default() -> Self {
        Self {
            t: 0.0,
            b: 0.0,
            e: 1.0,
            a: 0.0,
        }
    }
}

impl GbmState {
    /// Advance by `dt` with Brownian increment `dw` and drift `mu`; `A` by trapezoid.
    #[inline]
    pub fn step(&mut self, mu: f64, dt: f64, dw: f64) {
        let e2_prev = self.e * self.e;
        self.t += dt;
        self.b += dw;
        self.e = (self.b + mu * self.t).exp();
        self.a += 0.5 * dt * (e2_prev + self.e * self.e);
    }
}

/// Brownian increment over one step, summed from `cfg.normals_per_step` normals.
#[inline]
fn increment(rng: &mut impl Rng, cfg: &SimConfig, sub_sd: f64) -> f64 {
    let mut w = 0.0;
    for _ in 0..cfg.normals_per_step {
        let z: f64 = rng.sample(StandardNormal);
        w += z;
    }
    w * sub_sd
}

/// Gamma draw with shape `alpha` and unit scale (Marsaglia–Tsang, with the
/// `U^(1/α)` boost below shape one).
pub fn gamma_sample(alpha: f64, rng: &mut impl Rng) -> Result<f64> {
    let law = Gamma::new(alpha, 1.0)
        .map_err(|e| domain("gamma_sample", format!("shape {alpha}: {e}")))?;
    Ok(law.sample(rng))
}

/// Exact draw of the perpetuity `∫₀^∞ exp(2(B_s - νs)) ds`, as `1/(2γ_ν)`.
pub fn sample_dufresne(nu: f64, rng: &mut impl Rng) -> Result<f64> {
    Ok(0.5 / gamma_sample(nu, rng)?)
}

/// Outcome of one hitting-time simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingSample {
    /// `A_τ`, the hitting time on the Bessel clock (the clock at the horizon if not crossed).
    pub sigma: f64,
    pub crossed: bool,
    /// `τ` on the Brownian clock.
    pub bm_time_at_cross: f64,
}

/// First time `E_t² ≤ (b + A_t)/c` along a simulated path, reported on the
/// Bessel clock. Crossings inside a step are located by linear interpolation;
/// crossings hidden between grid points are caught with the Brownian-bridge
/// probability `exp(-2 D₀ D₁ / dt)`, where `D` is the distance of `ln E` above
/// the boundary at either end of the step.
pub fn sample_hitting_time(
    spec: &BesselSpec,
    bnd: &Boundary,
    cfg: &SimConfig,
    streams: &mut PathStreams,
) -> HittingSample {
    if bnd.is_degenerate() {
        return HittingSample {
            sigma: 0.0,
            crossed: true,
            bm_time_at_cross: 0.0,
        };
    }
    let (b, c) = (bnd.b(), bnd.c());
    let mu = spec.index();
    let dt = cfg.dt;
    let sub_sd = (dt / cfg.normals_per_step as f64).sqrt();
    // Below this ratio E²c/(b+A) the bridge probability can exceed e^-40.
    let near = (2.0 * (20.0 * dt).sqrt()).exp();
    let steps = cfg.steps();

    let mut state = GbmState::default();
    let mut ratio = c / b;
    for _ in 0..steps {
        let prev = state;
        state.step(mu, dt, increment(&mut streams.increments, cfg, sub_sd));
        let level = (b + state.a) / c;
        let e2 = state.e * state.e;
        if e2 <= level {
            let g0 = prev.e * prev.e - (b + prev.a) / c;
            let g1 = e2 - level;
            let theta = g0 / (g0 - g1);
            return HittingSample {
                sigma: prev.a + theta * (state.a - prev.a),
                crossed: true,
                bm_time_at_cross: prev.t + theta * dt,
            };
        }
        let next_ratio = e2 / level;
        if ratio < near || next_ratio < near {
            let d0 = 0.5 * ratio.ln();
            let d1 = 0.5 * next_ratio.ln();
            let p = (-2.0 * d0 * d1 / dt).exp();
            if streams.bridge.random::<f64>() < p {
                return HittingSample {
                    sigma: 0.5 * (prev.a + state.a),
                    crossed: true,
                    bm_time_at_cross: prev.t + 0.5 * dt,
                };
            }
        }
        ratio = next_ratio;
    }
    HittingSample {
        sigma: state.a,
        crossed: false,
        bm_time_at_cross: state.t,
    }
}

/// Truncated perpetuity draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerpetuityDraw {
    pub value: f64,
    /// Increment of `A` over the last unit of Brownian time, relative to `A`.
    pub truncation_bound: f64,
    pub bm_time: f64,
}

/// Relative increment per unit of Brownian time at which the perpetuity stops.
pub const PERPETUITY_STOP: f64 = 1e-10;

/// `A_t = ∫₀^t exp(2(B_s - νs)) ds`, accumulated until it grows by less than
/// [`PERPETUITY_STOP`] relative over one unit of time, or until the horizon.
pub fn sample_perpetuity_truncated(nu: f64, cfg: &SimConfig, rng: &mut impl Rng) -> Result<PerpetuityDraw> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(domain("sample_perpetuity_truncated", format!("nu must be positive, got {nu}")));
    }
    let dt = cfg.dt;
    let sub_sd = (dt / cfg.normals_per_step as f64).sqrt();
    let per_unit = ((1.0 / dt).round() as u64).max(1);
    let steps = cfg.steps();
    let mut state = GbmState::default();
    let mut mark = 0.0;
    let mut bound = f64::INFINITY;
    for k in 1..=steps {
        state.step(-nu, dt, increment(rng, cfg, sub_sd));
        if k % per_unit == 0 {
            bound = (state.a - mark) / state.a;
            if bound < PERPETUITY_STOP {
                break;
            }
            mark = state.a;
        }
    }
    Ok(PerpetuityDraw {
        value: state.a,
        truncation_bound: bound,
        bm_time: state.t,
    })
}

/// The three independent ingredients of one affine-identity pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineDraw {
    pub z1: f64,
    pub z2: f64,
    pub hitting: HittingSample,
}

impl AffineDraw {
    /// `b + Z₁`.
    pub fn lhs(&self, b: f64) -> f64 {
        b + self.z1
    }

    /// `(b + σ)(1 + Z₂/c)`, or `None` when the path did not cross.
    pub fn rhs(&self, b: f64, c: f64) -> Option<f64> {
        self.hitting
            .crossed
            .then(|| (b + self.hitting.sigma) * (1.0 + self.z2 / c))
    }
}

/// Draws `Z₁`, `σ` and `Z₂` for path `path` from separate lanes.
pub fn sample_affine_draw(nu: f64, bnd: &Boundary, cfg: &SimConfig, path: u64) -> Result<AffineDraw> {
    let spec = BesselSpec::new(nu, IndexSign::Negative)?;
    let z1 = sample_dufresne(nu, &mut path_rng(cfg.seed, cfg.stream_id, Lane::FirstPerpetuity, path))?;
    let z2 = sample_dufresne(nu, &mut path_rng(cfg.seed, cfg.stream_id, Lane::SecondPerpetuity, path))?;
    let mut streams = PathStreams::new(cfg.seed, cfg.stream_id, path);
    let hitting = sample_hitting_time(&spec, bnd, cfg, &mut streams);
    Ok(AffineDraw { z1, z2, hitting })
}

/// `(b + Z₁, (b + σ)(1 + Z₂/c))` for path `path`; `None` if σ was not reached.
pub fn sample_affine_pair(nu: f64, bnd: &Boundary, cfg: &SimConfig, path: u64) -> Result<Option<(f64, f64)>> {
    let draw = sample_affine_draw(nu, bnd, cfg, path)?;
    Ok(draw.rhs(bnd.b(), bnd.c()).map(|r| (draw.lhs(bnd.b()), r)))
}
