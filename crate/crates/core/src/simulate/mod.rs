//! Monte-Carlo construction of the hitting time through geometric Brownian
//! motion and its exponential functional.
//!
//! For index `∓ν`, `E_t = exp(B_t ∓ νt)` is a Bessel process run on the clock
//! `A_t = ∫₀^t E_s² ds`, so the Bessel hitting time of the boundary
//! `R² = (b + u)/c` is `σ = A_τ` with `τ` the first `t` where
//! `E_t² ≤ (b + A_t)/c`. Paths use exact Gaussian increments; batches are
//! computed in parallel with one RNG stream per path and collected in path order.

mod paths;
mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::transforms::{BesselSpec, Boundary};

pub use paths::{
    gamma_sample, sample_affine_draw, sample_affine_pair, sample_dufresne, sample_hitting_time,
    sample_perpetuity_truncated, AffineDraw, GbmState, HittingSample, PerpetuityDraw, PERPETUITY_STOP,
};
pub use rng::{path_rng, Lane, PathStreams};

/// Monte-Carlo controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Brownian time step.
    pub dt: f64,
    /// Horizon on the Brownian clock.
    pub max_bm_time: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub stream_id: u64,
    /// Standard normals summed into each increment. Running at `dt` with 2
    /// reproduces the Brownian path of a run at `dt/2` with 1 on the coarse grid.
    pub normals_per_step: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            max_bm_time: 50.0,
            n_paths: 10_000,
            seed: 42,
            stream_id: 0,
            normals_per_step: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.max_bm_time >= 100.0 * self.dt) || !self.max_bm_time.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "max_bm_time {} must be at least 100·dt = {}",
                self.max_bm_time,
                100.0 * self.dt
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidConfig("n_paths must be at least 1".into()));
        }
        if self.normals_per_step == 0 {
            return Err(Error::InvalidConfig("normals_per_step must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn steps(&self) -> u64 {
        (self.max_bm_time / self.dt).round() as u64
    }
}

/// Mean of a sampled quantity with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MomentEstimate {
    pub fn from_values(values: impl Iterator<Item = f64>) -> Result<Self> {
        let (mut n, mut sum, mut sum_sq) = (0usize, 0.0, 0.0);
        for v in values {
            n += 1;
            sum += v;
            sum_sq += v * v;
        }
        if n < 2 {
            return Err(Error::EmptySample("moment estimate"));
        }
        let mean = sum / n as f64;
        let var = ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0);
        Ok(Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            n,
        })
    }
}

/// Tagged collection of draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub label: String,
    pub seed: u64,
    pub stream_id: u64,
    pub n_requested: usize,
    pub n_valid: usize,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn new(label: impl Into<String>, cfg: &SimConfig, values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::OutOfRange(format!("non-finite sample {bad}")));
        }
        Ok(Self {
            label: label.into(),
            seed: cfg.seed,
            stream_id: cfg.stream_id,
            n_requested: cfg.n_paths,
            n_valid: values.len(),
            values,
        })
    }

    /// `#`-prefixed metadata, then a `value` header and one value per line.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "# label: {}", self.label)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# stream_id: {}", self.stream_id)?;
        writeln!(w, "# n_requested: {}", self.n_requested)?;
        writeln!(w, "# n_valid: {}", self.n_valid)?;
        writeln!(w, "value")?;
        for v in &self.values {
            writeln!(w, "{v:e}")?;
        }
        Ok(())
    }
}

/// Hitting times of a batch of paths, in path order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingBatch {
    pub spec: BesselSpec,
    pub boundary: Boundary,
    pub config: SimConfig,
    pub samples: Vec<HittingSample>,
}

/// Simulates `cfg.n_paths` hitting times in parallel.
pub fn simulate_hitting_times(spec: &BesselSpec, bnd: &Boundary, cfg: &SimConfig) -> Result<HittingBatch> {
    cfg.validate()?;
    let samples = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| sample_hitting_time(spec, bnd, cfg, &mut PathStreams::new(cfg.seed, cfg.stream_id, i)))
        .collect();
    Ok(HittingBatch {
        spec: *spec,
        boundary: *bnd,
        config: *cfg,
        samples,
    })
}

impl HittingBatch {
    pub fn n_crossed(&self) -> usize {
        self.samples.iter().filter(|s| s.crossed).count()
    }

    pub fn excluded_fraction(&self) -> f64 {
        1.0 - self.n_crossed() as f64 / self.samples.len() as f64
    }

    /// σ of the crossed paths.
    pub fn sigmas(&self) -> Vec<f64> {
        self.samples.iter().filter(|s| s.crossed).map(|s| s.sigma).collect()
    }

    /// Estimate of `E[(b + σ)^-s]` over the crossed paths.
    pub fn mellin_estimate(&self, s: f64) -> Result<MomentEstimate> {
        let b = self.boundary.b();
        MomentEstimate::from_values(
            self.samples
                .iter()
                .filter(|x| x.crossed)
                .map(|x| (b + x.sigma).powf(-s)),
        )
    }

    pub fn sample_set(&self, label: impl Into<String>) -> Result<SampleSet> {
        SampleSet::new(label, &self.config, self.sigmas())
    }
}

/// Truncated perpetuities, one per path, from the increment lane.
pub fn simulate_perpetuities(nu: f64, cfg: &SimConfig) -> Result<Vec<PerpetuityDraw>> {
    cfg.validate()?;
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| sample_perpetuity_truncated(nu, cfg, &mut path_rng(cfg.seed, cfg.stream_id, Lane::Increments, i)))
        .collect()
}

/// Exact perpetuity draws `1/(2γ_ν)`, one per path.
pub fn sample_dufresne_batch(nu: f64, cfg: &SimConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| sample_dufresne(nu, &mut path_rng(cfg.seed, cfg.stream_id, Lane::FirstPerpetuity, i)))
        .collect()
}

/// Ingredients of `cfg.n_paths` affine-identity pairs.
pub fn simulate_affine(nu: f64, bnd: &Boundary, cfg: &SimConfig) -> Result<Vec<AffineDraw>> {
    cfg.validate()?;
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| sample_affine_draw(nu, bnd, cfg, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{
        ks_critical_one_sample, ks_critical_two_sample, ks_one_sample, ks_two_sample,
        regularized_incomplete_gamma_lower,
    };
    use crate::transforms::IndexSign;
    use proptest::prelude::*;

    fn cfg(n: usize, dt: f64, seed: u64) -> SimConfig {
        SimConfig {
            dt,
            n_paths: n,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        assert!(SimConfig { dt: 0.0, ..Default::default() }.validate().is_err());
        assert!(SimConfig { max_bm_time: 1e-3, ..Default::default() }.validate().is_err());
        assert!(SimConfig { n_paths: 0, ..Default::default() }.validate().is_err());
        assert!(SimConfig { normals_per_step: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn gamma_sampler_mean() {
        let mut rng = path_rng(1, 0, Lane::FirstPerpetuity, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| gamma_sample(2.5, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 2.5).abs() < 3.0 * (2.5 / n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn gamma_sampler_fits_its_cdf() {
        let n = 100_000;
        for (alpha, seed) in [(0.3, 2u64), (1.0, 3)] {
            let mut rng = path_rng(seed, 0, Lane::FirstPerpetuity, 0);
            let xs: Vec<f64> = (0..n).map(|_| gamma_sample(alpha, &mut rng).unwrap()).collect();
            let d = ks_one_sample(&xs, |x| regularized_incomplete_gamma_lower(alpha, x).unwrap()).unwrap();
            assert!(d < ks_critical_one_sample(0.01, n), "alpha={alpha}: D={d}");
        }
        let mut rng = path_rng(4, 0, Lane::FirstPerpetuity, 0);
        let xs: Vec<f64> = (0..n).map(|_| gamma_sample(1.0, &mut rng).unwrap()).collect();
        let d = ks_one_sample(&xs, |x| 1.0 - (-x).exp()).unwrap();
        assert!(d < ks_critical_one_sample(0.01, n));
        assert!(gamma_sample(0.0, &mut rng).is_err());
    }

    #[test]
    fn dufresne_sampler_moments() {
        let n = 1_000_000;
        let mut z = sample_dufresne_batch(1.0, &cfg(n, 1e-2, 5)).unwrap();
        assert!(z.iter().all(|&v| v > 0.0));
        z.sort_by(f64::total_cmp);
        let median = z[n / 2];
        let want = 0.5 / std::f64::consts::LN_2;
        assert!((median - want).abs() < 0.01 * want, "median {median}");

        let z = sample_dufresne_batch(0.5, &cfg(n, 1e-2, 6)).unwrap();
        let est = MomentEstimate::from_values(z.iter().map(|v| 1.0 / v)).unwrap();
        assert!((est.mean - 1.0).abs() < 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn truncated_perpetuity_matches_exact_sampler() {
        let n = 100_000;
        let c = cfg(n, 1e-2, 7);
        let truncated: Vec<f64> = simulate_perpetuities(1.0, &c).unwrap().iter().map(|d| d.value).collect();
        assert!(truncated.iter().all(|&v| v > 0.0));
        let exact = sample_dufresne_batch(1.0, &SimConfig { seed: 8, ..c }).unwrap();
        let d = ks_two_sample(&truncated, &exact).unwrap();
        assert!(d < ks_critical_two_sample(0.01, n, n), "D={d}");
    }

    #[test]
    fn truncated_perpetuity_moments() {
        // E[1/Z] = 2ν has finite variance; E[Z] = 1/(2(ν-1)) does not at ν = 1.5,
        // so the mean is checked with a loose absolute tolerance only.
        let n = 40_000;
        let draws = simulate_perpetuities(1.5, &cfg(n, 1e-2, 9)).unwrap();
        let inv = MomentEstimate::from_values(draws.iter().map(|d| 1.0 / d.value)).unwrap();
        assert!((inv.mean - 3.0).abs() < 3.0 * inv.std_error, "{inv:?}");
        let mean = draws.iter().map(|d| d.value).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.1, "mean {mean}");
        assert!(draws.iter().all(|d| d.truncation_bound < PERPETUITY_STOP || d.bm_time >= 50.0 - 1e-9));
    }

    #[test]
    fn degenerate_boundary_hits_at_once() {
        let spec = BesselSpec::new(0.5, IndexSign::Negative).unwrap();
        let bnd = Boundary::degenerate(1.0).unwrap();
        let batch = simulate_hitting_times(&spec, &bnd, &cfg(10, 1e-3, 1)).unwrap();
        assert!(batch.samples.iter().all(|s| s.crossed && s.sigma == 0.0 && s.bm_time_at_cross == 0.0));
    }

    #[test]
    fn batches_do_not_depend_on_thread_count() {
        let spec = BesselSpec::new(0.5, IndexSign::Positive).unwrap();
        let bnd = Boundary::new(0.25, 1.0).unwrap();
        let c = cfg(300, 1e-3, 11);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_hitting_times(&spec, &bnd, &c).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn crossing_condition_holds_at_tau() {
        let spec = BesselSpec::new(0.5, IndexSign::Negative).unwrap();
        let bnd = Boundary::new(0.25, 1.0).unwrap();
        let c = cfg(2000, 1e-3, 12);
        let batch = simulate_hitting_times(&spec, &bnd, &c).unwrap();
        assert_eq!(batch.n_crossed(), 2000);
        assert!(batch.samples.iter().all(|s| s.sigma > 0.0 && s.bm_time_at_cross > 0.0));
        // Crossing is downward, so σ must exceed the first time the clock
        // could make (b + A)/c reach 1.
        let floor = bnd.c() - bnd.b();
        assert!(batch.samples.iter().all(|s| s.sigma < 1e6 && s.sigma.is_finite()));
        assert!(batch.sigmas().iter().any(|&s| s < floor));
    }

    #[test]
    fn exponential_martingale_has_unit_mean() {
        let c = SimConfig {
            dt: 1e-2,
            max_bm_time: 1.0,
            ..Default::default()
        };
        let n = 100_000;
        let values = (0..n as u64).map(|i| {
            let mut rng = path_rng(13, 0, Lane::Increments, i);
            let mut state = GbmState::default();
            for _ in 0..c.steps() {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                state.step(-0.5, c.dt, z * c.dt.sqrt());
            }
            state.e
        });
        let est = MomentEstimate::from_values(values).unwrap();
        assert!((est.mean - 1.0).abs() < 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn affine_components_exceed_b() {
        let bnd = Boundary::new(0.25, 1.0).unwrap();
        let c = cfg(500, 1e-3, 14);
        for i in 0..c.n_paths as u64 {
            if let Some((l, r)) = sample_affine_pair(0.5, &bnd, &c, i).unwrap() {
                assert!(l > 0.25 && r > 0.25);
            }
        }
    }

    #[test]
    fn sample_set_csv() {
        let set = SampleSet::new("x", &cfg(3, 1e-3, 1), vec![1.0, 2.5]).unwrap();
        let mut out = Vec::new();
        set.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("# label: x\n"));
        assert!(text.ends_with("value\n1e0\n2.5e0\n"));
        assert!(SampleSet::new("x", &cfg(3, 1e-3, 1), vec![f64::NAN]).is_err());
    }

    use rand::Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn clock_is_consistent(seed in any::<u64>(), mu in -2.0f64..2.0, dt in 1e-4f64..1e-1) {
            let mut rng = path_rng(seed, 0, Lane::Increments, 0);
            let mut state = GbmState::default();
            prop_assert_eq!(state.a, 0.0);
            prop_assert_eq!(state.e, 1.0);
            for _ in 0..200 {
                let prev = state;
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                state.step(mu, dt, z * dt.sqrt());
                prop_assert!(state.e > 0.0);
                prop_assert!(state.a >= prev.a);
                let bound = dt * (prev.e * prev.e).max(state.e * state.e);
                prop_assert!(state.a - prev.a <= bound * (1.0 + 1e-12) + 4.0 * f64::EPSILON * state.a);
            }
        }
    }
}
