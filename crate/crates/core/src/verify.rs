//! Named, seeded pass/fail checks of the distributional identities.
//!
//! Each check returns one or more [`VerificationReport`]s with
//! `passed == (statistic <= threshold)`. [`run_check`] runs the pinned
//! parameter sets used by the command-line `verify` subcommand.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{domain, Error, Result};
use crate::inversion::{
    cdf_from_density, CdfTable, Contour, DensityCurve, InversionConfig, Orientation,
};
use crate::numerics::{
    ks_critical_one_sample, ks_critical_two_sample, ks_one_sample, ks_two_sample,
    regularized_incomplete_gamma_upper, QuadratureConfig,
};
use crate::simulate::{
    simulate_affine, simulate_hitting_times, simulate_perpetuities, SimConfig, PERPETUITY_STOP,
};
use crate::transforms::{
    duality_residual, gamma_expectation, gamma_expectation_via_u, mellin, BesselSpec, Boundary,
    IndexSign,
};

/// Significance level of every KS check.
pub const KS_LEVEL: f64 = 0.01;
/// Largest admissible z-score of a Monte-Carlo moment.
pub const Z_THRESHOLD: f64 = 3.5;
/// Largest admissible duality residual.
pub const DUALITY_THRESHOLD: f64 = 1e-10;
/// Largest admissible relative disagreement of the two gamma-expectation paths.
pub const WHITTAKER_THRESHOLD: f64 = 1e-7;
/// Extra KS allowance for inversion truncation.
pub const INVERSION_ALLOWANCE: f64 = 0.01;
/// Excluded-path fraction above which a note is added.
pub const EXCLUDED_WARNING: f64 = 1e-3;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub params: Value,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub n_samples: usize,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
    /// Named intermediate quantities (per-point estimates, excluded fractions).
    pub details: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn new(name: &str, params: Value, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            params,
            statistic,
            threshold,
            passed: statistic <= threshold,
            n_samples: 0,
            seed: None,
            notes: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    fn with_samples(mut self, n: usize, seed: u64) -> Self {
        self.n_samples = n;
        self.seed = Some(seed);
        self
    }
}

/// Fixed-width summary, one line per report.
pub fn format_table(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {:>14} {:>14} {:>7}", "check", "statistic", "threshold", "result");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<28} {:>14.6e} {:>14.6e} {:>7}",
            r.name,
            r.statistic,
            r.threshold,
            if r.passed { "pass" } else { "FAIL" }
        );
        for note in &r.notes {
            let _ = writeln!(out, "    {note}");
        }
    }
    out
}

fn check_n(op: &'static str, n: usize) -> Result<()> {
    if n < 10_000 {
        return Err(domain(op, format!("needs at least 10^4 samples, got {n}")));
    }
    Ok(())
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Time step of the truncated perpetuities in the Dufresne check.
pub const PERPETUITY_DT: f64 = 1e-2;
/// Brownian horizon of the truncated perpetuities. At ν = 0.3 the exponent
/// `B_t - νt` is still within reach of zero at t = 50 for a sizeable share of
/// paths; at t = 200 it sits about four standard deviations below.
pub const PERPETUITY_HORIZON: f64 = 200.0;

/// One-sample KS of truncated perpetuities against `y ↦ Q(ν, 1/(2y))`.
pub fn verify_dufresne(nu: f64, n: usize, seed: u64) -> Result<VerificationReport> {
    verify_dufresne_against(nu, nu, n, seed, 0)
}

/// As [`verify_dufresne`], with the reference CDF built from `reference_nu`
/// (a value other than `nu` is a negative control).
pub fn verify_dufresne_against(
    nu: f64,
    reference_nu: f64,
    n: usize,
    seed: u64,
    stream_id: u64,
) -> Result<VerificationReport> {
    check_n("verify_dufresne", n)?;
    let cfg = SimConfig {
        dt: PERPETUITY_DT,
        max_bm_time: PERPETUITY_HORIZON,
        n_paths: n,
        seed,
        stream_id,
        ..Default::default()
    };
    let draws = simulate_perpetuities(nu, &cfg)?;
    let values: Vec<f64> = draws.iter().map(|d| d.value).collect();
    let cdf = |y: f64| regularized_incomplete_gamma_upper(reference_nu, 0.5 / y).unwrap_or(f64::NAN);
    let d = ks_one_sample(&values, cdf)?;
    let params = json!({
        "nu": nu,
        "reference_nu": reference_nu,
        "dt": cfg.dt,
        "max_bm_time": cfg.max_bm_time,
        "stream_id": stream_id,
    });
    let mut report = VerificationReport::new("dufresne", params, d, ks_critical_one_sample(KS_LEVEL, n))
        .with_samples(n, seed);
    let truncated = draws.iter().filter(|d| d.truncation_bound >= PERPETUITY_STOP).count();
    let worst = draws.iter().map(|d| d.truncation_bound).fold(0.0, f64::max);
    report.details.insert("horizon_reached_fraction".into(), truncated as f64 / n as f64);
    report.details.insert("worst_truncation_bound".into(), worst);
    if truncated > 0 {
        report.notes.push(format!(
            "{truncated} draws reached the horizon before the stopping rule; worst last-unit relative increment {worst:.2e}"
        ));
    }
    Ok(report)
}

/// Two-sample KS between `b + Z₁` and `(b + σ)(1 + Z₂/c)`.
pub fn verify_affine(nu: f64, bnd: &Boundary, n: usize, dt: f64, seed: u64) -> Result<VerificationReport> {
    verify_affine_shifted(nu, bnd, n, dt, seed, 0, 0.0)
}

/// As [`verify_affine`], with the right-hand side built from `b + rhs_shift`
/// (nonzero is a negative control).
pub fn verify_affine_shifted(
    nu: f64,
    bnd: &Boundary,
    n: usize,
    dt: f64,
    seed: u64,
    stream_id: u64,
    rhs_shift: f64,
) -> Result<VerificationReport> {
    check_n("verify_affine", n)?;
    let cfg = SimConfig {
        dt,
        n_paths: n,
        seed,
        stream_id,
        ..Default::default()
    };
    let draws = simulate_affine(nu, bnd, &cfg)?;
    let (b, c) = (bnd.b(), bnd.c());
    let lhs: Vec<f64> = draws.iter().map(|d| d.lhs(b)).collect();
    let rhs: Vec<f64> = draws.iter().filter_map(|d| d.rhs(b + rhs_shift, c)).collect();
    let d = ks_two_sample(&lhs, &rhs)?;
    let excluded = 1.0 - rhs.len() as f64 / n as f64;
    let params = json!({
        "nu": nu, "b": b, "c": c, "dt": dt, "max_bm_time": cfg.max_bm_time,
        "rhs_shift": rhs_shift, "stream_id": stream_id,
    });
    let threshold = ks_critical_two_sample(KS_LEVEL, lhs.len(), rhs.len());
    let mut report = VerificationReport::new("affine", params, d, threshold).with_samples(n, seed);
    report.details.insert("excluded_fraction".into(), excluded);
    if excluded > EXCLUDED_WARNING {
        report.notes.push(format!("excluded (non-crossed) fraction {excluded:.2e} exceeds {EXCLUDED_WARNING:e}"));
    }
    Ok(report)
}

/// Largest z-score of `E[(b + σ)^-s]` against the closed form over `s_grid`.
pub fn verify_transform_mc(
    spec: &BesselSpec,
    bnd: &Boundary,
    s_grid: &[f64],
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<VerificationReport> {
    verify_transform_mc_scaled(spec, bnd, s_grid, n, dt, seed, 0, 1.0)
}

/// As [`verify_transform_mc`], comparing against `scale` times the closed form
/// (anything but 1 is a negative control).
#[allow(clippy::too_many_arguments)]
pub fn verify_transform_mc_scaled(
    spec: &BesselSpec,
    bnd: &Boundary,
    s_grid: &[f64],
    n: usize,
    dt: f64,
    seed: u64,
    stream_id: u64,
    scale: f64,
) -> Result<VerificationReport> {
    check_n("verify_transform_mc", n)?;
    if s_grid.is_empty() {
        return Err(Error::EmptySample("verify_transform_mc s grid"));
    }
    let cfg = SimConfig {
        dt,
        n_paths: n,
        seed,
        stream_id,
        ..Default::default()
    };
    let batch = simulate_hitting_times(spec, bnd, &cfg)?;
    let mut details = BTreeMap::new();
    let mut worst = 0.0_f64;
    for &s in s_grid {
        let closed = scale * mellin(spec, bnd, Complex64::new(s, 0.0), &quad())?.re;
        let est = batch.mellin_estimate(s)?;
        let z = (est.mean - closed).abs() / est.std_error;
        worst = worst.max(z);
        details.insert(format!("s={s}:closed_form"), closed);
        details.insert(format!("s={s}:mc_mean"), est.mean);
        details.insert(format!("s={s}:mc_std_error"), est.std_error);
        details.insert(format!("s={s}:z"), z);
    }
    let excluded = batch.excluded_fraction();
    details.insert("excluded_fraction".into(), excluded);
    let params = json!({
        "nu": spec.nu(), "index": spec.sign(), "b": bnd.b(), "c": bnd.c(), "s_grid": s_grid,
        "dt": dt, "max_bm_time": cfg.max_bm_time, "closed_form_scale": scale, "stream_id": stream_id,
    });
    let mut report = VerificationReport::new("transform-mc", params, worst, Z_THRESHOLD).with_samples(n, seed);
    report.details = details;
    report.notes.push(format!("excluded (non-crossed) fraction {excluded:.3e}"));
    Ok(report)
}

/// Largest duality residual over `s = ν + offset` for the given parameter sets.
pub fn verify_duality(sets: &[(f64, Boundary)], s_offsets: &[f64]) -> Result<VerificationReport> {
    if sets.is_empty() || s_offsets.is_empty() {
        return Err(Error::EmptySample("verify_duality grid"));
    }
    let mut worst = 0.0_f64;
    let mut details = BTreeMap::new();
    for (nu, bnd) in sets {
        for &ds in s_offsets {
            let r = duality_residual(*nu, bnd, nu + ds, &quad())?;
            details.insert(format!("nu={nu},b={},c={},s={}", bnd.b(), bnd.c(), nu + ds), r);
            worst = worst.max(r);
        }
    }
    let params = json!({
        "sets": sets.iter().map(|(nu, b)| json!({"nu": nu, "b": b.b(), "c": b.c()})).collect::<Vec<_>>(),
        "s_offsets": s_offsets,
    });
    let mut report = VerificationReport::new("duality", params, worst, DUALITY_THRESHOLD);
    report.n_samples = details.len();
    report.details = details;
    Ok(report)
}

/// Seeded `(α, β, p)` points for the two gamma-expectation paths, avoiding a
/// second Tricomi parameter `α + 1 - p` within 1e-3 of an integer.
pub fn whittaker_grid(points: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Vec::with_capacity(points);
    while grid.len() < points {
        let alpha: f64 = rng.random_range(0.2..4.0);
        let beta: f64 = rng.random_range(0.05..2.0);
        let p: f64 = rng.random_range(0.0..4.0);
        let second = alpha + 1.0 - p;
        if (second - second.round()).abs() >= 1e-3 {
            grid.push((alpha, beta, p));
        }
    }
    grid
}

/// Largest relative disagreement between quadrature and Tricomi-U evaluations
/// of `E[(1 + 2βγ_α)^-p]`.
pub fn verify_whittaker(grid: &[(f64, f64, f64)], seed: u64) -> Result<VerificationReport> {
    if grid.is_empty() {
        return Err(Error::EmptySample("verify_whittaker grid"));
    }
    let mut worst = 0.0_f64;
    let mut details = BTreeMap::new();
    for &(alpha, beta, p) in grid {
        let q = gamma_expectation(Complex64::new(alpha, 0.0), beta, Complex64::new(p, 0.0), &quad())?.re;
        let u = gamma_expectation_via_u(alpha, beta, p)?;
        let rel = (q - u).abs() / q.abs();
        details.insert(format!("alpha={alpha},beta={beta},p={p}"), rel);
        worst = worst.max(rel);
    }
    let params = json!({ "points": grid.len(), "grid": grid });
    let mut report = VerificationReport::new("whittaker", params, worst, WHITTAKER_THRESHOLD);
    report.n_samples = grid.len();
    report.seed = Some(seed);
    report.details = details;
    Ok(report)
}

/// Points, lower mass and upper tail of the density grid used by the inversion checks.
pub const INVERSION_GRID: (usize, f64, f64) = (2000, 1e-9, 1e-6);

fn cumulative(curve: &DensityCurve) -> CdfTable {
    let mut cdf = vec![0.0];
    let mut acc = 0.0_f64;
    for (g, v) in curve.grid.windows(2).zip(curve.values.windows(2)) {
        acc += 0.5 * (g[1] - g[0]) * (v[0] + v[1]);
        cdf.push(acc.clamp(0.0, 1.0).max(*cdf.last().unwrap()));
    }
    CdfTable {
        grid: curve.grid.clone(),
        cdf,
    }
}

/// Inverted law with everything the inversion checks share.
struct Inverted {
    curve: DensityCurve,
    table: CdfTable,
    mass: f64,
}

fn invert(contour: &Contour) -> Result<Inverted> {
    let (points, lower, upper) = INVERSION_GRID;
    let standard = match contour.orientation() {
        Orientation::Standard => contour.clone(),
        Orientation::Flipped => contour.with_orientation_of(Orientation::Standard),
    };
    let grid = standard.auto_grid(points, lower, upper)?;
    let curve = contour.density_curve(grid)?;
    let mass = curve.mass();
    let table = match cdf_from_density(&curve) {
        Ok(t) => t,
        Err(Error::Normalization { .. }) => cumulative(&curve),
        Err(e) => return Err(e),
    };
    Ok(Inverted { curve, table, mass })
}

/// One-sample KS of simulated `b + σ` against the inverted CDF.
pub fn verify_inversion(
    spec: &BesselSpec,
    bnd: &Boundary,
    n: usize,
    cfg: &InversionConfig,
    dt: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let contour = Contour::new(*spec, *bnd, *cfg, &quad())?;
    verify_inversion_with(&contour, n, dt, seed, 0)
}

/// As [`verify_inversion`] on a prepared contour (possibly flipped).
pub fn verify_inversion_with(
    contour: &Contour,
    n: usize,
    dt: f64,
    seed: u64,
    stream_id: u64,
) -> Result<VerificationReport> {
    check_n("verify_inversion", n)?;
    let inv = invert(contour)?;
    inversion_ks(contour, &inv, n, dt, seed, stream_id)
}

fn inversion_ks(
    contour: &Contour,
    inv: &Inverted,
    n: usize,
    dt: f64,
    seed: u64,
    stream_id: u64,
) -> Result<VerificationReport> {
    let (spec, bnd) = (contour.spec(), contour.boundary());
    let sim = SimConfig {
        dt,
        n_paths: n,
        seed,
        stream_id,
        ..Default::default()
    };
    let batch = simulate_hitting_times(spec, bnd, &sim)?;
    let ys: Vec<f64> = batch.sigmas().iter().map(|s| s + bnd.b()).collect();
    let d = ks_one_sample(&ys, |y| inv.table.eval(y))?;
    let threshold = ks_critical_one_sample(KS_LEVEL, ys.len()) + INVERSION_ALLOWANCE;
    let params = inversion_params(contour, json!({"dt": dt, "max_bm_time": sim.max_bm_time, "stream_id": stream_id}));
    let mut report = VerificationReport::new("inversion-ks", params, d, threshold).with_samples(n, seed);
    report.details.insert("density_mass".into(), inv.mass);
    report.details.insert("excluded_fraction".into(), batch.excluded_fraction());
    report.details.insert("most_negative_density".into(), inv.curve.most_negative);
    Ok(report)
}

fn inversion_params(contour: &Contour, extra: Value) -> Value {
    let (spec, bnd, cfg) = (contour.spec(), contour.boundary(), contour.config());
    let mut v = json!({
        "nu": spec.nu(), "index": spec.sign(), "b": bnd.b(), "c": bnd.c(),
        "abscissa": cfg.abscissa, "half_height": cfg.half_height, "step": cfg.step,
        "tail_tol": cfg.tail_tol, "orientation": contour.orientation(),
        "grid_points": INVERSION_GRID.0, "grid_lower_mass": INVERSION_GRID.1, "grid_upper_tail": INVERSION_GRID.2,
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    v
}

/// Largest pointwise density difference between two abscissas on 20 points of `[lo, hi]`.
pub fn verify_contour_shift(
    spec: &BesselSpec,
    bnd: &Boundary,
    abscissas: (f64, f64),
    cfg: &InversionConfig,
    range: (f64, f64),
) -> Result<VerificationReport> {
    let at = |a: f64| {
        Contour::new(
            *spec,
            *bnd,
            InversionConfig {
                abscissa: a,
                ..*cfg
            },
            &quad(),
        )
    };
    let (first, second) = (at(abscissas.0)?, at(abscissas.1)?);
    let mut worst = 0.0_f64;
    for k in 0..20 {
        let y = range.0 + (range.1 - range.0) * (k as f64 + 0.5) / 20.0;
        worst = worst.max((first.density(y)? - second.density(y)?).abs());
    }
    let params = json!({
        "nu": spec.nu(), "index": spec.sign(), "b": bnd.b(), "c": bnd.c(),
        "abscissas": [abscissas.0, abscissas.1], "half_height": cfg.half_height, "step": cfg.step,
        "tail_tol": cfg.tail_tol, "y_range": [range.0, range.1], "points": 20,
    });
    Ok(VerificationReport::new("inversion-contour-shift", params, worst, 1e-5))
}

/// Inversion checks on the acceptance parameters: KS against simulation,
/// normalization, round-trip moments and contour-shift invariance.
pub fn inversion_suite(spec: &BesselSpec, bnd: &Boundary, n: usize, dt: f64, seed: u64, stream_id: u64) -> Result<Vec<VerificationReport>> {
    let cfg = InversionConfig::default();
    let contour = Contour::new(*spec, *bnd, cfg, &quad())?;
    let inv = invert(&contour)?;
    let ks = inversion_ks(&contour, &inv, n, dt, seed, stream_id)?;

    let mut norm = VerificationReport::new(
        "inversion-normalization",
        inversion_params(&contour, json!({})),
        (inv.mass - 1.0).abs(),
        1e-3,
    );
    norm.details.insert("mass".into(), inv.mass);

    let mut worst = 0.0_f64;
    let mut details = BTreeMap::new();
    for s in [0.5, 1.0, 2.0] {
        let want = mellin(spec, bnd, Complex64::new(s, 0.0), &quad())?.re;
        let got = inv.curve.mellin_moment(s);
        let rel = (got - want).abs() / want;
        details.insert(format!("s={s}:relative_error"), rel);
        worst = worst.max(rel);
    }
    let mut round_trip = VerificationReport::new(
        "inversion-round-trip",
        inversion_params(&contour, json!({"s_grid": [0.5, 1.0, 2.0]})),
        worst,
        5e-3,
    );
    round_trip.details = details;

    let shift_cfg = InversionConfig {
        half_height: 600.0,
        ..cfg
    };
    let shift = verify_contour_shift(spec, bnd, (0.8, 1.5), &shift_cfg, (0.3, 5.0))?;
    Ok(vec![ks, norm, round_trip, shift])
}

/// Change of the `E[(b + σ)^-s]` estimate when `dt` is halved, in units of its
/// standard error. Both runs share their Brownian paths.
pub fn verify_dt_halving(
    spec: &BesselSpec,
    bnd: &Boundary,
    s: f64,
    n: usize,
    dt: f64,
    seed: u64,
    stream_id: u64,
) -> Result<VerificationReport> {
    check_n("verify_dt_halving", n)?;
    let coarse_cfg = SimConfig {
        dt,
        n_paths: n,
        seed,
        stream_id,
        normals_per_step: 2,
        ..Default::default()
    };
    let fine_cfg = SimConfig {
        dt: 0.5 * dt,
        normals_per_step: 1,
        ..coarse_cfg
    };
    let coarse = simulate_hitting_times(spec, bnd, &coarse_cfg)?.mellin_estimate(s)?;
    let fine = simulate_hitting_times(spec, bnd, &fine_cfg)?.mellin_estimate(s)?;
    let statistic = (coarse.mean - fine.mean).abs() / coarse.std_error;
    let params = json!({
        "nu": spec.nu(), "index": spec.sign(), "b": bnd.b(), "c": bnd.c(), "s": s,
        "dt": dt, "max_bm_time": coarse_cfg.max_bm_time, "stream_id": stream_id,
    });
    let mut report = VerificationReport::new("dt-halving", params, statistic, 1.0).with_samples(n, seed);
    report.details.insert("coarse_mean".into(), coarse.mean);
    report.details.insert("fine_mean".into(), fine.mean);
    report.details.insert("std_error".into(), coarse.std_error);
    Ok(report)
}

/// Checks selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Dufresne,
    Affine,
    TransformMc,
    Duality,
    Whittaker,
    Inversion,
    DtHalving,
}

impl Check {
    /// The checks run by `all` (the dt-halving gate is run on its own).
    pub const SUITE: [Check; 6] = [
        Check::TransformMc,
        Check::Dufresne,
        Check::Affine,
        Check::Duality,
        Check::Whittaker,
        Check::Inversion,
    ];
}

/// Pinned parameters of the checks.
pub mod pinned {
    use super::*;

    pub const NU: f64 = 0.5;
    pub const B: f64 = 0.25;
    pub const C: f64 = 1.0;
    pub const DT: f64 = 1e-4;
    pub const TRANSFORM_PATHS: usize = 200_000;
    pub const NEG_S_GRID: [f64; 3] = [0.5, 1.0, 2.0];
    pub const POS_S_GRID: [f64; 3] = [0.75, 1.5, 3.0];
    pub const DUFRESNE_NUS: [f64; 3] = [0.3, 1.0, 2.0];
    pub const DUFRESNE_DRAWS: usize = 100_000;
    pub const AFFINE_SETS: [(f64, f64, f64); 2] = [(0.5, 0.25, 1.0), (1.5, 0.1, 0.5)];
    pub const AFFINE_DRAWS: usize = 50_000;
    pub const AFFINE_NEGATIVE_SHIFT: f64 = 0.1;
    pub const DUALITY_NUS: [f64; 3] = [0.3, 0.5, 1.2];
    pub const DUALITY_BOUNDARIES: [(f64, f64); 3] = [(0.25, 1.0), (0.1, 0.4), (1.0, 5.0)];
    pub const DUALITY_OFFSETS: [f64; 3] = [0.0, 0.7, 2.5];
    pub const WHITTAKER_POINTS: usize = 20;
    pub const INVERSION_PATHS: usize = 100_000;
    pub const HALVING_PATHS: usize = 100_000;

    pub fn boundary() -> Boundary {
        Boundary::new(B, C).expect("pinned boundary is valid")
    }

    pub fn spec(sign: IndexSign) -> BesselSpec {
        BesselSpec::new(NU, sign).expect("pinned index is valid")
    }

    pub fn duality_sets() -> Vec<(f64, Boundary)> {
        DUALITY_NUS
            .iter()
            .flat_map(|&nu| {
                DUALITY_BOUNDARIES
                    .iter()
                    .map(move |&(b, c)| (nu, Boundary::new(b, c).expect("pinned boundary is valid")))
            })
            .collect()
    }
}

/// Runs one check at its pinned parameters. Stream ids keep the checks'
/// random draws disjoint under a shared seed.
pub fn run_check(check: Check, seed: u64) -> Result<Vec<VerificationReport>> {
    use pinned::*;
    log::info!("running check {check:?} (seed {seed})");
    match check {
        Check::TransformMc => Ok(vec![
            verify_transform_mc_scaled(&spec(IndexSign::Negative), &boundary(), &NEG_S_GRID, TRANSFORM_PATHS, DT, seed, 1, 1.0)?,
            verify_transform_mc_scaled(&spec(IndexSign::Positive), &boundary(), &POS_S_GRID, TRANSFORM_PATHS, DT, seed, 2, 1.0)?,
        ]),
        Check::Dufresne => DUFRESNE_NUS
            .iter()
            .zip(3u64..)
            .map(|(&nu, stream)| verify_dufresne_against(nu, nu, DUFRESNE_DRAWS, seed, stream))
            .collect(),
        Check::Affine => AFFINE_SETS
            .iter()
            .zip(6u64..)
            .map(|(&(nu, b, c), stream)| {
                verify_affine_shifted(nu, &Boundary::new(b, c)?, AFFINE_DRAWS, DT, seed, stream, 0.0)
            })
            .collect(),
        Check::Duality => Ok(vec![verify_duality(&duality_sets(), &DUALITY_OFFSETS)?]),
        Check::Whittaker => Ok(vec![verify_whittaker(&whittaker_grid(WHITTAKER_POINTS, seed), seed)?]),
        Check::Inversion => inversion_suite(&spec(IndexSign::Negative), &boundary(), INVERSION_PATHS, DT, seed, 8),
        Check::DtHalving => Ok(vec![verify_dt_halving(
            &spec(IndexSign::Negative),
            &boundary(),
            1.0,
            HALVING_PATHS,
            DT,
            seed,
            9,
        )?]),
    }
}

/// Runs every check of the pinned suite.
pub fn run_suite(seed: u64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for check in Check::SUITE {
        out.extend(run_check(check, seed)?);
    }
    Ok(out)
}

/// Negative controls: each is expected to fail.
pub fn run_negative_control(check: Check, seed: u64) -> Result<Vec<VerificationReport>> {
    use pinned::*;
    match check {
        Check::TransformMc => Ok(vec![verify_transform_mc_scaled(
            &spec(IndexSign::Negative), &boundary(), &NEG_S_GRID, TRANSFORM_PATHS, DT, seed, 1, 1.01,
        )?]),
        Check::Dufresne => Ok(vec![verify_dufresne_against(1.0, 1.2, DUFRESNE_DRAWS, seed, 4)?]),
        Check::Affine => {
            let (nu, b, c) = AFFINE_SETS[0];
            Ok(vec![verify_affine_shifted(nu, &Boundary::new(b, c)?, AFFINE_DRAWS, DT, seed, 6, AFFINE_NEGATIVE_SHIFT)?])
        }
        Check::Inversion => {
            let contour = Contour::with_orientation(
                spec(IndexSign::Negative),
                boundary(),
                InversionConfig::default(),
                &quad(),
                Orientation::Flipped,
            )?;
            Ok(vec![verify_inversion_with(&contour, INVERSION_PATHS, DT, seed, 8)?])
        }
        Check::Duality => {
            // c^-ν dropped from the duality relation.
            let bnd = Boundary::new(0.25, 2.0)?;
            let s = NU + 0.7;
            let pos = mellin(&spec(IndexSign::Positive), &bnd, Complex64::new(s, 0.0), &quad())?;
            let neg = mellin(&spec(IndexSign::Negative), &bnd, Complex64::new(s - NU, 0.0), &quad())?;
            let residual = (pos - neg).norm();
            let params = json!({"nu": NU, "b": 0.25, "c": 2.0, "s": s, "dropped_factor": "c^-nu"});
            Ok(vec![VerificationReport::new("duality", params, residual, DUALITY_THRESHOLD)])
        }
        Check::Whittaker | Check::DtHalving => Err(domain(
            "run_negative_control",
            format!("no negative control is defined for {check:?}"),
        )),
    }
}
