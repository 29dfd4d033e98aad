//! Density, CDF and quantiles of `Y = b + σ` from its Mellin transform.
//!
//! With `M(s) = E[Y^-s]`, the density and distribution function are
//!
//! ```text
//! f(y) = (1/2π) ∫ M(a+it) y^(a+it-1) dt,     F(y) = (1/2π) ∫ M(a+it) y^(a+it) / (a+it) dt,
//! ```
//!
//! for any abscissa `a > 0`. Both are evaluated with the trapezoid rule on
//! `|t| ≤ H`, using `M(a-it) = conj M(a+it)` so only `t ≥ 0` is computed. By
//! Poisson summation the trapezoid error is governed by the tail of `Y`: with
//! `P(Y > y) ~ y^-κ` it is about `exp(-2π(a+κ)/h)` for the density and
//! `exp(-2πa/h)` for the CDF.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::numerics::QuadratureConfig;
use crate::transforms::{mellin, BesselSpec, Boundary};

/// Contour parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    /// Abscissa `a` of the vertical line `Re s = a`.
    pub abscissa: f64,
    /// Truncation `H` of the line.
    pub half_height: f64,
    /// Trapezoid step `h` in `t`.
    pub step: f64,
    /// Largest admissible tail term `|M(a+iH)| y^(a-1) / π`.
    pub tail_tol: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            abscissa: 0.5,
            half_height: 400.0,
            step: 0.1,
            tail_tol: 1e-8,
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        let Self {
            abscissa,
            half_height,
            step,
            tail_tol,
        } = *self;
        let finite = [abscissa, half_height, step, tail_tol].iter().all(|v| v.is_finite());
        if !finite || abscissa <= 0.0 || half_height <= 0.0 || step <= 0.0 || tail_tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "inversion needs a > 0, H > 0, h > 0, tail_tol > 0 (got a={abscissa}, H={half_height}, h={step}, tail_tol={tail_tol})"
            )));
        }
        if step > half_height / 50.0 {
            return Err(Error::InvalidConfig(format!(
                "step h={step} must not exceed H/50 = {}",
                half_height / 50.0
            )));
        }
        Ok(())
    }
}

/// Which way the contour is traversed. `Flipped` pairs `y^(a+it)` with
/// `M(a-it)`; it is wrong on purpose and exists for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Standard,
    Flipped,
}

/// Largest tolerated imaginary residue of an inversion sum.
pub const MAX_IMAGINARY_RESIDUE: f64 = 1e-6;

#[derive(Debug, Clone)]
enum Law {
    /// `σ ≡ 0`, from the degenerate boundary `b = c`.
    PointMass,
    Contour {
        /// M(a + i k h) for k = 0..=n
        values: Vec<Complex64>,
        /// max |M(a - it) - conj M(a + it)| over a few probe points
        symmetry_defect: f64,
    },
}

/// Transform values on the contour, ready for repeated inversion.
#[derive(Debug, Clone)]
pub struct Contour {
    spec: BesselSpec,
    bnd: Boundary,
    cfg: InversionConfig,
    orientation: Orientation,
    law: Law,
}

impl Contour {
    pub fn new(
        spec: BesselSpec,
        bnd: Boundary,
        cfg: InversionConfig,
        qcfg: &QuadratureConfig,
    ) -> Result<Self> {
        Self::with_orientation(spec, bnd, cfg, qcfg, Orientation::Standard)
    }

    pub fn with_orientation(
        spec: BesselSpec,
        bnd: Boundary,
        cfg: InversionConfig,
        qcfg: &QuadratureConfig,
        orientation: Orientation,
    ) -> Result<Self> {
        cfg.validate()?;
        qcfg.validate()?;
        if bnd.is_degenerate() {
            return Ok(Self {
                spec,
                bnd,
                cfg,
                orientation,
                law: Law::PointMass,
            });
        }
        let a = cfg.abscissa;
        let h = cfg.step;
        let n = (cfg.half_height / h).round() as usize;
        let values = (0..=n)
            .into_par_iter()
            .map(|k| mellin(&spec, &bnd, Complex64::new(a, k as f64 * h), qcfg))
            .collect::<Result<Vec<_>>>()?;
        let mut symmetry_defect = values[0].im.abs();
        for k in [1, n / 2, n] {
            let lower = mellin(&spec, &bnd, Complex64::new(a, -(k as f64) * h), qcfg)?;
            symmetry_defect = symmetry_defect.max((lower - values[k].conj()).norm());
        }
        log::debug!(
            "contour a={a} H={} h={h}: {} points, |M(a+iH)| = {:.3e}",
            cfg.half_height,
            n + 1,
            values[n].norm()
        );
        Ok(Self {
            spec,
            bnd,
            cfg,
            orientation,
            law: Law::Contour {
                values,
                symmetry_defect,
            },
        })
    }

    pub fn spec(&self) -> &BesselSpec {
        &self.spec
    }

    pub fn boundary(&self) -> &Boundary {
        &self.bnd
    }

    pub fn config(&self) -> &InversionConfig {
        &self.cfg
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The same contour values read with another orientation.
    pub fn with_orientation_of(&self, orientation: Orientation) -> Self {
        Self {
            orientation,
            ..self.clone()
        }
    }

    /// |M(a + iH)|, or 0 for the point-mass law.
    pub fn tail_magnitude(&self) -> f64 {
        match &self.law {
            Law::PointMass => 0.0,
            Law::Contour { values, .. } => values.last().map_or(0.0, |v| v.norm()),
        }
    }

    fn check_y(&self, op: &'static str, y: f64) -> Result<()> {
        if !(y.is_finite() && y > 0.0) {
            return Err(domain(op, format!("y must be positive and finite, got {y}")));
        }
        Ok(())
    }

    /// Trapezoid over t ∈ [-H, H] of Re[M(a+it) y^(a+it) w(a+it)], divided by 2π,
    /// together with the bound on its imaginary residue.
    fn contour_sum(&self, values: &[Complex64], defect: f64, y: f64, weight: impl Fn(Complex64) -> Complex64) -> (f64, f64) {
        let a = self.cfg.abscissa;
        let h = self.cfg.step;
        let ln_y = y.ln();
        let n = values.len() - 1;
        let mut acc = 0.0;
        for (k, m) in values.iter().enumerate() {
            let t = k as f64 * h;
            let s = Complex64::new(a, t);
            let m = match self.orientation {
                Orientation::Standard => *m,
                Orientation::Flipped => m.conj(),
            };
            let term = (m * (s * ln_y).exp() * weight(s)).re;
            acc += if k == 0 || k == n { term } else { 2.0 * term };
        }
        let scale = y.powf(a) * weight(Complex64::new(a, 0.0)).norm();
        let residue = defect * scale * (self.cfg.half_height / PI + h / (2.0 * PI));
        (acc * h / (2.0 * PI), residue)
    }

    /// Density of `Y` at `y`.
    pub fn density(&self, y: f64) -> Result<f64> {
        self.check_y("density", y)?;
        let (values, defect) = match &self.law {
            Law::PointMass => return Ok(0.0),
            Law::Contour {
                values,
                symmetry_defect,
            } => (values, *symmetry_defect),
        };
        if y <= self.bnd.b() {
            return Err(domain("density", format!("y must exceed b = {}, got {y}", self.bnd.b())));
        }
        let a = self.cfg.abscissa;
        let tail = self.tail_magnitude() * y.powf(a - 1.0) / PI;
        if tail > self.cfg.tail_tol {
            return Err(Error::TruncationTail {
                tail,
                tolerance: self.cfg.tail_tol,
            });
        }
        let inv_y = 1.0 / y;
        let (value, residue) = self.contour_sum(values, defect, y, |_| Complex64::new(inv_y, 0.0));
        if residue > MAX_IMAGINARY_RESIDUE {
            return Err(Error::ImaginaryResidue(residue));
        }
        Ok(value)
    }

    /// Distribution function of `Y` at `y`, not clipped.
    pub fn cdf(&self, y: f64) -> Result<f64> {
        self.check_y("cdf", y)?;
        let (values, defect) = match &self.law {
            Law::PointMass => return Ok(if y >= self.bnd.b() { 1.0 } else { 0.0 }),
            Law::Contour {
                values,
                symmetry_defect,
            } => (values, *symmetry_defect),
        };
        let a = self.cfg.abscissa;
        let big_s = Complex64::new(a, self.cfg.half_height);
        let tail = self.tail_magnitude() * y.powf(a) / (PI * big_s.norm());
        if tail > self.cfg.tail_tol {
            return Err(Error::TruncationTail {
                tail,
                tolerance: self.cfg.tail_tol,
            });
        }
        let (value, residue) = self.contour_sum(values, defect, y, |s| s.inv());
        if residue > MAX_IMAGINARY_RESIDUE {
            return Err(Error::ImaginaryResidue(residue));
        }
        Ok(value)
    }

    /// Density on `grid` (strictly increasing, all above `b`).
    pub fn density_curve(&self, grid: Vec<f64>) -> Result<DensityCurve> {
        if grid.is_empty() {
            return Err(Error::EmptySample("density_curve"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("density_curve", "grid must be strictly increasing"));
        }
        let raw = grid
            .par_iter()
            .map(|&y| self.density(y))
            .collect::<Result<Vec<f64>>>()?;
        let most_negative = raw.iter().copied().fold(0.0_f64, f64::min);
        if most_negative < 0.0 {
            log::warn!("clipping negative density excursions (most negative {most_negative:.3e})");
        }
        let values = raw.iter().map(|v| v.max(0.0)).collect();
        let truncation_error = self.tail_magnitude() * 2.0 * (self.cfg.half_height.sqrt() + 1.0) / PI;
        Ok(DensityCurve {
            grid,
            values,
            most_negative,
            config: self.cfg,
            truncation_error,
        })
    }

    /// A grid from the lower `lower_mass` quantile to the upper `upper_tail`
    /// quantile, uniform in `ln(y - b)`.
    pub fn auto_grid(&self, points: usize, lower_mass: f64, upper_tail: f64) -> Result<Vec<f64>> {
        if points < 2 {
            return Err(domain("auto_grid", "needs at least two points"));
        }
        let b = self.bnd.b();
        if let Law::PointMass = self.law {
            return Ok((1..=points).map(|k| b + 0.01 * k as f64 / points as f64).collect());
        }
        let cdf_at_offset = |d: f64| self.cdf(b + d);
        let mut hi = 1.0;
        let mut guard = 0;
        while 1.0 - cdf_at_offset(hi)? > upper_tail {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::OutOfRange("upper quantile of the inverted law".into()));
            }
        }
        // bisection in ln(d) for 1 - F = upper_tail
        let (mut lo_u, mut hi_u) = ((hi * 0.5).ln(), hi.ln());
        for _ in 0..50 {
            let mid = 0.5 * (lo_u + hi_u);
            if 1.0 - cdf_at_offset(mid.exp())? > upper_tail {
                lo_u = mid;
            } else {
                hi_u = mid;
            }
        }
        let d_hi = hi_u.exp();
        let mut d_lo = d_hi.min(1.0) * 0.5;
        guard = 0;
        while cdf_at_offset(d_lo)? > lower_mass {
            d_lo *= 0.5;
            guard += 1;
            if guard > 200 {
                return Err(Error::OutOfRange("lower quantile of the inverted law".into()));
            }
        }
        let (u0, u1) = (d_lo.ln(), d_hi.ln());
        Ok((0..points)
            .map(|k| b + (u0 + (u1 - u0) * k as f64 / (points - 1) as f64).exp())
            .collect())
    }
}

/// One-off density evaluation (builds the contour each call).
pub fn density_at(
    spec: &BesselSpec,
    bnd: &Boundary,
    y: f64,
    cfg: &InversionConfig,
    qcfg: &QuadratureConfig,
) -> Result<f64> {
    Contour::new(*spec, *bnd, *cfg, qcfg)?.density(y)
}

/// Density values on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    /// Clipped at zero.
    pub values: Vec<f64>,
    /// Smallest value before clipping (0 if none was negative).
    pub most_negative: f64,
    pub config: InversionConfig,
    /// Estimate of `(1/π) ∫_H^∞ |M(a+it)| dt` from `|M| ~ exp(-κ√t)`.
    pub truncation_error: f64,
}

impl DensityCurve {
    /// Trapezoid of the density over the grid.
    pub fn mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Trapezoid of `y^-s f(y)` over the grid.
    pub fn mellin_moment(&self, s: f64) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| 0.5 * (g[1] - g[0]) * (g[0].powf(-s) * v[0] + g[1].powf(-s) * v[1]))
            .sum()
    }
}

/// Monotone CDF table on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfTable {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
}

/// Cumulative trapezoid of a density curve, clipped to [0, 1] and made monotone.
pub fn cdf_from_density(curve: &DensityCurve) -> Result<CdfTable> {
    if curve.grid.len() < 2 {
        return Err(Error::EmptySample("cdf_from_density"));
    }
    let mass = curve.mass();
    if !(0.99..=1.01).contains(&mass) {
        return Err(Error::Normalization { mass });
    }
    let mut cdf = Vec::with_capacity(curve.grid.len());
    let mut acc = 0.0_f64;
    let mut running = 0.0_f64;
    cdf.push(0.0);
    for (g, v) in curve.grid.windows(2).zip(curve.values.windows(2)) {
        acc += 0.5 * (g[1] - g[0]) * (v[0] + v[1]);
        running = running.max(acc.clamp(0.0, 1.0));
        cdf.push(running);
    }
    Ok(CdfTable {
        grid: curve.grid.clone(),
        cdf,
    })
}

impl CdfTable {
    /// Linear interpolation; 0 left of the grid and the last value right of it.
    pub fn eval(&self, y: f64) -> f64 {
        let n = self.grid.len();
        if y <= self.grid[0] {
            return if y < self.grid[0] { 0.0 } else { self.cdf[0] };
        }
        if y >= self.grid[n - 1] {
            return self.cdf[n - 1];
        }
        let i = self.grid.partition_point(|&g| g <= y) - 1;
        let w = (y - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        self.cdf[i] + w * (self.cdf[i + 1] - self.cdf[i])
    }
}

/// Inverse of the CDF table by linear interpolation.
pub fn quantile(table: &CdfTable, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutOfRange(format!("quantile level {q}")));
    }
    let last = *table.cdf.last().ok_or(Error::EmptySample("quantile"))?;
    if q > last {
        return Err(Error::OutOfRange(format!(
            "quantile level {q} beyond the table's mass {last}"
        )));
    }
    let i = table.cdf.partition_point(|&c| c < q);
    if i == 0 {
        return Ok(table.grid[0]);
    }
    let (c0, c1) = (table.cdf[i - 1], table.cdf[i]);
    let w = (q - c0) / (c1 - c0);
    Ok(table.grid[i - 1] + w * (table.grid[i] - table.grid[i - 1]))
}
