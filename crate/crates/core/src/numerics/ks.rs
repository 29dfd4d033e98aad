//! Kolmogorov–Smirnov statistics and their asymptotic distribution.

use crate::error::{Error, Result};

/// sup |F_emp - cdf| for a sample against a reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample("ks_one_sample"));
    }
    let sorted = sorted_copy(xs);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let below = i as f64 / n;
        let above = (i + 1) as f64 / n;
        d = d.max((f - below).abs()).max((above - f).abs());
    }
    Ok(d)
}

/// sup |F_xs - F_ys| between two empirical CDFs.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample("ks_two_sample"));
    }
    let a = sorted_copy(xs);
    let b = sorted_copy(ys);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Asymptotic critical coefficient c(α) = sqrt(-ln(α/2) / 2); 1.628 at α = 0.01.
pub fn ks_coefficient(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

/// One-sample critical value at significance `level` for `n` draws.
pub fn ks_critical_one_sample(level: f64, n: usize) -> f64 {
    ks_coefficient(level) / (n as f64).sqrt()
}

/// Two-sample critical value at significance `level`.
pub fn ks_critical_two_sample(level: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(level) * ((n + m) / (n * m)).sqrt()
}

/// P(K > λ) for the Kolmogorov distribution, first 100 terms of
/// 2 Σ (-1)^(k-1) exp(-2 k² λ²).
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a one-sample statistic `d` over `n` draws.
pub fn ks_p_value_one_sample(d: f64, n: usize) -> f64 {
    kolmogorov_survival(d * (n as f64).sqrt())
}

/// Asymptotic p-value of a two-sample statistic.
pub fn ks_p_value_two_sample(d: f64, n: usize, m: usize) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    kolmogorov_survival(d * (nf * mf / (nf + mf)).sqrt())
}
