//! Statistics on endpoint ensembles: Hill tail index, two-sample
//! Kolmogorov–Smirnov, empirical characteristic-function fits of stable laws
//! and the predicted stable constants.
//!
//! Fourier convention: the characteristic function is `E[e^{iξX}]` with angular
//! frequency `ξ`, and the fractional Laplacian `(-Δ)^{α/2}` has symbol `|ξ|^α`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::dispersion::{mean_waiting_time, ModelParams};
use crate::error::{Error, Result};

/// Running mean with its standard error, accumulated in input order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanEstimate {
    /// Is `target` within `sigmas` standard errors?
    pub fn covers(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }
}

/// Welford mean and standard error. Constant input gives its exact value and
/// zero error.
pub fn mean_stderr<I: IntoIterator<Item = f64>>(xs: I) -> MeanEstimate {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for x in xs {
        n += 1;
        let d = x - mean;
        mean += d / n as f64;
        m2 += d * (x - mean);
    }
    let stderr = if n > 1 {
        (m2 / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    MeanEstimate { mean, stderr, n }
}

/// Hill estimate of a tail index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub hill_estimate: f64,
    pub hill_ci: (f64, f64),
    pub k_fraction: f64,
    pub n_samples: usize,
}

/// Hill estimator on the top `k_fraction` order statistics of `|samples|`.
pub fn hill_tail_index(samples: &[f64], k_fraction: f64) -> Result<TailReport> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if !(k_fraction > 0.0 && k_fraction <= 0.05) {
        return Err(Error::InvalidArgument(format!(
            "k_fraction must lie in (0, 0.05], got {k_fraction}"
        )));
    }
    let n = samples.len();
    let m = (k_fraction * n as f64).floor() as usize;
    if m < 100 {
        return Err(Error::Statistical(format!("only {m} exceedances, need at least 100")));
    }
    let mut abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    abs.sort_unstable_by(|a, b| b.total_cmp(a));
    let threshold = abs[m];
    if !(threshold > 0.0) {
        return Err(Error::Statistical("tail threshold is zero".into()));
    }
    let h = abs[..m].iter().map(|&x| (x / threshold).ln()).sum::<f64>() / m as f64;
    let est = 1.0 / h;
    let half = 1.96 * est / (m as f64).sqrt();
    Ok(TailReport {
        hill_estimate: est,
        hill_ci: (est - half, est + half),
        k_fraction,
        n_samples: n,
    })
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("NaN in sample".into()));
    }
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
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

/// Asymptotic null quantile of the two-sample statistic at level `alpha`,
/// `c(α) √((n+m)/(nm))` with `c(α) = √(-ln(α/2)/2)`.
pub fn ks_critical_value(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Asymptotic p-value of the two-sample statistic `d`.
pub fn ks_p_value(d: f64, n: usize, m: usize) -> f64 {
    let ne = (n as f64 * m as f64) / (n + m) as f64;
    let se = ne.sqrt();
    let lam = (se + 0.12 + 0.11 / se) * d;
    if lam < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lam * lam).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// KS statistic between `a` and `b / ratio^exponent`. Ensembles that are
/// already scaled by their own horizon are compared with `exponent = 0`.
pub fn self_similarity_ks(a: &[f64], b: &[f64], ratio: f64, exponent: f64) -> Result<f64> {
    if !(ratio > 0.0) {
        return Err(Error::InvalidArgument(format!("ratio must be > 0, got {ratio}")));
    }
    let f = ratio.powf(exponent);
    let scaled: Vec<f64> = b.iter().map(|x| x / f).collect();
    ks_statistic(a, &scaled)
}

/// Modulus of the empirical characteristic function at `xi`.
pub fn empirical_charfn_modulus(xs: &[f64], xi: f64) -> f64 {
    let (mut c, mut s) = (0.0, 0.0);
    for &x in xs {
        let (si, co) = (xi * x).sin_cos();
        c += co;
        s += si;
    }
    let n = xs.len() as f64;
    ((c / n).powi(2) + (s / n).powi(2)).sqrt()
}

fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Noise floor `10 / √n` for the charfn modulus.
pub fn charfn_noise_floor(n: usize) -> f64 {
    10.0 / (n as f64).sqrt()
}

/// Default frequency band: from `2π/(10·IQR)` up to where the empirical
/// modulus first meets the noise floor, `n_points` geometric nodes.
pub fn default_xi_grid(ensemble: &[f64], n_points: usize) -> Result<Vec<f64>> {
    if ensemble.len() < 2 || n_points < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples and 2 nodes".into()));
    }
    let v = sorted(ensemble)?;
    let iqr = quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25);
    if !(iqr > 0.0) {
        return Err(Error::Statistical("ensemble has zero interquartile range".into()));
    }
    let lo = 2.0 * PI / (10.0 * iqr);
    let floor = charfn_noise_floor(ensemble.len());
    let mut hi = lo;
    for _ in 0..400 {
        let next = hi * 1.05;
        if empirical_charfn_modulus(ensemble, next) <= floor {
            break;
        }
        hi = next;
    }
    if hi <= lo {
        return Err(Error::Statistical("no resolvable frequency band".into()));
    }
    let r = (hi / lo).ln();
    Ok((0..n_points)
        .map(|j| lo * (r * j as f64 / (n_points - 1) as f64).exp())
        .collect())
}

/// Result of a characteristic-function fit `|φ(ξ)| ≈ exp(-t D |ξ|^α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableFit {
    /// Free-exponent fit of `ln(-ln|φ|)` against `ln ξ`.
    pub exponent: f64,
    /// Through-origin slope of `-ln|φ|` on `ξ^reference_exponent`, over `t`.
    pub d_constant: f64,
    pub r_squared: f64,
    pub xi_range: (f64, f64),
    pub reference_exponent: f64,
    pub n_used: usize,
}

/// Fit a symmetric stable law to an ensemble observed at time `t`.
///
/// Frequencies where the empirical modulus is below the noise floor are
/// dropped. `xi_grid = None` uses [`default_xi_grid`] with 40 nodes.
pub fn fit_stable_charfn(
    ensemble: &[f64],
    t: f64,
    xi_grid: Option<&[f64]>,
    reference_exponent: f64,
) -> Result<StableFit> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time must be > 0, got {t}")));
    }
    let default;
    let grid = match xi_grid {
        Some(g) => g,
        None => {
            default = default_xi_grid(ensemble, 40)?;
            &default
        }
    };
    let floor = charfn_noise_floor(ensemble.len());
    let mut pts = Vec::with_capacity(grid.len());
    for &xi in grid {
        if !(xi > 0.0) {
            return Err(Error::InvalidArgument(format!("frequencies must be > 0, got {xi}")));
        }
        let m = empirical_charfn_modulus(ensemble, xi);
        // modulus must also sit below 1 for the log-log fit
        if m > floor && m < 1.0 {
            pts.push((xi, -m.ln()));
        }
    }
    if pts.len() < 5 {
        return Err(Error::Statistical(format!(
            "only {} usable frequencies above the noise floor",
            pts.len()
        )));
    }
    let sxy: f64 = pts.iter().map(|(xi, y)| xi.powf(reference_exponent) * y).sum();
    let sxx: f64 = pts.iter().map(|(xi, _)| xi.powf(2.0 * reference_exponent)).sum();
    let d_constant = sxy / sxx / t;

    let lx: Vec<f64> = pts.iter().map(|(xi, _)| xi.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|(_, y)| y.ln()).collect();
    let (slope, _, r_squared) = linear_fit(&lx, &ly);
    let xi_range = (pts[0].0, pts[pts.len() - 1].0);
    Ok(StableFit {
        exponent: slope,
        d_constant,
        r_squared,
        xi_range,
        reference_exponent,
        n_used: pts.len(),
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Constants entering the stable limit of the jump sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharfnConstants {
    /// `A_{5/3} = ∫₀^∞ e^{-y} y^{5/3} dy = Γ(8/3)`.
    pub a_stable: f64,
    /// Mean holding time under π, `1/(2γ)`.
    pub t_bar: f64,
    /// `5 · plateau · A_{5/3} / t̄`.
    pub c_star: f64,
}

fn check_plateau(params: &ModelParams, plateau: f64) -> Result<()> {
    if !(plateau > 0.0 && plateau.is_finite()) {
        return Err(Error::InvalidArgument(format!("plateau must be > 0, got {plateau}")));
    }
    if params.b == 0.0 {
        return Err(Error::InvalidArgument("stable constants are assembled for B ≠ 0 only".into()));
    }
    Ok(())
}

pub fn predicted_charfn_constants(params: &ModelParams, plateau: f64) -> Result<CharfnConstants> {
    check_plateau(params, plateau)?;
    let a_stable = gamma(8.0 / 3.0);
    let t_bar = mean_waiting_time(params);
    Ok(CharfnConstants {
        a_stable,
        t_bar,
        c_star: 5.0 * plateau * a_stable / t_bar,
    })
}

/// Predicted `D` for the endpoint `Z` (which carries the `1/(2π)` factor).
///
/// Each jump of `Z` is `Ψ τ / 2π` with `τ ~ Exp(1)`, so its one-sided tail
/// constant is `c = plateau · Γ(8/3) · (2π)^{-5/3}`. A compound sum with `t/t̄`
/// jumps per unit macroscopic time then has log-charfn
/// `-(t/t̄) · 2c Γ(1-α) cos(πα/2) |ξ|^α` with `α = 5/3`.
pub fn predicted_d_constant(params: &ModelParams, plateau: f64) -> Result<f64> {
    check_plateau(params, plateau)?;
    let alpha = 5.0 / 3.0;
    let c = plateau * gamma(1.0 + alpha) * (2.0 * PI).powf(-alpha);
    // Γ(1-α) through Γ(2-α)/(1-α) keeps the argument positive
    let g = gamma(2.0 - alpha) / (1.0 - alpha);
    Ok(2.0 * c * g * (PI * alpha / 2.0).cos() / mean_waiting_time(params))
}
