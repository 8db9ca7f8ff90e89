//! Spectral solver for `∂_t u = -D (-Δ)^s u` on the periodic box `[-L, L)`.
//!
//! The forward DFT coefficients of mode `m` are multiplied by
//! `exp(-t D |ξ_m|^{2s})` with angular frequency `ξ_m = 2π m / (2L)`; the
//! inverse transform is divided by `n`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Samples on the uniform grid `y_j = -L + j·2L/n`, `j = 0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub half_length: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(half_length: f64, values: Vec<f64>) -> Result<Self> {
        let g = Self { half_length, values };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "half-length must be > 0, got {}",
                self.half_length
            )));
        }
        if !self.values.len().is_power_of_two() || self.values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid size must be a power of two, got {}",
                self.values.len()
            )));
        }
        Ok(())
    }

    pub fn from_fn<F: Fn(f64) -> f64>(half_length: f64, n: usize, f: F) -> Result<Self> {
        let dy = 2.0 * half_length / n as f64;
        Self::new(half_length, (0..n).map(|j| f(-half_length + j as f64 * dy)).collect())
    }

    /// Gaussian of total mass `mass`.
    pub fn gaussian(half_length: f64, n: usize, center: f64, width: f64, mass: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidArgument(format!("width must be > 0, got {width}")));
        }
        let norm = mass / (width * (2.0 * PI).sqrt());
        Self::from_fn(half_length, n, |y| {
            let z = (y - center) / width;
            norm * (-0.5 * z * z).exp()
        })
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.values.len() as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| self.node(j)).collect()
    }

    /// Riemann sum `Σ u_j Δy`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn node_index(&self, y: f64) -> Option<usize> {
        let x = (y + self.half_length) / self.spacing();
        let j = x.round();
        if (x - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < self.n_points() {
            Some(j as usize)
        } else {
            None
        }
    }

    /// Trigonometric interpolant at `y`; the stored value at grid nodes.
    pub fn interpolate(&self, y: f64) -> f64 {
        if let Some(j) = self.node_index(y) {
            return self.values[j];
        }
        let n = self.n_points();
        let coeffs = fft(&self.values);
        let mut acc = 0.0;
        for (m, c) in coeffs.iter().enumerate() {
            let phase = PI * signed_mode(m, n) as f64 * (y + self.half_length) / self.half_length;
            acc += if 2 * m == n {
                c.re * phase.cos()
            } else {
                (c * Complex64::from_polar(1.0, phase)).re
            };
        }
        acc / n as f64
    }

    /// Local Lagrange interpolation on `order` nodes around `y`, periodic.
    pub fn interpolate_local(&self, y: f64, order: usize) -> f64 {
        let n = self.n_points() as i64;
        let h = self.spacing();
        let x = (y + self.half_length) / h;
        let base = x.floor() as i64 - (order as i64 - 1) / 2;
        let mut acc = 0.0;
        for a in 0..order as i64 {
            let ja = base + a;
            let mut w = 1.0;
            for b in 0..order as i64 {
                if a != b {
                    w *= (x - (base + b) as f64) / (a - b) as f64;
                }
            }
            acc += w * self.values[ja.rem_euclid(n) as usize];
        }
        acc
    }
}

fn signed_mode(m: usize, n: usize) -> i64 {
    if 2 * m <= n {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

fn fft(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn check_evolve_args(d: f64, s_half: f64, t: f64) -> Result<()> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("D must be >= 0, got {d}")));
    }
    if !(s_half > 0.0 && s_half <= 1.0) {
        return Err(Error::InvalidArgument(format!("s_half must lie in (0, 1], got {s_half}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Solution at time `t` of `∂_t u = -D(-Δ)^{s_half} u` from `u0`.
pub fn evolve(u0: &GridFunction, d: f64, s_half: f64, t: f64) -> Result<GridFunction> {
    check_evolve_args(d, s_half, t)?;
    u0.validate()?;
    if t == 0.0 || d == 0.0 {
        return Ok(u0.clone());
    }
    let n = u0.n_points();
    let mut planner = FftPlanner::new();
    let mut buf = fft(&u0.values);
    let l = u0.half_length;
    for (m, c) in buf.iter_mut().enumerate() {
        let xi = PI * signed_mode(m, n).unsigned_abs() as f64 / l;
        *c *= (-t * d * xi.powf(2.0 * s_half)).exp();
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    Ok(GridFunction {
        half_length: l,
        values: buf.iter().map(|c| c.re * inv).collect(),
    })
}

/// Fraction of mass expected outside `[-L, L)` at time `t` for a datum
/// concentrated near the origin: the symmetric stable tail
/// `C_α t D L^{-α}` with `C_α = (2/π) Γ(α) sin(πα/2)`, or the Gaussian tail
/// of variance `2Dt` when `s_half = 1`.
pub fn leakage_estimate(half_length: f64, d: f64, s_half: f64, t: f64) -> f64 {
    let alpha = 2.0 * s_half;
    if d == 0.0 || t == 0.0 {
        return 0.0;
    }
    if alpha >= 2.0 {
        return erfc(half_length / (4.0 * d * t).sqrt());
    }
    let c = 2.0 / PI * gamma(alpha) * (PI * alpha / 2.0).sin();
    c * t * d * half_length.powf(-alpha)
}

/// Sup-norm distance between `u(t2)` and the mass-preserving dilation of
/// `u(t1)` by `(t2/t1)^{1/(2 s_half)}`.
pub fn self_similar_profile_check(u0: &GridFunction, d: f64, s_half: f64, t1: f64, t2: f64) -> Result<f64> {
    check_evolve_args(d, s_half, t1)?;
    if !(t1 > 0.0 && t2 >= t1) {
        return Err(Error::InvalidArgument(format!("need 0 < t1 <= t2, got {t1}, {t2}")));
    }
    let leak = leakage_estimate(u0.half_length, d, s_half, t2);
    if leak > 1e-6 {
        return Err(Error::NumericalGuard(format!(
            "domain too small: estimated mass leakage {leak:.2e} exceeds 1e-6"
        )));
    }
    if t2 == t1 {
        return Ok(0.0);
    }
    let u1 = evolve(u0, d, s_half, t1)?;
    let u2 = evolve(u0, d, s_half, t2)?;
    let lam = (t2 / t1).powf(1.0 / (2.0 * s_half));
    let mut dist: f64 = 0.0;
    for (j, &v2) in u2.values.iter().enumerate() {
        let y = u2.node(j);
        let dilated = u1.interpolate_local(y / lam, 8) / lam;
        dist = dist.max((v2 - dilated).abs());
    }
    Ok(dist)
}
