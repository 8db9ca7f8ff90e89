//! Closed-form model functions of the magnetized chain: dispersion relation,
//! branch weights, scattering kernel, jump rates and the jump observable Ψ.
//!
//! All wave numbers live on the torus `T = [-1/2, 1/2)`. Branch labels follow
//! the sign of `B` without swapping: for `B > 0` branch 2 is the soft branch
//! (`θ₂² ~ k²`), for `B < 0` it is branch 1.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, bisect};

/// Magnetic field strength `b` and noise strength `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub b: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(b: f64, gamma: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidArgument(format!("magnetic field must be finite, got {b}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("noise strength must be > 0, got {gamma}")));
        }
        Ok(Self { b, gamma })
    }

    /// `γ = 0`: only meaningful for the deterministic chain flow. Every
    /// kinetic state is absorbing under these parameters.
    pub fn noiseless(b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::InvalidArgument(format!("magnetic field must be finite, got {b}")));
        }
        Ok(Self { b, gamma: 0.0 })
    }

    /// Spatial scaling exponent of the additive functional: `3/5` for `B ≠ 0`,
    /// `2/3` in the degenerate-branch case `B = 0`.
    pub fn space_scaling_exponent(&self) -> f64 {
        if self.b == 0.0 {
            2.0 / 3.0
        } else {
            3.0 / 5.0
        }
    }

    /// Index of the limiting stable law: `5/3` for `B ≠ 0`, `3/2` for `B = 0`.
    pub fn stable_index(&self) -> f64 {
        1.0 / self.space_scaling_exponent()
    }

    /// Branch whose weight vanishes like `k²` at the origin, if any.
    pub fn soft_branch(&self) -> Option<Branch> {
        if self.b > 0.0 {
            Some(Branch::Two)
        } else if self.b < 0.0 {
            Some(Branch::One)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    One,
    Two,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::One, Branch::Two];

    pub fn index(self) -> u8 {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
        }
    }

    /// Zero-based slot, handy for `[T; 2]` storage.
    pub fn slot(self) -> usize {
        self.index() as usize - 1
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Branch::One),
            2 => Ok(Branch::Two),
            _ => Err(Error::InvalidArgument(format!("branch index must be 1 or 2, got {i}"))),
        }
    }

    /// The other branch, `i* = 3 - i`.
    pub fn other(self) -> Self {
        match self {
            Branch::One => Branch::Two,
            Branch::Two => Branch::One,
        }
    }
}

/// A phonon: wave number on the torus and branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhononState {
    pub k: f64,
    pub branch: Branch,
}

impl PhononState {
    pub fn new(k: f64, branch: Branch) -> Result<Self> {
        if !(-0.5..0.5).contains(&k) {
            return Err(Error::InvalidArgument(format!("wave number {k} outside [-1/2, 1/2)")));
        }
        Ok(Self { k, branch })
    }
}

/// Representative of `k` in `[-1/2, 1/2)`.
pub fn wrap_torus(k: f64) -> f64 {
    let w = k - (k + 0.5).floor();
    if w >= 0.5 {
        w - 1.0
    } else {
        w
    }
}

/// `α̂(k) = 2 - 2cos 2πk`, evaluated as `4 sin² πk` to keep relative accuracy near 0.
pub fn alpha_hat(k: f64) -> f64 {
    let s = (PI * k).sin();
    4.0 * s * s
}

pub fn alpha_hat_prime(k: f64) -> f64 {
    4.0 * PI * (2.0 * PI * k).sin()
}

/// `α̂''(0) = 8π²`.
pub fn alpha_hat_dd0() -> f64 {
    8.0 * PI * PI
}

/// Noise symbol `β̂(k) = 2cos 2πk - 2`.
pub fn beta_hat(k: f64) -> f64 {
    -alpha_hat(k)
}

fn omega_from_alpha(alpha: f64, b: f64) -> (f64, f64) {
    let s = (alpha + 0.25 * b * b).sqrt();
    if b == 0.0 {
        (s, s)
    } else if b > 0.0 {
        let w1 = s + 0.5 * b;
        (w1, alpha / w1)
    } else {
        let w2 = s - 0.5 * b;
        (alpha / w2, w2)
    }
}

/// Branch frequencies `(ω₁(k), ω₂(k))`.
///
/// The smaller frequency is formed as `α̂/ω_large` so that `ω₁ω₂ = α̂` holds to
/// rounding even where the direct difference would cancel.
pub fn omega(k: f64, params: &ModelParams) -> (f64, f64) {
    omega_from_alpha(alpha_hat(k), params.b)
}

/// Squared branch weights `(θ₁², θ₂²)` with `θᵢ² = ωᵢ/(ω₁+ω₂)`.
pub fn theta_sq(k: f64, params: &ModelParams) -> Result<(f64, f64)> {
    let alpha = alpha_hat(k);
    let two_s = 2.0 * (alpha + 0.25 * params.b * params.b).sqrt();
    if two_s == 0.0 {
        return Err(Error::Domain("branch weights undefined at k = 0 when B = 0".into()));
    }
    let (w1, w2) = omega_from_alpha(alpha, params.b);
    Ok((w1 / two_s, w2 / two_s))
}

pub fn theta(k: f64, params: &ModelParams) -> Result<(f64, f64)> {
    let (a, b) = theta_sq(k, params)?;
    Ok((a.sqrt(), b.sqrt()))
}

/// Common group velocity `ω'(k) = α̂'(k) / (2√(α̂(k) + B²/4))`.
pub fn omega_prime(k: f64, params: &ModelParams) -> Result<f64> {
    let s = (alpha_hat(k) + 0.25 * params.b * params.b).sqrt();
    if s == 0.0 {
        return Err(Error::Domain("ω' has a jump at k = 0 when B = 0".into()));
    }
    Ok(alpha_hat_prime(k) / (2.0 * s))
}

/// `r₀(k) = 4 sin² πk`, the factor of the separable scattering kernel.
pub fn kernel_factor(k: f64) -> f64 {
    alpha_hat(k)
}

/// `R(k, k') = 16 sin² πk sin² πk'`.
pub fn kernel_r(k: f64, k2: f64) -> f64 {
    kernel_factor(k) * kernel_factor(k2)
}

/// `R(k) = ∫ R(k, k') dk' = 8 sin² πk`.
pub fn total_rate(k: f64) -> f64 {
    2.0 * kernel_factor(k)
}

/// `R̄ = ∫ R(k) dk = 4`.
pub fn r_bar() -> f64 {
    4.0
}

/// Mean holding time `t(k, i) = [γ θᵢ(k)² R(k)]⁻¹`.
pub fn waiting_time(s: PhononState, params: &ModelParams) -> Result<f64> {
    let rate = jump_rate(s, params)?;
    if rate <= 0.0 {
        return Err(Error::AbsorbingState {
            k: s.k,
            branch: s.branch.index(),
        });
    }
    Ok(1.0 / rate)
}

/// Total jump rate `γ θᵢ(k)² R(k)`; zero at `k = 0` and on the soft branch there.
pub fn jump_rate(s: PhononState, params: &ModelParams) -> Result<f64> {
    if s.k == 0.0 {
        return Ok(0.0);
    }
    let (t1, t2) = theta_sq(s.k, params)?;
    let th = match s.branch {
        Branch::One => t1,
        Branch::Two => t2,
    };
    Ok(params.gamma * th * total_rate(s.k))
}

/// Jump observable `Ψ(k, i) = ω'(k) t(k, i)`.
pub fn psi_observable(s: PhononState, params: &ModelParams) -> Result<f64> {
    let t = waiting_time(s, params)?;
    Ok(omega_prime(s.k, params)? * t)
}

/// Density of the reversible law `π` of the embedded jump chain,
/// `θᵢ(k)² R(k) / R̄ = 2 θᵢ(k)² sin² πk`, with respect to `dk × counting`.
pub fn pi_density(k: f64, branch: Branch, params: &ModelParams) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    match theta_sq(k, params) {
        Ok((t1, t2)) => {
            let th = match branch {
                Branch::One => t1,
                Branch::Two => t2,
            };
            th * total_rate(k) / r_bar()
        }
        Err(_) => 0.0,
    }
}

/// `t̄ = ∫ t dπ = 1/(2γ)`.
pub fn mean_waiting_time(params: &ModelParams) -> f64 {
    1.0 / (2.0 * params.gamma)
}

fn psi_positive_k(k: f64, branch: Branch, params: &ModelParams) -> f64 {
    // k > 0 strictly; every quantity is finite there
    let (t1, t2) = theta_sq(k, params).expect("k > 0");
    let th = match branch {
        Branch::One => t1,
        Branch::Two => t2,
    };
    let s = (alpha_hat(k) + 0.25 * params.b * params.b).sqrt();
    let wp = alpha_hat_prime(k) / (2.0 * s);
    wp / (params.gamma * th * total_rate(k))
}

fn crossing_grid() -> Vec<f64> {
    let mut ks = Vec::with_capacity(5000);
    let n_log = 800;
    let (lo, hi) = (1e-10f64.ln(), 1e-2f64.ln());
    for j in 0..n_log {
        ks.push((lo + (hi - lo) * j as f64 / n_log as f64).exp());
    }
    let n_lin = 4000;
    for j in 0..=n_lin {
        ks.push(1e-2 + (0.5 - 1e-2) * j as f64 / n_lin as f64);
    }
    ks
}

/// Tail mass `π({(k, i) : Ψ(k, i) ≥ λ})`.
///
/// The superlevel set is located on a log-refined grid, its endpoints are
/// refined by bisection, and the density is integrated over each interval by
/// adaptive Simpson. By oddness of Ψ in `k` and evenness of `π`, the set on
/// `k < 0` is the mirror of `{Ψ ≤ -λ}` on `k > 0`.
pub fn tail_mass(params: &ModelParams, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("tail level must be > 0, got {lambda}")));
    }
    let grid = crossing_grid();
    let mut total = 0.0;
    for branch in Branch::BOTH {
        let density = |k: f64| pi_density(k, branch, params);
        for sign in [1.0, -1.0] {
            let g = |k: f64| sign * psi_positive_k(k, branch, params) - lambda;
            let mut start: Option<f64> = if g(grid[0]) >= 0.0 { Some(0.0) } else { None };
            for w in grid.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (ga, gb) = (g(a), g(b));
                if (ga >= 0.0) != (gb >= 0.0) {
                    let x = bisect(&g, a, b, 1e-15 * b);
                    match start.take() {
                        Some(lo) => total += integrate_density(&density, lo, x),
                        None => start = Some(x),
                    }
                }
            }
            if let Some(lo) = start {
                total += integrate_density(&density, lo, 0.5);
            }
        }
    }
    Ok(total)
}

fn integrate_density<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let crude = (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    let tol = (crude.abs() * 1e-12).max(1e-300);
    adaptive_simpson(f, a, b, tol)
}

/// `λ^p · π({Ψ ≥ λ})` with `p` the stable index of `params`.
pub fn tail_plateau(params: &ModelParams, lambda: f64) -> Result<f64> {
    Ok(lambda.powf(params.stable_index()) * tail_mass(params, lambda)?)
}
