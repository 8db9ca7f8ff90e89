//! Feynman–Kac Monte Carlo for the spatially scaled linear Boltzmann equation
//!
//! ```text
//! u_N(y, k, i, Nt) = E_{(k,i)}[ u₀(Z_N(Nt), K(Nt), I(Nt)) ],
//! Z_N(Nt) = y + N^{-p} (Z(Nt) - Z(0)),
//! ```
//!
//! with `p = 3/5` (or `2/3` when `B = 0`), evaluated backward from each start
//! state. Also provides the discretized collision generator used as a
//! deterministic oracle for the space-homogeneous problem.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{kernel_r, theta_sq, Branch, ModelParams, PhononState};
use crate::error::{Error, Result};
use crate::kinetic::{run_ctrw_with, PiSampler};
use crate::quadrature::torus_midpoints;
use crate::rng::RngStream;
use crate::scaling::{mean_stderr, MeanEstimate};

/// Initial datum `u₀(y, k, i)`.
pub trait KineticDatum: Sync {
    fn value(&self, y: f64, s: PhononState) -> f64;
}

impl<F: Fn(f64, PhononState) -> f64 + Sync> KineticDatum for F {
    fn value(&self, y: f64, s: PhononState) -> f64 {
        self(y, s)
    }
}

/// Spatial factor `g(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum YProfile {
    Constant,
    /// Normalized Gaussian density.
    Gaussian { center: f64, width: f64 },
}

impl YProfile {
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            YProfile::Constant => 1.0,
            YProfile::Gaussian { center, width } => {
                let z = (y - center) / width;
                (-0.5 * z * z).exp() / (width * (2.0 * PI).sqrt())
            }
        }
    }
}

/// Wave-number/branch factor `h(k, i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KProfile {
    Constant,
    /// `h_i(k) = c_i[0] + Σ_m c_i[2m-1] cos 2πmk + c_i[2m] sin 2πmk`.
    Fourier { branch1: Vec<f64>, branch2: Vec<f64> },
    /// Piecewise constant on equal cells of `[-1/2, 1/2)`.
    Table { branch1: Vec<f64>, branch2: Vec<f64> },
}

fn fourier_eval(c: &[f64], k: f64) -> f64 {
    let mut v = c.first().copied().unwrap_or(0.0);
    for (m, pair) in c[1.min(c.len())..].chunks(2).enumerate() {
        let (s, co) = (2.0 * PI * (m + 1) as f64 * k).sin_cos();
        v += pair[0] * co;
        if let Some(b) = pair.get(1) {
            v += b * s;
        }
    }
    v
}

impl KProfile {
    pub fn value(&self, s: PhononState) -> f64 {
        match self {
            KProfile::Constant => 1.0,
            KProfile::Fourier { branch1, branch2 } => {
                let c = match s.branch {
                    Branch::One => branch1,
                    Branch::Two => branch2,
                };
                fourier_eval(c, s.k)
            }
            KProfile::Table { branch1, branch2 } => {
                let t = match s.branch {
                    Branch::One => branch1,
                    Branch::Two => branch2,
                };
                let j = (((s.k + 0.5) * t.len() as f64).floor() as usize).min(t.len() - 1);
                t[j]
            }
        }
    }

    /// `Σᵢ ∫ h_i(k) dk`.
    pub fn branch_integral(&self) -> f64 {
        match self {
            KProfile::Constant => 2.0,
            KProfile::Fourier { branch1, branch2 } => {
                branch1.first().copied().unwrap_or(0.0) + branch2.first().copied().unwrap_or(0.0)
            }
            KProfile::Table { branch1, branch2 } => {
                branch1.iter().sum::<f64>() / branch1.len() as f64
                    + branch2.iter().sum::<f64>() / branch2.len() as f64
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let KProfile::Table { branch1, branch2 } = self {
            if branch1.is_empty() || branch2.is_empty() {
                return Err(Error::InvalidArgument("empty k-profile table".into()));
            }
        }
        Ok(())
    }
}

/// Product datum `amplitude · g(y) · h(k, i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDatum {
    #[serde(default = "one")]
    pub amplitude: f64,
    pub y: YProfile,
    pub k: KProfile,
}

fn one() -> f64 {
    1.0
}

impl InitialDatum {
    pub fn new(amplitude: f64, y: YProfile, k: KProfile) -> Result<Self> {
        k.validate()?;
        if let YProfile::Gaussian { width, .. } = y {
            if !(width > 0.0) {
                return Err(Error::InvalidArgument(format!("Gaussian width must be > 0, got {width}")));
            }
        }
        Ok(Self { amplitude, y, k })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            amplitude: c,
            y: YProfile::Constant,
            k: KProfile::Constant,
        }
    }

    /// `ū₀(y) = Σᵢ ∫ u₀(y, k, i) dk`.
    pub fn bar_u0(&self, y: f64) -> f64 {
        self.amplitude * self.y.value(y) * self.k.branch_integral()
    }
}

impl KineticDatum for InitialDatum {
    fn value(&self, y: f64, s: PhononState) -> f64 {
        self.amplitude * self.y.value(y) * self.k.value(s)
    }
}

/// One evaluation point of `u_N` with its Monte Carlo error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticPoint {
    pub y: f64,
    /// Start state, or `None` for a branch-summed `k` integral.
    pub state: Option<PhononState>,
    pub n_scale: f64,
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticSolution {
    pub points: Vec<KineticPoint>,
}

/// Endpoint data of one path: scaled displacement and terminal state.
#[derive(Debug, Clone, Copy)]
struct Endpoint {
    dz: f64,
    terminal: PhononState,
}

fn check_scale(n_scale: f64, t: f64) -> Result<()> {
    if !(n_scale >= 1.0) {
        return Err(Error::InvalidArgument(format!("scale N must be >= 1, got {n_scale}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn endpoint<R: Rng + ?Sized>(
    sampler: &PiSampler,
    start: PhononState,
    n_scale: f64,
    t: f64,
    rng: &mut R,
) -> Result<Endpoint> {
    let p = sampler.params().space_scaling_exponent();
    let path = run_ctrw_with(sampler, start, 0.0, n_scale * t, rng, false)?;
    Ok(Endpoint {
        dz: path.z_final * n_scale.powf(-p),
        terminal: path.terminal,
    })
}

/// Uniform draw on `T × {1, 2}` avoiding the null state `k = 0`.
pub fn sample_uniform_state<R: Rng + ?Sized>(rng: &mut R) -> PhononState {
    loop {
        let k = rng.random::<f64>() - 0.5;
        let branch = if rng.random::<bool>() { Branch::One } else { Branch::Two };
        if k != 0.0 {
            return PhononState { k, branch };
        }
    }
}

fn fixed_endpoints(
    start: PhononState,
    n_scale: f64,
    t: f64,
    paths: usize,
    params: &ModelParams,
    stream: &RngStream,
) -> Result<Vec<Endpoint>> {
    let sampler = PiSampler::new(params);
    (0..paths as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream.substream(j).path_rng();
            endpoint(&sampler, start, n_scale, t, &mut rng)
        })
        .collect()
}

fn uniform_endpoints(
    n_scale: f64,
    t: f64,
    paths: usize,
    params: &ModelParams,
    stream: &RngStream,
) -> Result<Vec<Endpoint>> {
    let sampler = PiSampler::new(params);
    (0..paths as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream.substream(j).path_rng();
            let start = sample_uniform_state(&mut rng);
            endpoint(&sampler, start, n_scale, t, &mut rng)
        })
        .collect()
}

fn estimate<D: KineticDatum + ?Sized>(ends: &[Endpoint], y: f64, weight: f64, u0: &D) -> MeanEstimate {
    mean_stderr(ends.iter().map(|e| weight * u0.value(y + e.dz, e.terminal)))
}

fn check_paths(paths: usize) -> Result<()> {
    if paths == 0 {
        return Err(Error::InvalidArgument("need at least one path".into()));
    }
    Ok(())
}

/// `u_N(y, s, Nt)` by averaging `u₀` over path endpoints started at `s`.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_un<D: KineticDatum + ?Sized>(
    y: f64,
    s: PhononState,
    n_scale: f64,
    t: f64,
    u0: &D,
    paths: usize,
    params: &ModelParams,
    stream: &RngStream,
) -> Result<MeanEstimate> {
    Ok(evaluate_un_profile(&[y], s, n_scale, t, u0, paths, params, stream)?[0])
}

/// [`evaluate_un`] at several `y`, sharing the same paths across points.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_un_profile<D: KineticDatum + ?Sized>(
    ys: &[f64],
    s: PhononState,
    n_scale: f64,
    t: f64,
    u0: &D,
    paths: usize,
    params: &ModelParams,
    stream: &RngStream,
) -> Result<Vec<MeanEstimate>> {
    check_scale(n_scale, t)?;
    check_paths(paths)?;
    let ends = fixed_endpoints(s, n_scale, t, paths, params, stream)?;
    Ok(ys.iter().map(|&y| estimate(&ends, y, 1.0, u0)).collect())
}

/// `Σᵢ ∫ dk u_N(y, k, i, Nt)`, sampling `(k, i)` uniformly on `T × {1, 2}`
/// with weight 2 and one path per start.
pub fn k_average_un<D: KineticDatum + ?Sized>(
    y: f64,
    n_scale: f64,
    t: f64,
    u0: &D,
    paths: usize,
    params: &ModelParams,
    stream: &RngStream,
) -> Result<MeanEstimate> {
    Ok(k_average_profile(&[y], n_scale, t, u0, paths, params, stream)?[0])
}

/// [`k_average_un`] at several `y`, sharing paths across points.
pub fn k_average_profile<D: KineticDatum + ?Sized>(
    ys: &[f64],
    n_scale: f64,
    t: f64,
    u0: &D,
    paths: usize,
    params: &ModelParams,
    stream: &RngStream,
) -> Result<Vec<MeanEstimate>> {
    check_scale(n_scale, t)?;
    check_paths(paths)?;
    let ends = uniform_endpoints(n_scale, t, paths, params, stream)?;
    Ok(ys.iter().map(|&y| estimate(&ends, y, 2.0, u0)).collect())
}

/// Collision generator on an `n`-point midpoint grid of `T`, both branches.
///
/// Row/column index `b·n + j` stands for `(k_j, branch b+1)`. Off-diagonal
/// entries are `γ θᵢ²(k) R(k, k') θⱼ²(k') / n`; each diagonal entry makes its
/// row sum vanish so constants are conserved exactly.
pub fn collision_generator_matrix(params: &ModelParams, n: usize) -> Result<(Vec<PhononState>, Vec<f64>)> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("grid size must be even and >= 2, got {n}")));
    }
    let ks = torus_midpoints(n);
    let mut states = Vec::with_capacity(2 * n);
    let mut th = Vec::with_capacity(2 * n);
    for b in Branch::BOTH {
        for &k in &ks {
            let (t1, t2) = theta_sq(k, params)?;
            states.push(PhononState { k, branch: b });
            th.push(if b == Branch::One { t1 } else { t2 });
        }
    }
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for r in 0..m {
        let mut sum = 0.0;
        for c in 0..m {
            if r == c {
                continue;
            }
            let v = params.gamma * th[r] * kernel_r(states[r].k, states[c].k) * th[c] / n as f64;
            a[r * m + c] = v;
            sum += v;
        }
        a[r * m + r] = -sum;
    }
    Ok((states, a))
}
