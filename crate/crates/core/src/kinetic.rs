//! Event-driven sampler of the jump process `(K(t), I(t))` and its additive
//! functional `Z(t) = y + (1/2π) ∫₀ᵗ ω'(K(s)) ds`.
//!
//! Every jump lands on an independent draw from π, so a path is a sequence of
//! i.i.d. states with exponential holding times of mean `t(k, i)`.

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{Branch, ModelParams, PhononState};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Per-state quantities the sampler needs: total jump rate and drift
/// `ω'(k)/2π` of `Z`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kinematics {
    pub rate: f64,
    pub drift: f64,
}

/// `θ₁²(k)` from `a = sin πk` for `(k, B) ≠ (0, 0)`.
#[inline]
fn theta1_sq(a2: f64, s: f64, b: f64) -> f64 {
    if b < 0.0 {
        // ω₁ = α̂/ω₂ is the small one
        let w2 = s - 0.5 * b;
        4.0 * a2 / (w2 * 2.0 * s)
    } else {
        (s + 0.5 * b) / (2.0 * s)
    }
}

#[inline]
fn theta2_sq(a2: f64, s: f64, b: f64) -> f64 {
    if b > 0.0 {
        let w1 = s + 0.5 * b;
        4.0 * a2 / (w1 * 2.0 * s)
    } else {
        (s - 0.5 * b) / (2.0 * s)
    }
}

/// `(sin πk, cos πk)` for `k` in `[-1/2, 1/2]` with a single sine: the larger
/// of the two is recovered from the smaller by a well-conditioned square root.
#[inline]
pub(crate) fn sin_cos_pi(k: f64) -> (f64, f64) {
    use std::f64::consts::PI;
    let x = k.abs();
    let (a, c) = if x <= 0.25 {
        let a = (PI * x).sin();
        (a, ((1.0 - a) * (1.0 + a)).sqrt())
    } else {
        let c = (PI * (0.5 - x)).sin();
        (((1.0 - c) * (1.0 + c)).sqrt(), c)
    };
    (a.copysign(k), c)
}

#[inline]
pub(crate) fn kinematics(state: PhononState, params: &ModelParams) -> Kinematics {
    let (a, c) = sin_cos_pi(state.k);
    let a2 = a * a;
    let s = (4.0 * a2 + 0.25 * params.b * params.b).sqrt();
    if s == 0.0 {
        return Kinematics { rate: 0.0, drift: 0.0 };
    }
    let th = match state.branch {
        Branch::One => theta1_sq(a2, s, params.b),
        Branch::Two => theta2_sq(a2, s, params.b),
    };
    Kinematics {
        rate: params.gamma * th * 8.0 * a2,
        drift: 2.0 * a * c / s,
    }
}

/// Draw `(k, i)` from π.
///
/// The wave-number marginal `2 sin² πk` is sampled by rejection under the
/// envelope 2, then the branch is chosen with probability `θᵢ(k)²`. For many
/// draws with the same parameters [`PiSampler`] is faster.
pub fn sample_pi<R: Rng + ?Sized>(rng: &mut R, params: &ModelParams) -> PhononState {
    let k = loop {
        let k = rng.random::<f64>() - 0.5;
        let a = (std::f64::consts::PI * k).sin();
        if rng.random::<f64>() < a * a && k != 0.0 {
            break k;
        }
    };
    let (_, branch) = branch_and_kinematics(k, rng, params);
    PhononState { k, branch }
}

#[inline]
fn branch_and_kinematics<R: Rng + ?Sized>(
    k: f64,
    rng: &mut R,
    params: &ModelParams,
) -> (Kinematics, Branch) {
    let (a, c) = sin_cos_pi(k);
    let a2 = a * a;
    let s = (4.0 * a2 + 0.25 * params.b * params.b).sqrt();
    let th1 = if params.b == 0.0 { 0.5 } else { theta1_sq(a2, s, params.b) };
    let u: f64 = rng.random();
    let (branch, th) = if u < th1 {
        (Branch::One, th1)
    } else if params.b == 0.0 {
        (Branch::Two, 0.5)
    } else {
        (Branch::Two, theta2_sq(a2, s, params.b))
    };
    let kin = Kinematics {
        rate: params.gamma * th * 8.0 * a2,
        drift: 2.0 * a * c / s,
    };
    (kin, branch)
}

const ENVELOPE_CELLS: usize = 512;

/// Exact π sampler with a piecewise-constant envelope over equal cells of the
/// torus, chosen through an alias table. Acceptance is about 99%.
#[derive(Debug, Clone)]
pub struct PiSampler {
    params: ModelParams,
    cells: WeightedAliasIndex<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl PiSampler {
    pub fn new(params: &ModelParams) -> Self {
        let h = 1.0 / ENVELOPE_CELLS as f64;
        let f = |k: f64| {
            let a = (std::f64::consts::PI * k).sin();
            a * a
        };
        let mut upper = Vec::with_capacity(ENVELOPE_CELLS);
        let mut lower = Vec::with_capacity(ENVELOPE_CELLS);
        for j in 0..ENVELOPE_CELLS {
            let (l, r) = (-0.5 + j as f64 * h, -0.5 + (j + 1) as f64 * h);
            // sin² is monotone on each half, so extremes sit at cell ends;
            // the upper bound is padded against rounding in sin
            let (fl, fr) = (f(l), f(r));
            upper.push(fl.max(fr) * (1.0 + 1e-12) + 1e-300);
            lower.push(if l < 0.0 && r > 0.0 { 0.0 } else { fl.min(fr) * (1.0 - 1e-12) });
        }
        let cells = WeightedAliasIndex::new(upper.clone()).expect("positive envelope");
        Self {
            params: *params,
            cells,
            upper,
            lower,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhononState {
        self.draw(rng).0
    }

    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (PhononState, Kinematics) {
        let h = 1.0 / ENVELOPE_CELLS as f64;
        let k = loop {
            let j = self.cells.sample(rng);
            let k = -0.5 + (j as f64 + rng.random::<f64>()) * h;
            let u = rng.random::<f64>() * self.upper[j];
            if k == 0.0 || k >= 0.5 {
                continue;
            }
            if u < self.lower[j] {
                break k;
            }
            let a = (std::f64::consts::PI * k).sin();
            if u < a * a {
                break k;
            }
        };
        let (kin, branch) = branch_and_kinematics(k, rng, &self.params);
        (PhononState { k, branch }, kin)
    }
}

fn absorbing(s: PhononState) -> Error {
    Error::AbsorbingState {
        k: s.k,
        branch: s.branch.index(),
    }
}

/// One jump: exponential holding time of mean `t(k, i)` and a π-distributed
/// next state.
pub fn step<R: Rng + ?Sized>(
    s: PhononState,
    params: &ModelParams,
    rng: &mut R,
) -> Result<(f64, PhononState)> {
    let kin = kinematics(s, params);
    if !(kin.rate > 0.0) {
        return Err(absorbing(s));
    }
    let tau: f64 = Exp1.sample(rng);
    Ok((tau / kin.rate, sample_pi(rng, params)))
}

/// A sampled trajectory up to a horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpPath {
    /// Visited states, starting state first. Empty unless recording.
    pub states: Vec<PhononState>,
    /// Time spent in each visited state; the last entry is truncated at the
    /// horizon. Empty unless recording.
    pub holds: Vec<f64>,
    pub z_final: f64,
    pub t_final: f64,
    pub terminal: PhononState,
    /// Number of jumps strictly before the horizon.
    pub n_jumps: u64,
}

/// Simulate `Z` from `y0` at state `start` up to `horizon`.
pub fn run_ctrw<R: Rng + ?Sized>(
    start: PhononState,
    y0: f64,
    horizon: f64,
    params: &ModelParams,
    rng: &mut R,
    record: bool,
) -> Result<JumpPath> {
    run_ctrw_with(&PiSampler::new(params), start, y0, horizon, rng, record)
}

/// [`run_ctrw`] with a prebuilt sampler, for ensembles.
pub fn run_ctrw_with<R: Rng + ?Sized>(
    sampler: &PiSampler,
    start: PhononState,
    y0: f64,
    horizon: f64,
    rng: &mut R,
    record: bool,
) -> Result<JumpPath> {
    let params = &sampler.params;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    let mut state = start;
    let mut kin = kinematics(state, params);
    if !(kin.rate > 0.0) {
        return Err(absorbing(state));
    }
    let mut states = Vec::new();
    let mut holds = Vec::new();
    let mut time = 0.0;
    let mut dz = 0.0;
    let mut n_jumps = 0u64;
    if horizon > 0.0 {
        loop {
            let tau: f64 = Exp1.sample(rng);
            let hold = tau / kin.rate;
            if record {
                states.push(state);
            }
            if time + hold >= horizon {
                let rest = horizon - time;
                dz += kin.drift * rest;
                if record {
                    holds.push(rest);
                }
                break;
            }
            dz += kin.drift * hold;
            time += hold;
            if record {
                holds.push(hold);
            }
            n_jumps += 1;
            (state, kin) = sampler.draw(rng);
        }
    } else if record {
        states.push(state);
        holds.push(0.0);
    }
    Ok(JumpPath {
        states,
        holds,
        z_final: y0 + dz,
        t_final: horizon,
        terminal: state,
        n_jumps,
    })
}

/// `N^{-p} (Z(Nt) - y0)` with `p = 3/5`, or `p = 2/3` when `B = 0`.
pub fn sample_scaled_endpoint<R: Rng + ?Sized>(
    n_scale: f64,
    t: f64,
    start: PhononState,
    params: &ModelParams,
    rng: &mut R,
) -> Result<f64> {
    scaled_endpoint_with(&PiSampler::new(params), n_scale, t, start, rng)
}

/// [`sample_scaled_endpoint`] with a prebuilt sampler.
pub fn scaled_endpoint_with<R: Rng + ?Sized>(
    sampler: &PiSampler,
    n_scale: f64,
    t: f64,
    start: PhononState,
    rng: &mut R,
) -> Result<f64> {
    if !(n_scale >= 1.0) {
        return Err(Error::InvalidArgument(format!("scale N must be >= 1, got {n_scale}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    let path = run_ctrw_with(sampler, start, 0.0, n_scale * t, rng, false)?;
    Ok(path.z_final * n_scale.powf(-sampler.params.space_scaling_exponent()))
}

/// Initial state law for ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StartLaw {
    Fixed(PhononState),
    /// Independent draw from π per path.
    Pi,
}

impl StartLaw {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, sampler: &PiSampler) -> PhononState {
        match *self {
            StartLaw::Fixed(s) => s,
            StartLaw::Pi => sampler.sample(rng),
        }
    }
}

/// Ensemble of scaled endpoints. Path `j` runs on `stream.substream(j)`, so
/// the output is identical under any thread count.
pub fn scaled_endpoint_ensemble(
    n_scale: f64,
    t: f64,
    start: StartLaw,
    params: &ModelParams,
    stream: &RngStream,
    paths: usize,
) -> Result<Vec<f64>> {
    let sampler = PiSampler::new(params);
    (0..paths as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream.substream(j).path_rng();
            let s = start.draw(&mut rng, &sampler);
            scaled_endpoint_with(&sampler, n_scale, t, s, &mut rng)
        })
        .collect()
}

/// Ensemble of full paths (unscaled), each on its own substream.
pub fn path_ensemble(
    start: StartLaw,
    y0: f64,
    horizon: f64,
    params: &ModelParams,
    stream: &RngStream,
    paths: usize,
    record: bool,
) -> Result<Vec<JumpPath>> {
    let sampler = PiSampler::new(params);
    (0..paths as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream.substream(j).path_rng();
            let s = start.draw(&mut rng, &sampler);
            run_ctrw_with(&sampler, s, y0, horizon, &mut rng, record)
        })
        .collect()
}
