//! Charged harmonic chain on a ring of `n` sites in a magnetic field, with
//! energy-conserving velocity noise, evolved in wave-function coordinates.
//!
//! Discrete transform: `f̂(k_j) = Σ_x e^{-2πi k_j x} f(x)` with `k_j = j/n`
//! (index order of the FFT, `k_j` read on `[-1/2, 1/2)`), inverse divided by
//! `n`. The energy is `E = ½ (1/n) Σ_j Σ_i |ψ̂ᵢ(k_j)|²`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::dispersion::{kernel_r, omega, theta_sq, wrap_torus, ModelParams};
use crate::error::{Error, Result};
use crate::quadrature::torus_midpoints;
use crate::rng::RngStream;
use crate::scaling::{mean_stderr, MeanEstimate};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(θ₁, θ₂)` and `(ω₁, ω₂)` at `k`, with `θ = 1/√2` at the degenerate point
/// `(k, B) = (0, 0)` by continuity.
fn mode_constants(k: f64, params: &ModelParams) -> ([f64; 2], [f64; 2]) {
    let (w1, w2) = omega(k, params);
    let th = match theta_sq(k, params) {
        Ok((a, b)) => [a.sqrt(), b.sqrt()],
        Err(_) => [std::f64::consts::FRAC_1_SQRT_2; 2],
    };
    (th, [w1, w2])
}

/// Wave functions `(ψ̂₁(k), ψ̂₂(k))` of a single mode from `(q̂(k), v̂(k))`.
pub fn psi_from_mode(k: f64, q: [Complex64; 2], v: [Complex64; 2], params: &ModelParams) -> [Complex64; 2] {
    let (th, w) = mode_constants(k, params);
    [
        th[0] * (v[0] - I * w[1] * q[0] + I * v[1] + w[1] * q[1]),
        th[1] * (v[0] - I * w[0] * q[0] - I * v[1] - w[0] * q[1]),
    ]
}

/// `v̂(k)` from the wave functions at `k` and `-k`.
pub fn v_from_psi(k: f64, psi_k: [Complex64; 2], psi_mk: [Complex64; 2], params: &ModelParams) -> [Complex64; 2] {
    let (th, _) = mode_constants(k, params);
    let s1 = psi_k[0] + psi_mk[0].conj();
    let d1 = psi_k[0] - psi_mk[0].conj();
    let s2 = psi_k[1] + psi_mk[1].conj();
    let d2 = psi_k[1] - psi_mk[1].conj();
    [
        0.5 * th[0] * s1 + 0.5 * th[1] * s2,
        -0.5 * I * th[0] * d1 + 0.5 * I * th[1] * d2,
    ]
}

/// `q̂(k)` from the wave functions at `k` and `-k`. Branches with `ωᵢ(k) = 0`
/// carry no position information and contribute nothing.
pub fn q_from_psi(k: f64, psi_k: [Complex64; 2], psi_mk: [Complex64; 2], params: &ModelParams) -> [Complex64; 2] {
    let (th, w) = mode_constants(k, params);
    let c = |i: usize| if w[i] > 0.0 { th[i] / (2.0 * w[i]) } else { 0.0 };
    let s1 = psi_k[0] + psi_mk[0].conj();
    let d1 = psi_k[0] - psi_mk[0].conj();
    let s2 = psi_k[1] + psi_mk[1].conj();
    let d2 = psi_k[1] - psi_mk[1].conj();
    [I * c(0) * d1 + I * c(1) * d2, c(0) * s1 - c(1) * s2]
}

/// Per-mode constants and FFT plans shared by all states of one ring.
pub struct ModeTable {
    n: usize,
    params: ModelParams,
    k: Vec<f64>,
    theta: [Vec<f64>; 2],
    omega: [Vec<f64>; 2],
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ModeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeTable").field("n", &self.n).field("params", &self.params).finish()
    }
}

impl ModeTable {
    pub fn new(n: usize, params: &ModelParams) -> Result<Arc<Self>> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("ring size must be a power of two >= 2, got {n}")));
        }
        let k: Vec<f64> = (0..n).map(|j| wrap_torus(j as f64 / n as f64)).collect();
        let mut theta = [Vec::with_capacity(n), Vec::with_capacity(n)];
        let mut om = [Vec::with_capacity(n), Vec::with_capacity(n)];
        for &kj in &k {
            let (th, w) = mode_constants(kj, params);
            for i in 0..2 {
                theta[i].push(th[i]);
                om[i].push(w[i]);
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            n,
            params: *params,
            k,
            theta,
            omega: om,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }))
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    fn neg(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }
}

/// Real configuration of the ring.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

impl Fields {
    pub fn zeros(n: usize) -> Self {
        Self {
            v1: vec![0.0; n],
            v2: vec![0.0; n],
            q1: vec![0.0; n],
            q2: vec![0.0; n],
        }
    }

    /// `Σ_x ½|v_x|² + ½|q_x - q_{x+1}|²` on the ring.
    pub fn energy(&self) -> f64 {
        let n = self.v1.len();
        let mut e = 0.0;
        for x in 0..n {
            let y = (x + 1) % n;
            e += 0.5 * (self.v1[x].powi(2) + self.v2[x].powi(2));
            e += 0.5 * ((self.q1[x] - self.q1[y]).powi(2) + (self.q2[x] - self.q2[y]).powi(2));
        }
        e
    }
}

/// Wave functions `ψ̂ᵢ(k_j)` of the ring together with the model and scale.
#[derive(Debug, Clone)]
pub struct ChainState {
    modes: Arc<ModeTable>,
    epsilon: f64,
    pub psi: [Vec<Complex64>; 2],
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

/// Position of site `s` centred on the ring, in `[-n/2, n/2)`.
pub fn site_position(s: usize, n: usize) -> f64 {
    if 2 * s < n {
        s as f64
    } else {
        s as f64 - n as f64
    }
}

impl ChainState {
    pub fn zeros(n: usize, params: &ModelParams, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        let modes = ModeTable::new(n, params)?;
        Ok(Self {
            modes,
            epsilon,
            psi: [vec![Complex64::default(); n], vec![Complex64::default(); n]],
        })
    }

    pub fn from_psi_hat(modes: Arc<ModeTable>, epsilon: f64, psi1: Vec<Complex64>, psi2: Vec<Complex64>) -> Result<Self> {
        check_epsilon(epsilon)?;
        if psi1.len() != modes.n || psi2.len() != modes.n {
            return Err(Error::InvalidArgument("wave function length does not match the ring".into()));
        }
        Ok(Self {
            modes,
            epsilon,
            psi: [psi1, psi2],
        })
    }

    /// Wave functions of a real configuration.
    pub fn init_from_fields(fields: &Fields, params: &ModelParams, epsilon: f64) -> Result<Self> {
        let n = fields.v1.len();
        if [fields.v2.len(), fields.q1.len(), fields.q2.len()].iter().any(|&m| m != n) {
            return Err(Error::InvalidArgument("field lengths differ".into()));
        }
        let mut st = Self::zeros(n, params, epsilon)?;
        let v1 = st.fft(&fields.v1);
        let v2 = st.fft(&fields.v2);
        let q1 = st.fft(&fields.q1);
        let q2 = st.fft(&fields.q2);
        for j in 0..n {
            let p = psi_from_mode(st.modes.k[j], [q1[j], q2[j]], [v1[j], v2[j]], params);
            st.psi[0][j] = p[0];
            st.psi[1][j] = p[1];
        }
        Ok(st)
    }

    /// Thermal-like data: `ψᵢ(x)` independent complex Gaussians with
    /// `E|ψᵢ(x)|² = 2 T(ε x)`. Modes of vanishing weight at `k = 0` are zeroed,
    /// as no real configuration can excite them.
    pub fn thermal<R: Rng + ?Sized, T: Fn(f64) -> f64>(
        modes: Arc<ModeTable>,
        epsilon: f64,
        temperature: T,
        rng: &mut R,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        let n = modes.n;
        let mut psi = [Vec::with_capacity(n), Vec::with_capacity(n)];
        for branch in psi.iter_mut() {
            for s in 0..n {
                let temp = temperature(epsilon * site_position(s, n));
                if !(temp >= 0.0) {
                    return Err(Error::InvalidArgument(format!("temperature must be >= 0, got {temp}")));
                }
                let sd = temp.sqrt();
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                branch.push(Complex64::new(sd * re, sd * im));
            }
        }
        let mut st = Self::from_psi_hat(modes, epsilon, psi[0].clone(), psi[1].clone())?;
        for i in 0..2 {
            st.modes.forward.process(&mut st.psi[i]);
            if st.modes.theta[i][0] == 0.0 {
                st.psi[i][0] = Complex64::default();
            }
        }
        Ok(st)
    }

    pub fn n_sites(&self) -> usize {
        self.modes.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn params(&self) -> &ModelParams {
        &self.modes.params
    }

    pub fn modes(&self) -> &Arc<ModeTable> {
        &self.modes
    }

    fn fft(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.modes.forward.process(&mut buf);
        buf
    }

    fn ifft(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        self.modes.inverse.process(&mut buf);
        let inv = 1.0 / self.modes.n as f64;
        buf.iter_mut().for_each(|c| *c *= inv);
        buf
    }

    fn pair(&self, j: usize) -> ([Complex64; 2], [Complex64; 2]) {
        let m = self.modes.neg(j);
        ([self.psi[0][j], self.psi[1][j]], [self.psi[0][m], self.psi[1][m]])
    }

    fn velocity_hat(&self) -> [Vec<Complex64>; 2] {
        let n = self.modes.n;
        let mut out = [Vec::with_capacity(n), Vec::with_capacity(n)];
        for j in 0..n {
            let (pk, pm) = self.pair(j);
            let th = [self.modes.theta[0][j], self.modes.theta[1][j]];
            let s1 = pk[0] + pm[0].conj();
            let d1 = pk[0] - pm[0].conj();
            let s2 = pk[1] + pm[1].conj();
            let d2 = pk[1] - pm[1].conj();
            out[0].push(0.5 * th[0] * s1 + 0.5 * th[1] * s2);
            out[1].push(-0.5 * I * th[0] * d1 + 0.5 * I * th[1] * d2);
        }
        out
    }

    /// Real velocity fields and the largest imaginary residue of the inverse
    /// transform.
    pub fn velocities(&self) -> ([Vec<f64>; 2], f64) {
        let [a, b] = self.velocity_hat();
        let (a, b) = (self.ifft(a), self.ifft(b));
        let imag = a.iter().chain(&b).fold(0.0f64, |m, c| m.max(c.im.abs()));
        ([a.iter().map(|c| c.re).collect(), b.iter().map(|c| c.re).collect()], imag)
    }

    /// Real configuration; the mean of `q` is not carried by `ψ̂` and is set
    /// to zero.
    pub fn reconstruct(&self) -> Fields {
        let n = self.modes.n;
        let ([v1, v2], _) = self.velocities();
        let mut q1h = Vec::with_capacity(n);
        let mut q2h = Vec::with_capacity(n);
        for j in 0..n {
            let (pk, pm) = self.pair(j);
            let q = q_from_psi(self.modes.k[j], pk, pm, &self.modes.params);
            if self.modes.k[j] == 0.0 {
                q1h.push(Complex64::default());
                q2h.push(Complex64::default());
            } else {
                q1h.push(q[0]);
                q2h.push(q[1]);
            }
        }
        let q1 = self.ifft(q1h).iter().map(|c| c.re).collect();
        let q2 = self.ifft(q2h).iter().map(|c| c.re).collect();
        Fields { v1, v2, q1, q2 }
    }

    /// `E = ½ (1/n) Σ |ψ̂|²`.
    pub fn energy(&self) -> f64 {
        let s: f64 = self.psi.iter().flatten().map(|c| c.norm_sqr()).sum();
        0.5 * s / self.modes.n as f64
    }

    /// Exact Hamiltonian and magnetic flow: `ψ̂ᵢ ← e^{-iωᵢ dt} ψ̂ᵢ`.
    pub fn deterministic_step(&mut self, dt: f64) {
        if dt == 0.0 {
            return;
        }
        for i in 0..2 {
            for (c, &w) in self.psi[i].iter_mut().zip(&self.modes.omega[i]) {
                *c *= Complex64::from_polar(1.0, -w * dt);
            }
        }
    }

    fn apply_phases(&mut self, phases: &[Vec<Complex64>; 2]) {
        for (psi, ph) in self.psi.iter_mut().zip(phases) {
            for (c, p) in psi.iter_mut().zip(ph) {
                *c *= p;
            }
        }
    }

    /// Noise step with Brownian increments `ΔW ~ N(0, dt)` drawn per bond.
    pub fn noise_step<R: Rng + ?Sized>(&mut self, dt: f64, rng: &mut R) {
        let sd = dt.sqrt();
        let dw: Vec<f64> = (0..self.modes.n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                sd * z
            })
            .collect();
        self.noise_step_with(&dw);
    }

    /// Noise step with prescribed increments: `dw[x]` drives bond `(x, x+1)`.
    ///
    /// Each bond rotates its velocity difference by `2√(εγ) dw[x]` and keeps
    /// the pair sum; even bonds are swept before odd ones. Positions are
    /// untouched, so `ψ̂` moves by the transformed velocity increment only.
    pub fn noise_step_with(&mut self, dw: &[f64]) {
        let n = self.modes.n;
        assert_eq!(dw.len(), n, "one increment per bond");
        let p = &self.modes.params;
        let rate = 2.0 * (self.epsilon * p.gamma).sqrt();
        let ([v1, v2], _) = self.velocities();
        let mut dv1 = vec![0.0; n];
        let mut dv2 = vec![0.0; n];
        for parity in 0..2 {
            for x in (parity..n).step_by(2) {
                let phi = rate * dw[x];
                if phi == 0.0 {
                    continue;
                }
                let z = (x + 1) % n;
                let d1 = (v1[z] + dv1[z]) - (v1[x] + dv1[x]);
                let d2 = (v2[z] + dv2[z]) - (v2[x] + dv2[x]);
                let s = phi.sin();
                let h = (0.5 * phi).sin();
                let cm1 = -2.0 * h * h;
                // half the change of the rotated difference
                let e1 = 0.5 * (d1 * cm1 + d2 * s);
                let e2 = 0.5 * (d2 * cm1 - d1 * s);
                dv1[z] += e1;
                dv1[x] -= e1;
                dv2[z] += e2;
                dv2[x] -= e2;
            }
        }
        let dv1h = self.fft(&dv1);
        let dv2h = self.fft(&dv2);
        for j in 0..n {
            let t1 = self.modes.theta[0][j];
            let t2 = self.modes.theta[1][j];
            self.psi[0][j] += t1 * (dv1h[j] + I * dv2h[j]);
            self.psi[1][j] += t2 * (dv1h[j] - I * dv2h[j]);
        }
    }

    /// Evolve to microscopic time `t_macro/ε` by Strang steps (half
    /// deterministic, noise, half deterministic). Returns the step count.
    pub fn run_kinetic_horizon<R: Rng + ?Sized>(&mut self, t_macro: f64, dt: f64, rng: &mut R) -> Result<u64> {
        let steps = step_count(t_macro, self.epsilon, dt)?;
        if steps == 0 {
            return Ok(0);
        }
        let half: [Vec<Complex64>; 2] = [0, 1].map(|i| {
            self.modes.omega[i]
                .iter()
                .map(|&w| Complex64::from_polar(1.0, -0.5 * w * dt))
                .collect()
        });
        let noisy = self.modes.params.gamma > 0.0;
        for _ in 0..steps {
            self.apply_phases(&half);
            if noisy {
                self.noise_step(dt, rng);
            }
            self.apply_phases(&half);
        }
        Ok(steps)
    }

    /// `(ε/2) |ψ̂ᵢ(k_j)|²` per branch.
    pub fn spectral_density(&self) -> [Vec<f64>; 2] {
        let e = 0.5 * self.epsilon;
        [0, 1].map(|i| self.psi[i].iter().map(|c| e * c.norm_sqr()).collect())
    }

    /// Wigner pairing `⟨Ωᵢ^ε, J⟩` of this state for `J(y, k) = a(y) b(k)`,
    /// branch by branch:
    ///
    /// ```text
    /// (ε/2)(1/n) Σ_d ĉ_d* Σ_j ψ̂ᵢ(k_j)* ψ̂ᵢ(k_{j+d}) b(k_j + d/2n),
    /// ĉ_d = (1/n) Σ_x e^{-2πi d x/n} a(ε x),
    /// ```
    ///
    /// which equals the lattice form `(ε/2) Σ_x |ψᵢ(x)|² a(εx)` when `b ≡ 1`.
    /// Only `|d| ≤ d_max` enters.
    pub fn wigner_pairing<A, B>(&self, a: A, b: B, d_max: usize) -> Result<[f64; 2]>
    where
        A: Fn(f64) -> f64,
        B: Fn(f64, usize) -> f64,
    {
        let n = self.modes.n;
        if d_max > n / 2 {
            return Err(Error::InvalidArgument(format!(
                "mode shift {d_max} exceeds the ring's resolvable range {}",
                n / 2
            )));
        }
        let ax: Vec<f64> = (0..n).map(|s| a(self.epsilon * site_position(s, n))).collect();
        let c = self.fft(&ax);
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            let psi = &self.psi[i];
            let mut acc = Complex64::default();
            for d in -(d_max as i64)..=(d_max as i64) {
                if 2 * d.unsigned_abs() as usize == n && d < 0 {
                    continue;
                }
                let du = d.rem_euclid(n as i64) as usize;
                let cd = c[du] / n as f64;
                let mut inner = Complex64::default();
                for j in 0..n {
                    let center = wrap_torus(self.modes.k[j] + d as f64 / (2.0 * n as f64));
                    inner += psi[j].conj() * psi[(j + du) % n] * b(center, i);
                }
                acc += cd.conj() * inner;
            }
            *o = 0.5 * self.epsilon * acc.re / n as f64;
        }
        Ok(out)
    }
}

/// Number of Strang steps covering microscopic time `t_macro/ε`.
pub fn step_count(t_macro: f64, epsilon: f64, dt: f64) -> Result<u64> {
    if !(t_macro >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("need t_macro >= 0 and dt > 0, got {t_macro}, {dt}")));
    }
    let exact = t_macro / (epsilon * dt);
    if exact > 1e9 {
        return Err(Error::NumericalGuard(format!(
            "{exact:.3e} steps exceed 1e9; use a larger dt or epsilon"
        )));
    }
    let steps = exact.round();
    if (steps - exact).abs() > 1e-9 * exact.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} does not divide the horizon t/ε = {} into whole steps",
            t_macro / epsilon
        )));
    }
    Ok(steps as u64)
}

/// Ensemble-averaged spectral density per branch and mode.
pub fn spectral_density_estimate(ensemble: &[ChainState]) -> Result<[Vec<MeanEstimate>; 2]> {
    let first = ensemble.first().ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    let n = first.n_sites();
    let dens: Vec<[Vec<f64>; 2]> = ensemble.iter().map(|s| s.spectral_density()).collect();
    Ok([0, 1].map(|i| (0..n).map(|j| mean_stderr(dens.iter().map(|d| d[i][j]))).collect()))
}

/// Ensemble average of the spectral density over `bins` equal `k`-bins per
/// branch; each member contributes its bin mean. Returns bin centres and
/// estimates.
pub fn binned_spectral_density(ensemble: &[ChainState], bins: usize) -> Result<(Vec<f64>, [Vec<MeanEstimate>; 2])> {
    let first = ensemble.first().ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    let n = first.n_sites();
    if bins == 0 || n % bins != 0 {
        return Err(Error::InvalidArgument(format!("{bins} bins do not tile {n} modes")));
    }
    let k = first.modes.wavenumbers();
    let bin_of = |j: usize| (((k[j] + 0.5) * bins as f64).floor() as usize).min(bins - 1);
    let per = n / bins;
    let member_bins: Vec<[Vec<f64>; 2]> = ensemble
        .iter()
        .map(|s| {
            let d = s.spectral_density();
            [0, 1].map(|i| {
                let mut acc = vec![0.0; bins];
                for (j, v) in d[i].iter().enumerate() {
                    acc[bin_of(j)] += v;
                }
                acc.iter().map(|a| a / per as f64).collect()
            })
        })
        .collect();
    let centres = (0..bins).map(|b| -0.5 + (b as f64 + 0.5) / bins as f64).collect();
    let est = [0, 1].map(|i| (0..bins).map(|b| mean_stderr(member_bins.iter().map(|m| m[i][b]))).collect());
    Ok((centres, est))
}

/// Evolve `members` independent thermal states with temperature profile
/// `temperature` to `t_macro`. Member `m` uses `stream.substream(m)`.
#[allow(clippy::too_many_arguments)]
pub fn run_thermal_ensemble<T: Fn(f64) -> f64 + Sync>(
    n: usize,
    params: &ModelParams,
    epsilon: f64,
    temperature: T,
    t_macro: f64,
    dt: f64,
    members: usize,
    stream: &RngStream,
) -> Result<Vec<ChainState>> {
    let modes = ModeTable::new(n, params)?;
    step_count(t_macro, epsilon, dt)?;
    (0..members as u64)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream.substream(m).path_rng();
            let mut st = ChainState::thermal(modes.clone(), epsilon, &temperature, &mut rng)?;
            st.run_kinetic_horizon(t_macro, dt, &mut rng)?;
            Ok(st)
        })
        .collect()
}

/// Collision operator on an `n`-point midpoint grid,
/// `(CJ)ᵢ(k) = Σⱼ (1/n) Σ_{k'} θᵢ²(k) R(k,k') θⱼ²(k') (Jⱼ(k') - Jᵢ(k))`.
pub fn collision_operator_apply(j: [&[f64]; 2], params: &ModelParams) -> Result<[Vec<f64>; 2]> {
    let n = j[0].len();
    if n < 64 || j[1].len() != n {
        return Err(Error::InvalidArgument(format!("need two grids of equal size >= 64, got {n}")));
    }
    let ks = torus_midpoints(n);
    let th: Vec<(f64, f64)> = ks.iter().map(|&k| theta_sq(k, params)).collect::<Result<_>>()?;
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for a in 0..n {
        let tha = [th[a].0, th[a].1];
        for i in 0..2 {
            let mut acc = 0.0;
            for b in 0..n {
                let r = kernel_r(ks[a], ks[b]);
                acc += r * (th[b].0 * (j[0][b] - j[i][a]) + th[b].1 * (j[1][b] - j[i][a]));
            }
            out[i][a] = tha[i] * acc / n as f64;
        }
    }
    Ok(out)
}

/// Matrix of `d/dt (q̂¹, q̂², v̂¹, v̂²) = M(k)(…)`, row-major.
pub fn mode_matrix(k: f64, params: &ModelParams) -> [[f64; 4]; 4] {
    let a = 4.0 * (PI * k).sin().powi(2);
    let b = params.b;
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-a, 0.0, 0.0, b],
        [0.0, -a, -b, 0.0],
    ]
}
