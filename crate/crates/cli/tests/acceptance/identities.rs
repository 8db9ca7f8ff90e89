use rand::Rng;
use superdiff::dispersion::{alpha_hat, beta_hat, kernel_r, omega, r_bar, theta_sq, total_rate};
use superdiff::quadrature::torus_trapezoid;
use superdiff::{ModelParams, RngStream};

use crate::Check;

pub fn run(c: &mut Check) {
    let mut rng = RngStream::new(101, 0).path_rng();
    for b in [-2.0, 0.0, 1.0] {
        let p = ModelParams::new(b, 1.0).unwrap();
        let (mut worst_sum, mut worst_prod) = (0.0f64, 0.0f64);
        for _ in 0..10_000 {
            let k = rng.random::<f64>() - 0.5;
            let (t1, t2) = theta_sq(k, &p).unwrap();
            worst_sum = worst_sum.max((t1 + t2 - 1.0).abs());
            let (w1, w2) = omega(k, &p);
            let a = alpha_hat(k);
            worst_prod = worst_prod.max((w1 * w2 - a).abs() / a.max(1e-300));
        }
        c.require(worst_sum < 1e-12, format!("B={b}: |θ₁²+θ₂²-1| up to {worst_sum:e}"));
        c.require(worst_prod < 1e-12, format!("B={b}: ω₁ω₂ vs α̂ relative error {worst_prod:e}"));
        c.note(format!("B={b:>2}: max|θ₁²+θ₂²-1| = {worst_sum:.1e}, max rel |ω₁ω₂-α̂| = {worst_prod:.1e}"));
    }

    let mut worst = 0.0f64;
    for j in 0..200 {
        let k = -0.5 + (j as f64 + 0.37) / 200.0;
        let integral = torus_trapezoid(|k2| kernel_r(k, k2), 256);
        let s = (std::f64::consts::PI * k).sin();
        let closed = 8.0 * s * s;
        worst = worst
            .max((integral - closed).abs())
            .max((integral + 2.0 * beta_hat(k)).abs())
            .max((integral - total_rate(k)).abs());
    }
    c.require(worst < 1e-10, format!("∫R(k,·) vs 8sin²πk and -2β̂: {worst:e}"));
    let rbar = torus_trapezoid(|k| torus_trapezoid(|k2| kernel_r(k, k2), 256), 256);
    c.require((rbar - 4.0).abs() < 1e-10 && (r_bar() - 4.0).abs() < 1e-10, format!("R̄ = {rbar}"));
    c.note(format!("∫R(k,·)dk' identities to {worst:.1e}; R̄ by quadrature = {rbar:.15}"));
}
