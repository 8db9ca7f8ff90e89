use superdiff::boltzmann::{k_average_profile, InitialDatum, KProfile, YProfile};
use superdiff::fracdiff::{evolve, leakage_estimate, GridFunction};
use superdiff::kinetic::{scaled_endpoint_ensemble, StartLaw};
use superdiff::scaling::fit_stable_charfn;
use superdiff::{ModelParams, RngStream};

use crate::Check;

const PATHS: usize = 1_000_000;
const FIT_PATHS: usize = 100_000;
const SCALES: [f64; 3] = [1e2, 1e3, 1e4];
const HALF_LENGTH: f64 = 3000.0;

/// Largest relative deviation over the grid, with the standard error of the
/// relative deviation at the worst point.
struct Discrepancy {
    value: f64,
    stderr: f64,
    y: f64,
}

pub fn run(c: &mut Check) {
    let p = ModelParams::new(1.0, 1.0).unwrap();
    let t = 1.0;
    let ys: Vec<f64> = (0..21).map(|j| -2.0 + 0.2 * j as f64).collect();

    let ens = scaled_endpoint_ensemble(1e4, t, StartLaw::Pi, &p, &RngStream::new(701, 0), FIT_PATHS).unwrap();
    let fit = fit_stable_charfn(&ens, t, None, p.stable_index()).unwrap();
    let d = fit.d_constant;
    c.note(format!("charfn fit at N=1e4 ({FIT_PATHS} π-started paths): D = {d:.5}, exponent {:.4}", fit.exponent));

    let s_half = 0.5 * p.stable_index();
    let leak = leakage_estimate(HALF_LENGTH, d, s_half, t);
    c.require(leak < 1e-6, format!("reference box leaks {leak:e}"));
    let g0 = GridFunction::gaussian(HALF_LENGTH, 1 << 19, 0.0, 1.0, 1.0).unwrap();
    let g = evolve(&g0, d, s_half, t).unwrap();
    let reference: Vec<f64> = ys.iter().map(|&y| g.interpolate_local(y, 8)).collect();

    // ū₀ = Σᵢ∫u₀ dk for u₀ = ½ ū₀(y)
    let u0 = InitialDatum::new(0.5, YProfile::Gaussian { center: 0.0, width: 1.0 }, KProfile::Constant).unwrap();
    let mut discrepancies = Vec::new();
    for (j, &n) in SCALES.iter().enumerate() {
        let prof = k_average_profile(&ys, n, t, &u0, PATHS, &p, &RngStream::new(702, j as u64)).unwrap();
        let mut worst = Discrepancy { value: 0.0, stderr: 0.0, y: 0.0 };
        let mut outside = 0;
        for ((&y, e), &r) in ys.iter().zip(&prof).zip(&reference) {
            let rel = (e.mean - r).abs() / r;
            if rel > worst.value {
                worst = Discrepancy { value: rel, stderr: e.stderr / r, y };
            }
            if n == 1e4 && (e.mean - r).abs() > (3.0 * e.stderr).max(0.1 * r) {
                outside += 1;
                c.require(false, format!("N=1e4, y={y:.1}: {} ± {} vs {r}", e.mean, e.stderr));
            }
        }
        c.note(format!(
            "N={n:.0e}: max relative deviation {:.4} ± {:.4} at y={:+.1}{}",
            worst.value,
            worst.stderr,
            worst.y,
            if n == 1e4 { format!(", {outside} of 21 points outside max(3σ, 10%)") } else { String::new() }
        ));
        discrepancies.push(worst);
    }
    for w in discrepancies.windows(2) {
        let slack = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        c.require(
            w[1].value <= w[0].value + slack,
            format!("discrepancy grew from {} to {} (slack {slack})", w[0].value, w[1].value),
        );
    }
}
