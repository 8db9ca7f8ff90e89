use superdiff::kinetic::{scaled_endpoint_ensemble, StartLaw};
use superdiff::scaling::{fit_stable_charfn, ks_statistic, StableFit};
use superdiff::{ModelParams, RngStream};

use crate::Check;

const PATHS: usize = 100_000;

fn endpoints(b: f64, gamma: f64, n_scale: f64, stream: u64) -> Vec<f64> {
    let p = ModelParams::new(b, gamma).unwrap();
    scaled_endpoint_ensemble(n_scale, 1.0, StartLaw::Pi, &p, &RngStream::new(401, stream), PATHS).unwrap()
}

fn describe(f: &StableFit) -> String {
    format!(
        "exponent {:.4}, D {:.5}, R² {:.6}, ξ∈[{:.3}, {:.3}]",
        f.exponent, f.d_constant, f.r_squared, f.xi_range.0, f.xi_range.1
    )
}

pub fn run(c: &mut Check) {
    let small = endpoints(1.0, 1.0, 1e3, 0);
    let large = endpoints(1.0, 1.0, 4e3, 1);
    let ks = ks_statistic(&small, &large).unwrap();
    c.require(ks < 0.05, format!("KS(N=1e3, N=4e3) = {ks}"));
    c.note(format!("KS between scaled endpoints at N=1e3 and N=4e3: {ks:.4}"));

    let fit = fit_stable_charfn(&large, 1.0, None, 5.0 / 3.0).unwrap();
    c.require((fit.exponent - 5.0 / 3.0).abs() < 0.05, format!("B=1 exponent {}", fit.exponent));
    c.require(fit.r_squared > 0.99, format!("B=1 R² {}", fit.r_squared));
    c.note(format!("B=1, γ=1, N=4e3: {}", describe(&fit)));

    let flat = endpoints(0.0, 1.0, 4e3, 2);
    let fit0 = fit_stable_charfn(&flat, 1.0, None, 1.5).unwrap();
    c.require((fit0.exponent - 1.5).abs() < 0.05, format!("B=0 exponent {}", fit0.exponent));
    c.require(fit0.r_squared > 0.99, format!("B=0 R² {}", fit0.r_squared));
    c.note(format!("B=0, γ=1, N=4e3 (N^(-2/3) scaling): {}", describe(&fit0)));

    let d11 = fit.d_constant;
    for (j, (b, g)) in [(2.0, 1.0), (1.0, 2.0), (2.0, 2.0)].into_iter().enumerate() {
        let ens = endpoints(b, g, 4e3, 3 + j as u64);
        let f = fit_stable_charfn(&ens, 1.0, None, 5.0 / 3.0).unwrap();
        let ratio = f.d_constant / d11;
        let law = f64::abs(b).powf(-1.0 / 3.0) * g.powf(-2.0 / 3.0);
        let err = ratio / law - 1.0;
        c.require(err.abs() < 0.1, format!("(B,γ)=({b},{g}): D ratio {ratio} vs {law}"));
        c.note(format!("(B,γ)=({b},{g}): D ratio {ratio:.4} vs |B|^(-1/3)γ^(-2/3) = {law:.4} ({:+.2}%)", 100.0 * err));
    }
}
