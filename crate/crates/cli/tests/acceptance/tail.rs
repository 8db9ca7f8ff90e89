use superdiff::dispersion::{psi_observable, tail_plateau};
use superdiff::kinetic::PiSampler;
use superdiff::scaling::hill_tail_index;
use superdiff::{ModelParams, RngStream};

use crate::Check;

fn hill(p: &ModelParams, seed: u64) -> f64 {
    let sampler = PiSampler::new(p);
    let mut rng = RngStream::new(seed, 0).path_rng();
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| psi_observable(sampler.sample(&mut rng), p).unwrap())
        .collect();
    hill_tail_index(&xs, 0.01).unwrap().hill_estimate
}

pub fn run(c: &mut Check) {
    for (b, want, seed) in [(1.0, 5.0 / 3.0, 301), (0.0, 1.5, 302)] {
        let p = ModelParams::new(b, 1.0).unwrap();
        let h = hill(&p, seed);
        c.require((h - want).abs() < 0.1, format!("B={b}: Hill {h} vs {want}"));
        c.note(format!("B={b}: Hill index {h:.4} (target {want:.4} ± 0.1)"));
    }

    let lambdas: Vec<f64> = (0..=8).map(|j| 10f64.powf(3.0 + 0.25 * j as f64)).collect();
    let base = ModelParams::new(1.0, 1.0).unwrap();
    let plateau: Vec<f64> = lambdas.iter().map(|&l| tail_plateau(&base, l).unwrap()).collect();
    let (lo, hi) = plateau.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let spread = (hi - lo) / (0.5 * (hi + lo));
    c.require(spread < 0.05, format!("plateau spread {spread} over [1e3, 1e5]"));
    c.note(format!("plateau λ^(5/3)π(Ψ≥λ) in [{lo:.5}, {hi:.5}] over λ∈[1e3,1e5], spread {:.2}%", 100.0 * spread));

    let top = *lambdas.last().unwrap();
    let reference = *plateau.last().unwrap();
    for (b, g) in [(2.0, 1.0), (1.0, 2.0), (2.0, 2.0), (-1.0, 1.0)] {
        let p = ModelParams::new(b, g).unwrap();
        let ratio = tail_plateau(&p, top).unwrap() / reference;
        let law = f64::abs(b).powf(-1.0 / 3.0) * g.powf(-5.0 / 3.0);
        let err = ratio / law - 1.0;
        c.require(err.abs() < 0.01, format!("(B,γ)=({b},{g}): plateau ratio {ratio} vs {law}"));
        c.note(format!("(B,γ)=({b:>2},{g}): plateau ratio {ratio:.5} vs |B|^(-1/3)γ^(-5/3) = {law:.5} ({:+.3}%)", 100.0 * err));
    }
}
