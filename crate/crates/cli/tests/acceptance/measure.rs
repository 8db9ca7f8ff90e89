use superdiff::dispersion::{mean_waiting_time, pi_density, waiting_time};
use superdiff::kinetic::PiSampler;
use superdiff::quadrature::{adaptive_simpson, torus_midpoints, torus_trapezoid};
use superdiff::scaling::mean_stderr;
use superdiff::{Branch, ModelParams, PhononState, RngStream};

use crate::Check;

fn pi_expectation(p: &ModelParams, f: &dyn Fn(PhononState) -> f64) -> f64 {
    let mut total = 0.0;
    for br in Branch::BOTH {
        let g = |k: f64| {
            let d = pi_density(k, br, p);
            if d == 0.0 {
                0.0
            } else {
                d * f(PhononState { k, branch: br })
            }
        };
        total += adaptive_simpson(&g, -0.5, 0.0, 1e-13) + adaptive_simpson(&g, 0.0, 0.5, 1e-13);
    }
    total
}

pub fn run(c: &mut Check) {
    for b in [-2.0, 0.0, 1.0] {
        let p = ModelParams::new(b, 1.0).unwrap();
        let mass: f64 = Branch::BOTH.iter().map(|&br| torus_trapezoid(|k| pi_density(k, br, &p), 4096)).sum();
        c.require((mass - 1.0).abs() < 1e-10, format!("B={b}: π mass {mass}"));
        c.note(format!("B={b:>2}: π total mass {mass:.15}"));
    }

    let p = ModelParams::new(1.0, 1.0).unwrap();
    type Moment = (&'static str, Box<dyn Fn(PhononState) -> f64>);
    let moments: [Moment; 4] = [
        ("sin²πk", Box::new(|s| (std::f64::consts::PI * s.k).sin().powi(2))),
        ("k²", Box::new(|s| s.k * s.k)),
        ("1{i=1}", Box::new(|s| f64::from(u8::from(s.branch == Branch::One)))),
        ("|k|·1{i=2}", Box::new(|s| if s.branch == Branch::Two { s.k.abs() } else { 0.0 })),
    ];
    let sampler = PiSampler::new(&p);
    let mut rng = RngStream::new(102, 0).path_rng();
    let draws: Vec<PhononState> = (0..1_000_000).map(|_| sampler.sample(&mut rng)).collect();
    for (name, f) in &moments {
        let exact = pi_expectation(&p, f.as_ref());
        let est = mean_stderr(draws.iter().map(|&s| f(s)));
        let z = (est.mean - exact) / est.stderr;
        c.require(est.covers(exact, 3.0), format!("E_π[{name}] = {} ± {} vs {exact}", est.mean, est.stderr));
        c.note(format!("E_π[{name}]: {:.6} ± {:.1e} vs {exact:.6} (z = {z:+.2})", est.mean, est.stderr));
    }

    for gamma in [1.0, 2.0] {
        let p = ModelParams::new(1.0, gamma).unwrap();
        let want = 1.0 / (2.0 * gamma);
        // π·t is flat in k away from 0; midpoints never hit k = 0
        let nodes = torus_midpoints(1024);
        let by_quadrature: f64 = Branch::BOTH
            .iter()
            .flat_map(|&br| nodes.iter().map(move |&k| (k, br)))
            .map(|(k, br)| pi_density(k, br, &p) * waiting_time(PhononState { k, branch: br }, &p).unwrap())
            .sum::<f64>()
            / nodes.len() as f64;
        let est = mean_stderr(draws.iter().map(|&s| waiting_time(s, &p).unwrap()));
        c.require(mean_waiting_time(&p) == want, "mean_waiting_time closed form");
        c.require((by_quadrature - want).abs() < 1e-8, format!("γ={gamma}: ∫t dπ = {by_quadrature}"));
        c.require(est.covers(want, 3.0), format!("γ={gamma}: t̄ = {} ± {} vs {want}", est.mean, est.stderr));
        c.note(format!(
            "γ={gamma}: sample t̄ = {:.5} ± {:.1e}, quadrature {by_quadrature:.10}, target {want}",
            est.mean, est.stderr
        ));
    }
}
