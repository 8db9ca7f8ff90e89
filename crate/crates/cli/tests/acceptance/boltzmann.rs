use nalgebra::{DMatrix, DVector};
use superdiff::boltzmann::{collision_generator_matrix, evaluate_un, InitialDatum, KProfile, KineticDatum, YProfile};
use superdiff::{ModelParams, PhononState, RngStream};

use crate::Check;

const MODES: usize = 64;
const PATHS: usize = 20_000;

fn datum(branch1: Vec<f64>, branch2: Vec<f64>) -> InitialDatum {
    InitialDatum::new(1.0, YProfile::Constant, KProfile::Fourier { branch1, branch2 }).unwrap()
}

pub fn run(c: &mut Check) {
    let p = ModelParams::new(1.0, 1.0).unwrap();
    let (states, a) = collision_generator_matrix(&p, MODES).unwrap();
    let m = states.len();
    let gen = DMatrix::from_row_slice(m, m, &a);
    let f = datum(vec![1.0, 0.6, -0.3], vec![0.2, -0.8, 0.0, 0.4]);
    let h = DVector::from_iterator(m, states.iter().map(|&s| f.value(0.0, s)));
    let (lo, hi) = (h.min(), h.max());

    for &t in &[0.1, 1.0] {
        let exact = (&gen * t).exp() * &h;
        let (mut worst_z, mut misses, mut max_violations) = (0.0f64, 0, 0);
        for (r, &s) in states.iter().enumerate() {
            let est = evaluate_un(0.0, s, 1.0, t, &f, PATHS, &p, &RngStream::new(501, r as u64)).unwrap();
            // a transition rarer than 1/paths may never be observed
            let se = est.stderr.max((hi - lo) / PATHS as f64);
            let z = (est.mean - exact[r]).abs() / se;
            worst_z = worst_z.max(z);
            if z > 3.0 {
                misses += 1;
                c.require(false, format!("t={t} {s:?}: {} ± {se} vs {}", est.mean, exact[r]));
            }
            if est.mean < lo - 3.0 * se || est.mean > hi + 3.0 * se {
                max_violations += 1;
            }
        }
        c.require(max_violations == 0, format!("t={t}: {max_violations} maximum-principle violations"));
        c.note(format!(
            "t={t}: {m} nodes, {PATHS} paths each, worst |error|/stderr {worst_z:.2}, {misses} beyond 3σ, maximum principle held"
        ));
    }

    let g = datum(vec![0.3, -0.2], vec![1.0, 0.1, 0.1]);
    let (wa, wb) = (1.7, -0.45);
    let combo = |y: f64, s: PhononState| wa * f.value(y, s) + wb * g.value(y, s);
    let mut worst = 0.0f64;
    for (j, &s) in states.iter().enumerate().step_by(16) {
        let stream = RngStream::new(502, j as u64);
        let ef = evaluate_un(0.0, s, 1.0, 1.0, &f, 2000, &p, &stream).unwrap();
        let eg = evaluate_un(0.0, s, 1.0, 1.0, &g, 2000, &p, &stream).unwrap();
        let ec = evaluate_un(0.0, s, 1.0, 1.0, &combo, 2000, &p, &stream).unwrap();
        worst = worst.max((ec.mean - (wa * ef.mean + wb * eg.mean)).abs());
    }
    c.require(worst < 1e-12, format!("linearity defect {worst:e}"));
    c.note(format!("linearity under a shared stream: defect {worst:.1e}"));
}
