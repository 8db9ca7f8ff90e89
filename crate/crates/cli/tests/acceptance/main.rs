//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Positional arguments select criteria by number: `cargo test --test
//! acceptance -- 3 5`.

mod boltzmann;
mod chain;
mod crosscheck;
mod fracdiff;
mod identities;
mod levy;
mod measure;
mod repro;
mod tail;

use std::time::Instant;

/// Findings of one criterion.
#[derive(Default)]
pub struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    pub fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    pub fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

type Criterion = (u32, &'static str, fn(&mut Check));

const CRITERIA: [Criterion; 9] = [
    (1, "closed-form identities", identities::run),
    (2, "measure structure", measure::run),
    (3, "tail law", tail::run),
    (4, "Lévy limit", levy::run),
    (5, "Boltzmann Monte Carlo vs collision oracle", boltzmann::run),
    (6, "fractional solver", fracdiff::run),
    (7, "kinetic profile vs fractional diffusion", crosscheck::run),
    (8, "microscopic chain", chain::run),
    (9, "reproducibility across thread counts", repro::run),
];

fn main() {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, f) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let mut check = Check::default();
        f(&mut check);
        let secs = start.elapsed().as_secs_f64();
        let verdict = if check.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {id} [{verdict}] {name} ({secs:.1}s)");
        for n in &check.notes {
            println!("    {n}");
        }
        for f in &check.failures {
            println!("    failed: {f}");
        }
        if !check.failures.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
