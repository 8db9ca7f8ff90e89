use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use superdiff::dispersion::{psi_observable, tail_plateau};
use superdiff::kinetic::PiSampler;
use superdiff::scaling::{hill_tail_index, TailReport};
use superdiff::{PhononState, RngStream};

use super::{require, streams};
use crate::output::{float, write_json, CsvOut};
use crate::{CliError, Ctx};

const CHUNK: usize = 4096;

#[derive(Serialize)]
struct Report {
    hill: TailReport,
    predicted_index: f64,
    plateau: Vec<(f64, f64)>,
    /// `max/min - 1` over the plateau levels.
    plateau_spread: f64,
}

pub fn run(ctx: &Ctx) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.config.tail;
    let p = ctx.config.model.params()?;
    require(cfg.samples > 0, "tail.samples must be positive")?;
    let meta = ctx.meta(cfg)?;
    let sampler = PiSampler::new(&p);
    let stream = RngStream::new(ctx.seed, streams::TAIL);
    let chunks = cfg.samples.div_ceil(CHUNK);
    let draws: Vec<(PhononState, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.substream(c as u64).path_rng();
            let len = CHUNK.min(cfg.samples - c * CHUNK);
            (0..len)
                .map(|_| {
                    let s = sampler.sample(&mut rng);
                    Ok((s, psi_observable(s, &p)?))
                })
                .collect::<superdiff::Result<Vec<_>>>()
        })
        .collect::<superdiff::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let psi: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let hill = hill_tail_index(&psi, cfg.k_fraction)?;
    let plateau = cfg
        .plateau_lambdas
        .iter()
        .map(|&l| Ok((l, tail_plateau(&p, l)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let (lo, hi) = plateau
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &(_, v)| (a.min(v), b.max(v)));
    let report = Report {
        hill,
        predicted_index: p.stable_index(),
        plateau,
        plateau_spread: if lo > 0.0 && lo.is_finite() { hi / lo - 1.0 } else { f64::NAN },
    };
    let mut written = vec![write_json(&ctx.out, "tail_report.json", &meta, &report)?];
    if cfg.write_samples {
        let mut w = CsvOut::create(&ctx.out, "tail_samples.csv", &meta, &["index", "k", "branch", "psi"])?;
        for (j, (s, v)) in draws.iter().enumerate() {
            w.row(&[j.to_string(), float(s.k), s.branch.index().to_string(), float(*v)])?;
        }
        written.push(w.finish()?);
    }
    Ok(written)
}
