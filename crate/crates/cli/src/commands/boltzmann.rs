use std::path::PathBuf;

use superdiff::boltzmann::{evaluate_un_profile, k_average_profile, InitialDatum};
use superdiff::{Branch, PhononState, RngStream};

use super::{require, streams};
use crate::output::{float, CsvOut};
use crate::{CliError, Ctx};

pub fn run(ctx: &Ctx) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.config.boltzmann;
    let p = ctx.config.model.params()?;
    require(cfg.paths > 0, "boltzmann.paths must be positive")?;
    let u0 = InitialDatum::new(cfg.datum.amplitude, cfg.datum.y.clone(), cfg.datum.k.clone())?;
    let starts = cfg
        .starts
        .iter()
        .map(|s| Ok(PhononState::new(s.k, Branch::from_index(s.branch)?)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let meta = ctx.meta(cfg)?;
    let mut w = CsvOut::create(
        &ctx.out,
        "boltzmann.csv",
        &meta,
        &["mode", "k", "branch", "N", "t", "y", "value", "stderr"],
    )?;
    for (ti, &t) in cfg.t_list.iter().enumerate() {
        let base = streams::BOLTZMANN + 1_000 * ti as u64;
        if starts.is_empty() {
            let stream = RngStream::new(ctx.seed, base);
            let est = k_average_profile(&cfg.y_list, cfg.n_scale, t, &u0, cfg.paths, &p, &stream)?;
            for (&y, e) in cfg.y_list.iter().zip(&est) {
                w.row(&[
                    "k_average".into(),
                    float(f64::NAN),
                    "0".into(),
                    float(cfg.n_scale),
                    float(t),
                    float(y),
                    float(e.mean),
                    float(e.stderr),
                ])?;
            }
        }
        for (si, s) in starts.iter().enumerate() {
            let stream = RngStream::new(ctx.seed, base + 1 + si as u64);
            let est = evaluate_un_profile(&cfg.y_list, *s, cfg.n_scale, t, &u0, cfg.paths, &p, &stream)?;
            for (&y, e) in cfg.y_list.iter().zip(&est) {
                w.row(&[
                    "fixed".into(),
                    float(s.k),
                    s.branch.index().to_string(),
                    float(cfg.n_scale),
                    float(t),
                    float(y),
                    float(e.mean),
                    float(e.stderr),
                ])?;
            }
        }
    }
    Ok(vec![w.finish()?])
}
