use std::path::PathBuf;

use serde::Serialize;
use superdiff::fracdiff::{evolve, leakage_estimate, GridFunction};

use super::{linspace, require};
use crate::output::{float, write_json, CsvOut};
use crate::{CliError, Ctx};

#[derive(Serialize)]
struct Snapshot {
    t: f64,
    mass: f64,
    peak: f64,
    leakage_estimate: f64,
}

pub fn run(ctx: &Ctx) -> Result<Vec<PathBuf>, CliError> {
    let cfg = &ctx.config.fracdiff;
    let p = ctx.config.model.params()?;
    let s_half = cfg.s_half.unwrap_or_else(|| 0.5 * p.stable_index());
    require(cfg.y_out_points >= 1, "fracdiff.y_out_points must be >= 1")?;
    let meta = ctx.meta(cfg)?;
    let u0 = GridFunction::gaussian(cfg.half_length, cfg.grid_points, cfg.center, cfg.width, cfg.mass)?;
    let ys = linspace(-cfg.y_out_max, cfg.y_out_max, cfg.y_out_points);
    let mut w = CsvOut::create(&ctx.out, "fracdiff.csv", &meta, &["t", "y", "value"])?;
    let mut snaps = Vec::new();
    for &t in &cfg.t_list {
        let u = evolve(&u0, cfg.d, s_half, t)?;
        for &y in &ys {
            w.row(&[float(t), float(y), float(u.interpolate_local(y, 8))])?;
        }
        snaps.push(Snapshot {
            t,
            mass: u.mass(),
            peak: u.peak(),
            leakage_estimate: leakage_estimate(cfg.half_length, cfg.d, s_half, t),
        });
    }
    Ok(vec![w.finish()?, write_json(&ctx.out, "fracdiff_summary.json", &meta, &snaps)?])
}
